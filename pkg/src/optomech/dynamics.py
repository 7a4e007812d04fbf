"""Linearised fluctuation dynamics: drift matrices and stability.

The fluctuations obey ``dV/dt = -A V + D V_in`` where ``A`` is the drift
matrix, so the model is stable when every eigenvalue of ``A`` has a
positive real part. Two independent checks are provided: a Routh-Hurwitz
test on characteristic-polynomial coefficients (Faddeev-LeVerrier, no
eigen-decomposition involved) and a direct eigenvalue test.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import EigenNoConverge, NonPositiveRate, NonRealCoefficients, WrongDegree

MARGINAL_RTOL = 1e-9


class ModelKind(str, enum.Enum):
    FULL = "full"
    RWA = "rwa"


@dataclass(frozen=True, eq=False)
class FluctuationModel:
    """Drift matrix and damping vector of the linearised fluctuations.

    Full models use the ordering ``(da, db, da+, db+)``; RWA models keep
    only ``(da, db)``.
    """

    drift: np.ndarray
    damping: np.ndarray
    delta_c2: float
    delta_m: float
    kappa_a: float
    gamma_b: float
    g_eff: float
    kind: ModelKind

    @property
    def dim(self):
        return self.drift.shape[0]


def _check_rates(kappa_a, gamma_b):
    if not kappa_a > 0:
        raise NonPositiveRate("kappa_a", kappa_a)
    if not gamma_b > 0:
        raise NonPositiveRate("gamma_b", gamma_b)


def full_drift(delta_c2, delta_m, kappa_a, gamma_b, g_eff):
    """4x4 drift matrix(es); broadcasts over array arguments."""
    dc, dm, ka, gb, G = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in
                                               (delta_c2, delta_m, kappa_a, gamma_b, g_eff)))
    K = np.zeros(dc.shape + (4, 4), dtype=complex)
    jG = 1j * G
    K[..., 0, 0] = 1j * dc + 0.5 * ka
    K[..., 0, 1] = -jG
    K[..., 0, 3] = -jG
    K[..., 1, 0] = -jG
    K[..., 1, 1] = 1j * dm + 0.5 * gb
    K[..., 1, 2] = -jG
    K[..., 2, 1] = jG
    K[..., 2, 2] = -1j * dc + 0.5 * ka
    K[..., 2, 3] = jG
    K[..., 3, 0] = jG
    K[..., 3, 2] = jG
    K[..., 3, 3] = -1j * dm + 0.5 * gb
    return K


def rwa_drift(delta_c2, delta_m, kappa_a, gamma_b, g_eff):
    """2x2 drift matrix(es) with the counter-rotating terms dropped."""
    dc, dm, ka, gb, G = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in
                                               (delta_c2, delta_m, kappa_a, gamma_b, g_eff)))
    M = np.zeros(dc.shape + (2, 2), dtype=complex)
    M[..., 0, 0] = 1j * dc + 0.5 * ka
    M[..., 0, 1] = -1j * G
    M[..., 1, 0] = -1j * G
    M[..., 1, 1] = 1j * dm + 0.5 * gb
    return M


def build_full(delta_c2, delta_m, kappa_a, gamma_b, g_eff) -> FluctuationModel:
    """Full (non-RWA) model with damping ``(sqrt(ka), sqrt(gb), sqrt(ka), sqrt(gb))``."""
    _check_rates(kappa_a, gamma_b)
    sk, sg = math.sqrt(kappa_a), math.sqrt(gamma_b)
    return FluctuationModel(
        drift=full_drift(delta_c2, delta_m, kappa_a, gamma_b, g_eff),
        damping=np.array([sk, sg, sk, sg]),
        delta_c2=float(delta_c2), delta_m=float(delta_m), kappa_a=float(kappa_a),
        gamma_b=float(gamma_b), g_eff=float(g_eff), kind=ModelKind.FULL,
    )


def build_rwa(delta_c2, delta_m, kappa_a, gamma_b, g_eff) -> FluctuationModel:
    """Beam-splitter (RWA) model with damping ``(sqrt(ka), sqrt(gb))``."""
    _check_rates(kappa_a, gamma_b)
    return FluctuationModel(
        drift=rwa_drift(delta_c2, delta_m, kappa_a, gamma_b, g_eff),
        damping=np.array([math.sqrt(kappa_a), math.sqrt(gamma_b)]),
        delta_c2=float(delta_c2), delta_m=float(delta_m), kappa_a=float(kappa_a),
        gamma_b=float(gamma_b), g_eff=float(g_eff), kind=ModelKind.RWA,
    )


# -- characteristic polynomial -----------------------------------------------

def faddeev_leverrier(A):
    """Coefficients ``[1, c1, ..., cn]`` of ``det(lambda I - A)``."""
    A = np.asarray(A)
    n = A.shape[0]
    coeffs = [1.0 + 0j]
    Mk = np.zeros_like(A, dtype=complex)
    eye = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[-1] * eye
        coeffs.append(-np.trace(A @ Mk) / k)
    return np.array(coeffs)


def _root_scale(A):
    return float(np.max(np.abs(A))) or 1.0


def char_poly(model: FluctuationModel):
    """Monic coefficients ``C0..Cn`` of ``det(lambda I + A)``.

    This is the drift polynomial evaluated at ``-lambda``: its roots are the
    negated drift eigenvalues, so the model is stable exactly when this
    polynomial is Hurwitz (all roots in the left half-plane). For the full
    model the coefficients are real and returned as floats; the RWA drift
    has no conjugate symmetry and its complex coefficients are returned
    as-is.

    Raises
    ------
    NonRealCoefficients
        If a full-model coefficient keeps an imaginary part above
        ``1e-9 * (1 + |C_k|)`` (in units scaled by the largest drift entry).
    """
    s = _root_scale(model.drift)
    c = faddeev_leverrier(-model.drift / s)
    if model.kind is ModelKind.RWA:
        return c * s ** np.arange(c.size)
    if np.any(np.abs(c.imag) > 1e-9 * (1.0 + np.abs(c.real))):
        raise NonRealCoefficients(f"imaginary residue {np.abs(c.imag).max():.3e}")
    return c.real * s ** np.arange(c.size)


def stability_polynomial(model: FluctuationModel):
    """Real polynomial whose Hurwitz property is equivalent to stability.

    For the full model this is :func:`char_poly`. For the RWA model the
    complex quadratic is multiplied by its coefficient-wise conjugate; the
    product is real, has the same roots plus their conjugates, and hence the
    same half-plane membership.
    """
    c = char_poly(model)
    if model.kind is ModelKind.FULL:
        return c
    prod = np.convolve(c, np.conj(c))
    return prod.real


# -- Routh-Hurwitz -----------------------------------------------------------

@dataclass(frozen=True)
class RouthHurwitz:
    passed: bool
    marginal: bool
    margins: tuple[float, ...]
    relative_margins: tuple[float, ...]


def _margins(C):
    if C.size == 3:
        _, c1, c2 = C
        return (c1, c2)
    c0, c1, c2, c3, c4 = C
    h2 = c1 * c2 - c0 * c3
    return (c1, h2, h2 * c3 - c1 * c1 * c4, c4)


def _term_sizes(C):
    """Magnitude of the largest possible cancellation in each margin."""
    if C.size == 3:
        return (1.0, 1.0)
    c0, c1, c2, c3, c4 = np.abs(C)
    return (1.0, c1 * c2 + c0 * c3, c1 * c2 * c3 + c0 * c3 * c3 + c1 * c1 * c4, 1.0)


def routh_hurwitz(C) -> RouthHurwitz:
    """Routh-Hurwitz test for a real quadratic or quartic.

    Passes when all roots lie strictly in the left half-plane: for a quartic
    ``C1 > 0``, ``C1 C2 - C0 C3 > 0``, ``(C1 C2 - C0 C3) C3 - C1^2 C4 > 0`` and
    ``C4 > 0``; for a quadratic ``C1 > 0`` and ``C2 > 0``.

    Relative margins are evaluated on the polynomial rescaled so that its
    largest root-scale ``|C_k / C0|^(1/k)`` is one. The two composite
    margins are further divided by the size of their individual terms, so a
    relative margin near zero means the inequality is decided by rounding.
    Any relative margin within ``1e-9`` of zero flags the result as marginal.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 1 or C.size not in (3, 5):
        raise WrongDegree(f"expected 3 or 5 coefficients, got {C.size}")
    if not C[0] > 0:
        raise ValueError("leading coefficient must be positive")
    k = np.arange(C.size)
    with np.errstate(divide="ignore"):
        scale = max(float(np.max(np.abs(C[1:] / C[0]) ** (1.0 / k[1:]))), np.finfo(float).tiny)
    Cn = C / (C[0] * scale ** k)
    margins = tuple(float(m) for m in _margins(C))
    rel = tuple(float(m / s) if s > 0 else 0.0 for m, s in zip(_margins(Cn), _term_sizes(Cn)))
    passed = all(m > 0 for m in rel)
    marginal = any(abs(m) < MARGINAL_RTOL for m in rel)
    return RouthHurwitz(passed=passed, marginal=marginal, margins=margins, relative_margins=rel)


# -- eigenvalue check --------------------------------------------------------

@dataclass(frozen=True)
class StabilityReport:
    kind: ModelKind
    coefficients: tuple[float, ...]
    eigenvalues: tuple[complex, ...]
    routh_hurwitz_pass: bool
    eigen_pass: bool
    margins: tuple[float, ...]
    relative_margins: tuple[float, ...]
    marginal: bool

    @property
    def agree(self):
        return self.routh_hurwitz_pass == self.eigen_pass

    @property
    def verdict(self):
        if self.marginal:
            return "marginal"
        return "stable" if self.routh_hurwitz_pass and self.eigen_pass else "unstable"

    @property
    def stable(self):
        return self.verdict == "stable"

    def as_dict(self):
        return {
            "kind": self.kind.value,
            "coefficients": list(self.coefficients),
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "routh_hurwitz_pass": self.routh_hurwitz_pass,
            "eigen_pass": self.eigen_pass,
            "margins": list(self.margins),
            "relative_margins": list(self.relative_margins),
            "verdict": self.verdict,
        }


def eigenvalues(model: FluctuationModel):
    """Drift eigenvalues: closed form for 2x2, LAPACK otherwise."""
    A = model.drift
    if model.dim == 2:
        half_tr = 0.5 * (A[0, 0] + A[1, 1])
        # ((a - d)/2)^2 + bc avoids cancelling tr^2/4 against det
        half_gap = 0.5 * (A[0, 0] - A[1, 1])
        root = np.sqrt(half_gap * half_gap + A[0, 1] * A[1, 0] + 0j)
        return np.array([half_tr - root, half_tr + root])
    try:
        return np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenNoConverge(str(exc)) from exc


def eigen_stability(model: FluctuationModel) -> StabilityReport:
    """Stability from eigenvalue signs, reported next to the Routh-Hurwitz result."""
    ev = eigenvalues(model)
    if not np.all(np.isfinite(ev)):
        raise EigenNoConverge("non-finite eigenvalues")
    min_re = float(np.min(ev.real))
    eig_scale = float(np.max(np.abs(ev))) or 1.0
    eig_marginal = abs(min_re) <= MARGINAL_RTOL * eig_scale
    rh = routh_hurwitz(stability_polynomial(model))
    order = np.lexsort((ev.imag, ev.real))
    return StabilityReport(
        kind=model.kind,
        coefficients=tuple(float(x) for x in stability_polynomial(model)),
        eigenvalues=tuple(complex(z) for z in ev[order]),
        routh_hurwitz_pass=rh.passed,
        eigen_pass=min_re > 0,
        margins=rh.margins,
        relative_margins=rh.relative_margins,
        marginal=rh.marginal or eig_marginal,
    )


def check_stability(model: FluctuationModel) -> StabilityReport:
    return eigen_stability(model)


def batch_min_real_eigenvalue(drift):
    """Smallest eigenvalue real part for a stack of drift matrices."""
    return np.linalg.eigvals(drift).real.min(axis=-1)
