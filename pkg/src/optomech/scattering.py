"""Input-output scattering matrices, transmission probabilities and spectra.

Scattering matrices follow from the drift matrix ``A`` and damping ``D`` as
``S(omega) = D^T (A - i omega I)^-1 D - I``. Frequencies are measured in the
same rotating frame as the detunings, so resonance means
``omega = delta_c2 = delta_m``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _linalg
from ._validation import check_grid
from .dynamics import (
    FluctuationModel,
    ModelKind,
    build_full,
    build_rwa,
    eigen_stability,
    full_drift,
    rwa_drift,
)
from .exceptions import SingularAtProbe, UnstableModel
from .params import SystemParams, validate

CHANNELS = ("p_ab", "p_ba", "theta_vac_a", "theta_vac_b", "t_ab", "t_ba", "sigma_ab")
FULL_CHANNELS = ("p_ab", "p_ba", "theta_vac_a", "theta_vac_b", "sigma_ab")
RWA_CHANNELS = ("t_ab", "t_ba")

RESIDUAL_TOL = 1e-10
COND_MAX = 1e12
PEAK_FLOOR = 1e-6


# -- scattering matrices -----------------------------------------------------

def _full_matrix(omega, dc2, dm, ka, gb, G):
    omega, dc2, dm, ka, gb, G = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (omega, dc2, dm, ka, gb, G)))
    A = full_drift(dc2, dm, ka, gb, G)
    A[..., range(4), range(4)] -= 1j * omega[..., None]
    inv, residual, cond = _linalg.inverse(A)
    bad = (residual > RESIDUAL_TOL) | (cond > COND_MAX)
    if np.any(bad):
        where = np.flatnonzero(bad)[0]
        raise SingularAtProbe(
            f"K - i omega I not safely invertible at omega={omega.ravel()[where]!r} "
            f"(residual {residual.ravel()[where]:.2e}, cond {cond.ravel()[where]:.2e})")
    mu = np.sqrt(np.stack([ka, gb, ka, gb], axis=-1))
    O = mu[..., :, None] * inv * mu[..., None, :]
    O[..., range(4), range(4)] -= 1.0
    return O


def _rwa_matrix(omega, dc2, dm, ka, gb, G):
    omega, dc2, dm, ka, gb, G = np.broadcast_arrays(
        *(np.asarray(x, dtype=float) for x in (omega, dc2, dm, ka, gb, G)))
    A = rwa_drift(dc2, dm, ka, gb, G)
    A[..., range(2), range(2)] -= 1j * omega[..., None]
    inv, det = _linalg.inverse_2x2(A)
    scale = np.abs(A).max(axis=(-2, -1)) ** 2
    bad = ~np.isfinite(inv).all(axis=(-2, -1)) | (np.abs(det) <= scale / COND_MAX)
    if np.any(bad):
        where = np.flatnonzero(bad)[0]
        raise SingularAtProbe(f"M - i omega I singular at omega={omega.ravel()[where]!r}")
    L = np.sqrt(np.stack([ka, gb], axis=-1))
    X = L[..., :, None] * inv * L[..., None, :]
    X[..., range(2), range(2)] -= 1.0
    return X


def _require(model, kind):
    if model.kind is not kind:
        raise TypeError(f"expected a {kind.value} model, got {model.kind.value}")


def scatter_full(omega, model: FluctuationModel):
    """4x4 scattering matrix ``O(omega)`` in the ordering ``(a, b, a+, b+)``.

    ``omega`` may be a scalar or an array; the result then has shape
    ``omega.shape + (4, 4)``.

    Raises
    ------
    SingularAtProbe
        If ``K - i omega I`` has 1-norm condition number above ``1e12`` or the
        inversion residual exceeds ``1e-10``.
    """
    _require(model, ModelKind.FULL)
    m = model
    return _full_matrix(omega, m.delta_c2, m.delta_m, m.kappa_a, m.gamma_b, m.g_eff)


def scatter_rwa(omega, model: FluctuationModel):
    """2x2 scattering matrix ``X(omega)`` in the ordering ``(a, b)``."""
    _require(model, ModelKind.RWA)
    m = model
    return _rwa_matrix(omega, m.delta_c2, m.delta_m, m.kappa_a, m.gamma_b, m.g_eff)


def analytic_x_symmetric(g_eff, xi):
    """Closed-form RWA scattering matrix at resonance for matched detunings and rates.

    Diagonal ``0.5 xi^2 / (0.25 xi^2 + G^2) - 1``, off-diagonal
    ``1j xi G / (0.25 xi^2 + G^2)``.
    """
    if not xi > 0:
        raise ValueError("xi must be > 0")
    den = 0.25 * xi * xi + g_eff * g_eff
    diag = 0.5 * xi * xi / den - 1.0
    off = 1j * xi * g_eff / den
    return np.array([[diag, off], [off, diag]], dtype=complex)


def resonant_transmission(g_eff, xi):
    """``T_a^b`` at resonance in the symmetric RWA model, ``(xi G / (xi^2/4 + G^2))^2``."""
    g_eff = np.asarray(g_eff, dtype=float)
    return (xi * g_eff / (0.25 * xi * xi + g_eff * g_eff)) ** 2


# -- probabilities -----------------------------------------------------------

@dataclass(frozen=True)
class ProbabilitySet:
    p_ab: float
    p_ba: float
    theta_vac_a: float
    theta_vac_b: float
    t_ab: float
    t_ba: float
    sigma_ab: float

    def as_dict(self):
        return {name: getattr(self, name) for name in CHANNELS}


def probabilities_from_matrices(O=None, X=None):
    """Channel arrays from scattering matrices; missing models give NaN columns."""
    out = {}
    if O is not None:
        a2 = np.abs(O) ** 2
        out["p_ab"] = a2[..., 0, 1]
        out["p_ba"] = a2[..., 1, 0]
        out["theta_vac_a"] = a2[..., 0, 2] + a2[..., 0, 3]
        out["theta_vac_b"] = a2[..., 1, 2] + a2[..., 1, 3]
        out["sigma_ab"] = a2[..., 0, 1] + a2[..., 0, 3]
    if X is not None:
        x2 = np.abs(X) ** 2
        out["t_ab"] = x2[..., 0, 1]
        out["t_ba"] = x2[..., 1, 0]
    shape = next(iter(out.values())).shape
    for name in CHANNELS:
        out.setdefault(name, np.full(shape, np.nan))
    return {name: out[name] for name in CHANNELS}


def probability_arrays(omega, delta_c2, delta_m, kappa_a, gamma_b, g_eff, which="both"):
    """Every channel on a broadcast grid of probe frequencies and parameters.

    ``which`` selects ``"full"``, ``"rwa"`` or ``"both"``; channels of a model
    that is not evaluated are NaN.
    """
    which = _which(which)
    args = (omega, delta_c2, delta_m, kappa_a, gamma_b, g_eff)
    O = _full_matrix(*args) if which in ("full", "both") else None
    X = _rwa_matrix(*args) if which in ("rwa", "both") else None
    return probabilities_from_matrices(O, X)


def probabilities(omega, full_model: FluctuationModel, rwa_model: FluctuationModel) -> ProbabilitySet:
    """All scattering probabilities at one probe frequency.

    Non-RWA laser-field probabilities ``p_ab = |O[a,b]|^2``, vacuum
    contributions ``theta_vac_a = |O[a,a+]|^2 + |O[a,b+]|^2`` (mirrored for
    ``b``), RWA probabilities ``t_ab = |X[a,b]|^2`` and the older probability
    ``sigma_ab = |O[a,b]|^2 + |O[a,b+]|^2``, which overcounts the vacuum part.
    """
    _require(full_model, ModelKind.FULL)
    _require(rwa_model, ModelKind.RWA)
    vals = probabilities_from_matrices(scatter_full(omega, full_model), scatter_rwa(omega, rwa_model))
    return ProbabilitySet(**{k: float(v) for k, v in vals.items()})


# -- spectra -----------------------------------------------------------------

def _which(which):
    which = getattr(which, "value", which)
    which = str(which).lower()
    if which not in ("full", "rwa", "both"):
        raise ValueError(f"which must be 'full', 'rwa' or 'both', got {which!r}")
    return which


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Probabilities sampled on a strictly increasing probe-frequency grid."""

    omega: np.ndarray
    values: dict
    params_snapshot: dict = field(default_factory=dict)
    stability: dict = field(default_factory=dict)

    def __len__(self):
        return self.omega.size

    def __getitem__(self, channel):
        return self.values[channel]

    @property
    def points(self):
        return [(float(w), ProbabilitySet(**{k: float(self.values[k][i]) for k in CHANNELS}))
                for i, w in enumerate(self.omega)]

    def rows(self):
        cols = [self.omega] + [self.values[k] for k in CHANNELS]
        return np.column_stack(cols)


def sweep_spectrum(params: SystemParams, g_eff, omega_grid, which="both", *,
                   delta_c2=None, allow_unstable=False, jobs=1) -> Spectrum:
    """Evaluate every channel over a probe-frequency grid.

    ``delta_c2`` is the modified optical detuning entering the fluctuation
    model; it defaults to ``params.delta_c`` (no mean-field shift). Grid
    points are evaluated independently, optionally on ``jobs`` threads, and
    merged in grid order.

    Raises
    ------
    UnstableModel
        If the selected model(s) are not strictly stable and
        ``allow_unstable`` is false.
    """
    validate(params)
    which = _which(which)
    omega = check_grid(omega_grid, name="omega_grid")
    dc2 = params.delta_c if delta_c2 is None else float(delta_c2)
    args = (dc2, params.delta_m, params.kappa_a, params.gamma_b, float(g_eff))

    stability = {}
    if which in ("full", "both"):
        stability["full"] = eigen_stability(build_full(*args))
    if which in ("rwa", "both"):
        stability["rwa"] = eigen_stability(build_rwa(*args))
    unstable = [k for k, rep in stability.items() if not rep.stable]
    if unstable and not allow_unstable:
        detail = ", ".join(f"{k}: {stability[k].verdict}" for k in unstable)
        raise UnstableModel(f"fluctuation model not stable ({detail}); pass allow_unstable to override")

    jobs = max(1, int(jobs or 1))
    chunks = np.array_split(omega, min(jobs, omega.size))
    if jobs == 1:
        parts = [probability_arrays(omega, *args, which=which)]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda w: probability_arrays(w, *args, which=which), chunks))
    values = {k: np.concatenate([p[k] for p in parts]) for k in CHANNELS}

    snapshot = params.as_dict()
    snapshot.update(delta_c2=dc2, g_eff=float(g_eff), which=which)
    return Spectrum(omega=omega, values=values, params_snapshot=snapshot,
                    stability={k: v.verdict for k, v in stability.items()})


# -- peaks -------------------------------------------------------------------

@dataclass(frozen=True)
class PeakAnalysis:
    peak_count: int
    peak_positions: list
    peak_values: list
    symmetric_about: float | None = None
    splitting: float | None = None

    def as_dict(self):
        return {
            "peak_count": self.peak_count,
            "peak_positions": list(self.peak_positions),
            "peak_values": list(self.peak_values),
            "symmetric_about": self.symmetric_about,
            "splitting": self.splitting,
        }


def find_peaks(omega, y, floor=PEAK_FLOOR, center=None) -> PeakAnalysis:
    """Strict interior local maxima of ``y`` above ``floor``; no interpolation."""
    omega = np.asarray(omega, dtype=float)
    y = np.asarray(y, dtype=float)
    if omega.size < 5:
        raise ValueError("peak analysis needs at least 5 points")
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]) & (y[1:-1] > floor)
    idx = np.flatnonzero(inner) + 1
    positions = [float(omega[i]) for i in idx]
    values = [float(y[i]) for i in idx]
    splitting = symmetric = None
    if len(idx) >= 2:
        top = sorted(np.argsort(y[idx])[-2:])
        w1, w2 = omega[idx[top[0]]], omega[idx[top[1]]]
        splitting = float(abs(w2 - w1))
        mid = 0.5 * (w1 + w2)
        step = float(np.max(np.diff(omega)))
        if center is not None and abs(mid - center) <= step:
            symmetric = float(mid)
    return PeakAnalysis(peak_count=len(idx), peak_positions=positions, peak_values=values,
                        symmetric_about=symmetric, splitting=splitting)


def peak_analysis(spec: Spectrum, channel="t_ab", *, floor=PEAK_FLOOR) -> PeakAnalysis:
    """Peaks of one channel of a spectrum.

    ``symmetric_about`` is set when the two largest peaks average to within
    one grid step of the mechanical detuning.
    """
    if channel not in CHANNELS:
        raise KeyError(f"unknown channel {channel!r}")
    center = spec.params_snapshot.get("delta_m")
    return find_peaks(spec.omega, spec.values[channel], floor=floor, center=center)
