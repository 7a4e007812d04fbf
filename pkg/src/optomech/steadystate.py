"""Classical steady state of the driven two-mode system.

Covers the coherent mechanical displacement produced by the strong drive,
the mean optical and mechanical fields, photon and phonon numbers, the
enhanced couplings and the coupling-regime classification.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .exceptions import (
    DegenerateDenominator,
    InconsistentBoundaries,
    NonPositiveRate,
    NoPhysicalRoot,
    NoRootInBranch,
    PhaseOutOfBranch,
)
from .params import HBAR_SI, TWO_PI, Drive, SystemParams, validate, validate_drive

HALF_PI = 0.5 * math.pi


# -- drive amplitudes and the mechanical displacement -----------------------

def laser_amplitude(power, rate, omega_l, hbar=HBAR_SI):
    """Drive amplitude ``sqrt(2 P rate / (hbar omega_L))`` in rad/s."""
    if not rate > 0:
        raise NonPositiveRate("rate", rate)
    if not omega_l > 0:
        raise NonPositiveRate("omega_l", omega_l)
    if np.any(np.asarray(power) < 0):
        raise ValueError("laser power must be >= 0")
    return np.sqrt(2.0 * power * rate / (hbar * omega_l))


def phase_condition_phi_b(delta_m, gamma_b):
    """Mechanical drive phase that makes the steady displacement real and positive.

    Solves ``tan(phi_b) = 2 delta_m / gamma_b`` on the ``[pi, 1.5 pi)`` branch.
    """
    if not gamma_b > 0:
        raise NonPositiveRate("gamma_b", gamma_b)
    if delta_m < 0:
        raise ValueError("delta_m must be >= 0 for the [pi, 1.5pi) branch")
    return math.pi + math.atan(2.0 * delta_m / gamma_b)


def real_beta_s(epsilon_b, phi_b, gamma_b):
    """Real displacement ``-2 eps_b cos(phi_b) / gamma_b`` (requires ``cos(phi_b) <= 0``)."""
    c = np.cos(phi_b)
    if np.any(c > 0):
        raise PhaseOutOfBranch(f"cos(phi_b) > 0 for phi_b={phi_b!r}; expected phi_b in [pi, 1.5pi)")
    return -2.0 * epsilon_b * c / gamma_b


def power_for_beta(beta, phi_b, omega_lb, gamma_b, hbar=HBAR_SI):
    """Mechanical drive power needed for a real displacement ``beta``.

    Inverse of :func:`real_beta_s` composed with :func:`laser_amplitude`:
    ``P = beta**2 gamma hbar omega_L / (8 cos(phi_b)**2)``.
    """
    c = math.cos(phi_b)
    if c > 0:
        raise PhaseOutOfBranch(f"cos(phi_b) > 0 for phi_b={phi_b!r}")
    if c == 0.0:
        return math.inf if beta else 0.0
    return beta * beta * gamma_b * hbar * omega_lb / (8.0 * c * c)


def complex_beta_s(omega_b, delta_m, gamma_b):
    """Steady displacement ``Omega_b / (delta_m - 0.5j gamma_b)``."""
    den = complex(delta_m, -0.5 * gamma_b)
    if den == 0:
        raise DegenerateDenominator("delta_m = gamma_b = 0")
    return omega_b / den


def transient_beta(t, beta0, omega_b, delta_m, gamma_b):
    """Displacement relaxing from ``beta0`` towards the steady value.

    ``beta(t) = beta_s + (beta0 - beta_s) exp(-(1j delta_m + gamma_b/2) t)``.
    Accepts scalar or array ``t >= 0``.
    """
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be >= 0")
    beta_s = complex_beta_s(omega_b, delta_m, gamma_b)
    return beta_s + (beta0 - beta_s) * np.exp(-(1j * delta_m + 0.5 * gamma_b) * np.asarray(t))


# -- optical phase for a real mean field -------------------------------------

def _phi_a_terms(params: SystemParams, epsilon_a, g, delta_c0):
    """Return ``(c0, k)`` with ``RHS(phi) = c0 - k cos(phi)**2``."""
    ka, dm, gb = params.kappa_a, params.delta_m, params.gamma_b
    kerr = 8.0 * dm / (4.0 * dm * dm + gb * gb) * (2.0 * g * epsilon_a / ka) ** 2
    return 2.0 * delta_c0 / ka, 2.0 * kerr / ka


def phi_a_rhs(phi, params: SystemParams, epsilon_a, g, delta_c0):
    """Right-hand side of ``tan(phi_a) = 2/kappa * (delta_c0 - shift(phi_a))``."""
    c0, k = _phi_a_terms(params, epsilon_a, g, delta_c0)
    c = np.cos(phi)
    return c0 - k * c * c


def _bisect_newton(h, dh, lo, hi, hlo):
    # bisection down to a narrow bracket, then safeguarded Newton
    for _ in range(200):
        if hi - lo <= 1e-9 * max(1.0, abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        hm = h(mid)
        if hm == 0.0:
            return mid
        if (hm < 0) == (hlo < 0):
            lo, hlo = mid, hm
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(50):
        d = dh(x)
        if d == 0.0:
            break
        step = h(x) / d
        xn = x - step
        if not lo <= xn <= hi:
            break
        x = xn
        if abs(step) <= 4e-16 * max(1.0, abs(x)):
            break
    return x


def solve_phi_a_all(params: SystemParams, epsilon_a, g, delta_c0, *, grid=4096):
    """All roots of the optical phase condition on the admissible branch.

    The branch is ``[0, pi/2) U (3pi/2, 2pi]``, i.e. ``cos(phi_a) >= 0`` so
    that the real mean field is non-negative. Roots are returned sorted,
    reduced to ``[0, 2pi)``.
    """
    c0, k = _phi_a_terms(params, epsilon_a, g, delta_c0)

    def h(phi):  # sin - cos * RHS; zero iff tan = RHS on cos > 0
        c = math.cos(phi)
        return math.sin(phi) - c * (c0 - k * c * c)

    def dh(phi):
        c, s = math.cos(phi), math.sin(phi)
        return c + s * (c0 - k * c * c) - c * (2.0 * k * c * s)

    roots = []
    eps = 1e-12
    for lo, hi in ((0.0, HALF_PI - eps), (1.5 * math.pi + eps, TWO_PI)):
        xs = np.linspace(lo, hi, grid)
        hs = [h(x) for x in xs]
        for i in range(grid):
            if hs[i] == 0.0:
                roots.append(float(xs[i]))
            elif i + 1 < grid and hs[i + 1] != 0.0 and (hs[i] < 0) != (hs[i + 1] < 0):
                roots.append(_bisect_newton(h, dh, float(xs[i]), float(xs[i + 1]), hs[i]))

    reduced = sorted({0.0 if abs(r - TWO_PI) < 1e-15 else r for r in roots})
    out = []
    for r in reduced:
        if not out or abs(r - out[-1]) > 1e-12:
            out.append(r)
    return out


def solve_phi_a(params: SystemParams, epsilon_a, g, delta_c0):
    """Optical drive phase for which the mean optical field is real and positive.

    When several roots exist the smallest one in ``[0, pi/2)`` is returned;
    use :func:`solve_phi_a_all` for the full set.
    """
    if not params.kappa_a > 0:
        raise NonPositiveRate("kappa_a", params.kappa_a)
    roots = solve_phi_a_all(params, epsilon_a, g, delta_c0)
    if not roots:
        raise NoRootInBranch("no sign change of the phase condition on [0, pi/2) U (3pi/2, 2pi]")
    first = [r for r in roots if r < HALF_PI]
    return first[0] if first else roots[0]


def alpha_real(epsilon_a, phi_a, kappa_a):
    """Real mean optical field ``2 eps_a cos(phi_a) / kappa_a``."""
    c = np.cos(phi_a)
    if np.any(c < 0):
        raise PhaseOutOfBranch(f"cos(phi_a) < 0 for phi_a={phi_a!r}")
    return 2.0 * epsilon_a * c / kappa_a


def eta_of_alpha(alpha_sq, g, delta_m, gamma_b):
    """Mean mechanical field ``1j g |alpha|^2 / (1j delta_m + gamma_b / 2)``."""
    den = complex(0.5 * gamma_b, delta_m)
    if den == 0:
        raise DegenerateDenominator("delta_m = gamma_b = 0")
    return 1j * g * alpha_sq / den


# -- complex mean fields (optical bistability cubic) -------------------------

def _cubic_real_roots(b, c, d):
    """Real roots of the monic cubic ``x^3 + b x^2 + c x + d``, closed form."""
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc < 0.0:
        # three distinct real roots; trigonometric form
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * r)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        return [r * math.cos(theta - TWO_PI * k / 3.0) + shift for k in range(3)]
    sq = math.sqrt(disc)
    # avoid cancellation between the two cube-root terms
    u = -q / 2.0 - sq if q > 0 else -q / 2.0 + sq
    u = math.copysign(abs(u) ** (1.0 / 3.0), u)
    t = u - p / (3.0 * u) if u != 0.0 else 0.0
    roots = [t + shift]
    if disc == 0.0 and u != 0.0:
        roots.append(-u / 2.0 + shift)
    return roots


@dataclass(frozen=True)
class MeanFields:
    alpha: complex
    eta: complex
    all_roots: tuple[float, ...]


def mean_field_cubic(n, params: SystemParams, omega_a, g, delta_c0):
    """Residual of ``N [(k/2)^2 + (dc0 - s N)^2] - |Omega_a|^2`` with ``s = 2 g^2 dm / D``."""
    dm, gb, ka = params.delta_m, params.gamma_b, params.kappa_a
    s = 2.0 * g * g * dm / ((0.5 * gb) ** 2 + dm * dm)
    return n * ((0.5 * ka) ** 2 + (delta_c0 - s * n) ** 2) - abs(omega_a) ** 2


def complex_mean_fields(params: SystemParams, omega_a, g, delta_c0, *, root=0) -> MeanFields:
    """Self-consistent complex mean fields for a complex optical drive.

    The intracavity photon number ``N = |alpha|^2`` solves a real cubic;
    every real non-negative root is returned in ascending order and the
    fields are rebuilt from ``all_roots[root]`` (the low-excitation branch by
    default).
    """
    dm, gb, ka = params.delta_m, params.gamma_b, params.kappa_a
    if not ka > 0:
        raise NonPositiveRate("kappa_a", ka)
    if not gb > 0:
        raise NonPositiveRate("gamma_b", gb)
    D = (0.5 * gb) ** 2 + dm * dm
    s = 2.0 * g * g * dm / D
    w2 = abs(omega_a) ** 2
    base = (0.5 * ka) ** 2 + delta_c0 ** 2

    if w2 == 0.0:
        roots = [0.0]
    elif s * s == 0.0:
        roots = [w2 / base]
    else:
        with np.errstate(over="ignore"):
            coeffs = (-2.0 * delta_c0 / s, base / (s * s), -w2 / (s * s))
        b, c, d = coeffs
        root_scale = max(abs(b), math.sqrt(abs(c)), abs(d) ** (1.0 / 3.0))
        negligible = root_scale > 1e50 and w2 / base < 1e-10 * root_scale
        if not negligible:
            cand = _cubic_real_roots(*coeffs)
        else:
            # s so small that the closed form would overflow; the two large
            # roots then solve s^2 N^2 - 2 s dc0 N + base ~ 0, which has no
            # real solution, so only the low root remains
            cand = [w2 / base]
        roots = []
        for n in cand:
            for _ in range(3):  # Newton polish on the unscaled cubic
                f = n * ((0.5 * ka) ** 2 + (delta_c0 - s * n) ** 2) - w2
                df = (0.5 * ka) ** 2 + (delta_c0 - s * n) ** 2 - 2.0 * s * n * (delta_c0 - s * n)
                if df == 0.0:
                    break
                n -= f / df
            if n >= -1e-12 * (w2 / base):
                roots.append(max(n, 0.0))
        roots.sort()
        dedup = []
        for n in roots:
            if not dedup or abs(n - dedup[-1]) > 1e-12 * max(1.0, n):
                dedup.append(n)
        roots = dedup
    if not roots:
        raise NoPhysicalRoot("mean-field cubic has no non-negative real root")

    n = roots[root]
    alpha = -1j * omega_a * D / (complex(0.5 * ka, delta_c0) * D - 2j * g * g * dm * n)
    eta = eta_of_alpha(n, g, dm, gb)
    return MeanFields(alpha=complex(alpha), eta=complex(eta), all_roots=tuple(roots))


# -- photon and phonon numbers -----------------------------------------------

def avg_photon_number(power_a, phi_a, omega_la, kappa_a, hbar=HBAR_SI):
    """Mean photon number ``4 P (cos(2 phi_a) + 1) / (hbar omega_L kappa_a)``."""
    return 4.0 * power_a * (np.cos(2.0 * phi_a) + 1.0) / (hbar * omega_la * kappa_a)


def avg_phonon_number(beta, g_eff, gamma_b, delta_m):
    """Mean phonon number ``beta^2 + G^2 / ((gamma_b/2)^2 + delta_m^2)``."""
    return beta * beta + g_eff * g_eff / ((0.5 * gamma_b) ** 2 + delta_m * delta_m)


def phonon_number_from_power(power_b, phi_b, omega_lb, gamma_b, delta_m, chi, hbar=HBAR_SI):
    """Mean phonon number directly from the mechanical drive power and phase.

    ``8 P cos(phi_b)^2 / (hbar omega_L gamma_b) * (1 + chi^2 / ((gamma_b/2)^2 + delta_m^2))``,
    which assumes a single intracavity photon.
    """
    c = np.cos(phi_b)
    lead = 8.0 * power_b * c * c / (hbar * omega_lb * gamma_b)
    return lead * (1.0 + chi * chi / ((0.5 * gamma_b) ** 2 + delta_m * delta_m))


# -- coupling regimes --------------------------------------------------------

class Regime(IntEnum):
    WEAK = 0
    STRONG = 1
    ULTRASTRONG = 2
    DEEP_STRONG = 3

    @property
    def label(self):
        return ("Weak", "Strong", "Ultrastrong", "DeepStrong")[self]


@dataclass(frozen=True)
class RegimeReport:
    regime: Regime
    g_eff: float
    boundaries: tuple[float, float, float]
    beta_required: tuple[float, float] | None = None
    power_required: tuple[float, float] | None = None
    phonons: tuple[float, float] | None = None
    closed_upper: bool = False

    def as_dict(self):
        return {
            "regime": self.regime.label,
            "g_eff": self.g_eff,
            "boundaries": list(self.boundaries),
            "beta_required": list(self.beta_required) if self.beta_required else None,
            "power_required": list(self.power_required) if self.power_required else None,
            "phonons": list(self.phonons) if self.phonons else None,
        }


# boundaries sitting exactly on a threshold must not flip tier on rounding
_EDGE = 1e-12


def regime_boundaries(kappa_a, delta_m):
    """Coupling thresholds ``(0.5 kappa_a, 0.1 delta_m, delta_m)``."""
    lo, mid, hi = 0.5 * kappa_a, 0.1 * delta_m, delta_m
    if not lo < mid:
        raise InconsistentBoundaries(f"0.5*kappa_a={lo!r} >= 0.1*delta_m={mid!r}")
    return lo, mid, hi


def _tier(g_eff, bounds):
    lo, mid, hi = bounds
    if g_eff < lo * (1 - _EDGE):
        return Regime.WEAK
    if g_eff < mid * (1 - _EDGE):
        return Regime.STRONG
    if g_eff <= hi * (1 + _EDGE):
        return Regime.ULTRASTRONG
    return Regime.DEEP_STRONG


def regime_intervals(params: SystemParams, regime: Regime, *, omega_lb=None, alpha_r=1.0):
    """Displacement, drive-power and phonon intervals that realise ``regime``.

    Uses ``G = chi * beta * alpha_r`` and a mechanical drive at ``phi_b = pi``
    with frequency ``omega_lb`` (default: the mechanical detuning).
    """
    bounds = regime_boundaries(params.kappa_a, params.delta_m)
    edges = (0.0,) + bounds + (math.inf,)
    glo, ghi = edges[regime], edges[regime + 1]
    if params.chi <= 0 or alpha_r <= 0:
        return None, None, None
    omega_lb = params.delta_m if omega_lb is None else omega_lb
    blo, bhi = glo / (params.chi * alpha_r), ghi / (params.chi * alpha_r)

    def power(beta):
        return math.inf if math.isinf(beta) else power_for_beta(
            beta, math.pi, omega_lb, params.gamma_b, params.hbar)

    def phonons(beta):
        if math.isinf(beta):
            return math.inf
        return avg_phonon_number(beta, params.chi * beta * alpha_r, params.gamma_b, params.delta_m)

    return (blo, bhi), (power(blo), power(bhi)), (phonons(blo), phonons(bhi))


def classify_regime(g_eff, params: SystemParams, *, omega_lb=None, alpha_r=1.0) -> RegimeReport:
    """Classify an effective coupling as weak, strong, ultrastrong or deep strong.

    Thresholds are ``0.5 kappa_a``, ``0.1 delta_m`` and ``delta_m``; the
    ultrastrong interval is closed on both ends.
    """
    validate(params)
    bounds = regime_boundaries(params.kappa_a, params.delta_m)
    regime = _tier(g_eff, bounds)
    beta, power, nb = regime_intervals(params, regime, omega_lb=omega_lb, alpha_r=alpha_r)
    return RegimeReport(regime=regime, g_eff=float(g_eff), boundaries=bounds,
                        beta_required=beta, power_required=power, phonons=nb,
                        closed_upper=regime == Regime.ULTRASTRONG)


def regime_table(params: SystemParams, *, omega_lb=None, alpha_r=1.0):
    """One row per regime with its displacement, power and phonon intervals."""
    rows = []
    for regime in Regime:
        beta, power, nb = regime_intervals(params, regime, omega_lb=omega_lb, alpha_r=alpha_r)
        rows.append({"regime": regime.label, "beta": beta, "power_w": power, "n_b": nb})
    return rows


# -- full pipeline -----------------------------------------------------------

@dataclass(frozen=True)
class SteadyState:
    """Classical steady state for a given pair of drives.

    ``beta_s`` is the complex displacement for the actual mechanical drive
    phase; ``beta_s_real`` is the real-branch displacement (``None`` when
    ``cos(phi_b) > 0``). ``alpha`` is the complex optical field for the
    actual optical drive phase, while ``alpha_r`` is the real field reached
    at the phase ``phi_a`` that satisfies the real-coupling condition.
    """

    beta_s: complex
    beta_s_real: float | None
    alpha: complex
    alpha_r: float
    eta: complex
    n_a: float
    n_b: float
    g_eff: float
    g_single: float
    phi_a: float
    phi_b: float
    delta_c0: float
    delta_c2: float
    epsilon_a: float
    epsilon_b: float
    mean_field_roots: tuple[float, ...] = field(default=())
    n_b_from_power: float = math.nan

    def as_dict(self):
        out = {}
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            if isinstance(v, complex):
                out[name + "_re"], out[name + "_im"] = v.real, v.imag
            elif isinstance(v, tuple):
                out[name] = list(v)
            else:
                out[name] = v
        out["n_b_discrepancy"] = self.n_b_from_power - self.n_b
        return out


def solve_steady_state(params: SystemParams, drive_a: Drive, drive_b: Drive) -> SteadyState:
    """Chain the steady-state relations for a concrete pair of drives."""
    validate(params)
    validate_drive(drive_a)
    validate_drive(drive_b)
    ka, gb, dm, chi, hbar = params.kappa_a, params.gamma_b, params.delta_m, params.chi, params.hbar

    eps_b = float(laser_amplitude(drive_b.power, gb, drive_b.frequency, hbar))
    omega_b = 1j * eps_b * cmath.exp(1j * drive_b.phase)
    beta_s = complex_beta_s(omega_b, dm, gb)
    beta_r = float(real_beta_s(eps_b, drive_b.phase, gb)) if math.cos(drive_b.phase) <= 0 else None
    beta = beta_r if beta_r is not None else abs(beta_s)
    g = chi * beta
    delta_c0 = params.delta_c + chi * beta * beta

    eps_a = float(laser_amplitude(drive_a.power, ka, drive_a.frequency, hbar))
    phi_a = solve_phi_a(params, eps_a, g, delta_c0)
    a_r = float(alpha_real(eps_a, phi_a, ka))
    eta = eta_of_alpha(a_r * a_r, g, dm, gb)
    delta_c2 = delta_c0 - 2.0 * g * eta.real
    g_eff = g * a_r

    omega_a = 1j * eps_a * cmath.exp(1j * drive_a.phase)
    mf = complex_mean_fields(params, omega_a, g, delta_c0)

    return SteadyState(
        beta_s=complex(beta_s),
        beta_s_real=beta_r,
        alpha=mf.alpha,
        alpha_r=a_r,
        eta=complex(eta),
        n_a=a_r * a_r,
        n_b=float(avg_phonon_number(beta, g_eff, gb, dm)),
        g_eff=g_eff,
        g_single=g,
        phi_a=phi_a,
        phi_b=drive_b.phase,
        delta_c0=delta_c0,
        delta_c2=delta_c2,
        epsilon_a=eps_a,
        epsilon_b=eps_b,
        mean_field_roots=mf.all_roots,
        n_b_from_power=float(phonon_number_from_power(
            drive_b.power, drive_b.phase, drive_b.frequency, gb, dm, chi, hbar)),
    )
