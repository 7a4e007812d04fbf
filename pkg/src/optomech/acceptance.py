"""Acceptance suite: every numbered criterion as one or more checked results.

Each check returns an :class:`AcceptanceResult`. Failures are results, not
exceptions; a check that raises is reported as a failed result carrying the
error text.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .dynamics import build_full, build_rwa, eigen_stability, eigenvalues
from .params import SystemParams, circuit_qed
from .presets import ROUNDED_HBAR, SIDEBAND_RATIO, decomposition_lines
from .scattering import analytic_x_symmetric, find_peaks, probability_arrays, scatter_rwa, sweep_spectrum
from .steadystate import (
    avg_phonon_number,
    avg_photon_number,
    laser_amplitude,
    phonon_number_from_power,
    power_for_beta,
    real_beta_s,
)

SEED = 20240611


@dataclass
class AcceptanceResult:
    criterion_id: str
    observed: float
    expected: float
    tolerance: float
    passed: bool
    runtime_ms: float
    comparison: str = "abs"
    detail: dict = field(default_factory=dict)

    @property
    def pass_(self):
        return self.passed

    def as_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        return (f"{tag} {self.criterion_id}: observed={self.observed:.6g} expected={self.expected:.6g} "
                f"tol={self.tolerance:.3g} ({self.comparison}) {self.runtime_ms:.1f} ms")


def _cmp(observed, expected, tolerance, comparison):
    if comparison == "abs":
        return abs(observed - expected) <= tolerance
    if comparison == "rel":
        return abs(observed - expected) <= tolerance * abs(expected)
    if comparison == "le":
        return observed <= expected + tolerance
    if comparison == "ge":
        return observed >= expected - tolerance
    if comparison == "gt":
        return observed > expected
    if comparison == "lt":
        return observed < expected
    if comparison == "true":
        return bool(observed)
    raise ValueError(comparison)


def _result(cid, observed, expected, tolerance, comparison, t0, budget_s, **detail):
    ms = (time.perf_counter() - t0) * 1e3
    ok = _cmp(observed, expected, tolerance, comparison) and ms <= budget_s * 1e3
    detail.setdefault("budget_ms", budget_s * 1e3)
    return AcceptanceResult(cid, float(observed), float(expected), float(tolerance), bool(ok), ms,
                            comparison, detail)


def _circuit_row():
    return circuit_qed().replace(hbar=ROUNDED_HBAR)


# -- criteria ----------------------------------------------------------------

def _table2():
    p = _circuit_row()
    out = []
    for beta, power, nb in ((6.6, 3.87e-15, 44.0), (208.0, 3.85e-12, 4.326e4), (2080.0, 0.385e-9, 4.326e6)):
        t0 = time.perf_counter()
        P = power_for_beta(beta, math.pi, p.delta_m, p.gamma_b, p.hbar)
        out.append(_result(f"T2.power.beta={beta:g}", P, power, 0.01, "rel", t0, 1.0))
        t0 = time.perf_counter()
        n = avg_phonon_number(beta, p.chi * beta, p.gamma_b, p.delta_m)
        out.append(_result(f"T2.phonons.beta={beta:g}", n, nb, 0.01, "rel", t0, 1.0))
    return out


def _single_photon():
    t0 = time.perf_counter()
    p = _circuit_row()
    n = avg_photon_number(8.93e-17, 0.0, p.delta_m, p.kappa_a, p.hbar)
    eps = laser_amplitude(8.93e-17, p.kappa_a, p.delta_m, p.hbar)
    alpha = 2.0 * eps / p.kappa_a
    return [_result("NA.single_photon", n, 1.0, 0.01, "rel", t0, 1.0, alpha_r_squared=float(alpha ** 2))]


def _symmetric(xi=1.0):
    D = SIDEBAND_RATIO * xi
    return D, np.linspace(D - 5 * xi, D + 5 * xi, 2001)


def _critical():
    t0 = time.perf_counter()
    D, grid = _symmetric()
    sp = SystemParams(delta_c=D, delta_m=D, kappa_a=1.0, gamma_b=1.0, hbar=1.0)
    spec = sweep_spectrum(sp, 0.5, grid, which="rwa")
    at = float(probability_arrays(D, D, D, 1.0, 1.0, 0.5, which="rwa")["t_ab"])
    r1 = _result("CRIT.t_ab_resonance", at, 1.0, 1e-9, "abs", t0, 1.0)
    t0 = time.perf_counter()
    recip = float(np.max(np.abs(spec["t_ab"] - spec["t_ba"])))
    return [r1, _result("CRIT.reciprocity", recip, 0.0, 1e-12, "abs", t0, 1.0, points=grid.size)]


def _oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(100):
        xi = 10 ** rng.uniform(-2, 1)
        G = xi * 10 ** rng.uniform(-2, 2)
        D = xi * 10 ** rng.uniform(0, 3)
        X = scatter_rwa(D, build_rwa(D, D, xi, xi, G))
        worst = max(worst, float(np.max(np.abs(X - analytic_x_symmetric(G, xi)))))
    return [_result("ORACLE.x_symmetric", worst, 0.0, 1e-10, "abs", t0, 1.0, draws=100)]


def _rwa_peaks(gamma_b, g_eff):
    D, grid = _symmetric()
    t = probability_arrays(grid, D, D, 1.0, gamma_b, g_eff, which="rwa")["t_ab"]
    return find_peaks(grid, t, center=D), t, grid


def _fig6():
    out = []
    t0 = time.perf_counter()
    for G in (0.1, 0.3):
        pa, _, _ = _rwa_peaks(1.0, G)
        out.append(_result(f"FIG6.single_peak.g={G:g}", pa.peak_count, 1, 0, "abs", t0, 5.0))
    split = {}
    for G in (0.7, 2.0):
        pa, _, grid = _rwa_peaks(1.0, G)
        ok = pa.peak_count == 2 and pa.symmetric_about is not None
        split[G] = pa.splitting or 0.0
        out.append(_result(f"FIG6.two_symmetric_peaks.g={G:g}", ok, True, 0, "true", t0, 5.0,
                           peak_count=pa.peak_count, positions=pa.peak_positions,
                           symmetric_about=pa.symmetric_about))
    out.append(_result("FIG6.splitting_grows", split[2.0] - split[0.7], 0.0, 0, "gt", t0, 5.0,
                       splitting_0_7=split[0.7], splitting_2=split[2.0]))
    return out


def _fig7():
    out = []
    t0 = time.perf_counter()
    for gb in (0.02, 0.2, 0.4):
        pa, _, _ = _rwa_peaks(gb, 0.5)
        out.append(_result(f"FIG7.two_peaks.gamma={gb:g}", pa.peak_count, 2, 0, "abs", t0, 5.0))
    pa, t, _ = _rwa_peaks(1.0, 0.5)
    ok = pa.peak_count == 1 and abs(max(pa.peak_values) - 1.0) <= 1e-9
    out.append(_result("FIG7.critical.gamma=1", ok, True, 0, "true", t0, 5.0,
                       peak_count=pa.peak_count, peak_values=pa.peak_values))
    maxima, counts = [], []
    for gb in (1.4, 1.8, 4.0, 10.0):
        pa, t, _ = _rwa_peaks(gb, 0.5)
        counts.append(pa.peak_count)
        maxima.append(float(t.max()))
    ok = all(c == 1 for c in counts) and all(a > b for a, b in zip(maxima, maxima[1:]))
    out.append(_result("FIG7.single_decreasing", ok, True, 0, "true", t0, 5.0,
                       peak_counts=counts, maxima=maxima))
    return out


def _fig5_line(n=200):
    D = SIDEBAND_RATIO
    G = np.linspace(D / n, D, n)
    return G, probability_arrays(D, D, D, 1.0, 1.0, G)


def _fig5b():
    t0 = time.perf_counter()
    D = SIDEBAND_RATIO
    theta = float(probability_arrays(D, D, D, 1.0, 1.0, D, which="full")["theta_vac_a"])
    # within a factor of 3 of 1e-5, either direction
    ratio = max(theta / 1e-5, 1e-5 / theta)
    r1 = _result("FIG5B.theta_at_g=delta", ratio, 3.0, 0.0, "le", t0, 2.0, theta_vac_a=theta)
    t0 = time.perf_counter()
    G = np.linspace(0.3 * D / 200, 0.3 * D, 200)
    th = probability_arrays(D, D, D, 1.0, 1.0, G, which="full")["theta_vac_a"]
    worst_step = float(np.min(np.diff(th)))
    r2 = _result("FIG5B.nondecreasing", worst_step, 0.0, 0.0, "ge", t0, 2.0)
    return [r1, r2]


def _fig5a():
    t0 = time.perf_counter()
    G, v = _fig5_line()
    worst = float(np.max(np.abs(v["p_ab"] - v["t_ab"])))
    return [_result("FIG5A.rwa_validity", worst, 0.0, 1e-3, "abs", t0, 2.0, points=G.size)]


def _decomposition():
    t0 = time.perf_counter()
    xi = np.linspace(0.0, 1.0, 102)[1:-1]
    lines = decomposition_lines(xi)
    per_line, stable_max = {}, 0.0
    worst = 0.0
    for label, (G, v, stable) in lines.items():
        resid = np.abs(v["p_ab"] - v["theta_vac_a"] - v["t_ab"])
        k = int(np.argmax(resid))
        per_line[label] = {"max": float(resid[k]), "at_xi": float(xi[k]),
                           "unstable_points": int((~stable).sum())}
        if stable.any():
            stable_max = max(stable_max, float(resid[stable].max()))
        worst = max(worst, float(resid[k]))
    return [_result("DECOMP.max_residual", worst, 0.0, 0.05, "abs", t0, 5.0,
                    per_line=per_line, max_over_stable_points=stable_max)]


def _appendix_d():
    t0 = time.perf_counter()
    xi = np.linspace(0.0, 1.0, 1002)[1:-1]
    v = probability_arrays(1.0, 1.0, 1.0, xi, xi, 0.5, which="full")
    excess = v["sigma_ab"] - v["theta_vac_a"]
    k = int(np.argmax(excess))
    r1 = _result("APPD.sigma_exceeds_one", float(excess[k]), 1.0, 0.0, "gt", t0, 2.0, at_xi=float(xi[k]))
    t0 = time.perf_counter()
    corrected = float(np.max(v["p_ab"] - v["theta_vac_a"]))
    r2 = _result("APPD.corrected_bounded", corrected, 1.0, 1e-9, "le", t0, 2.0)
    return [r1, r2]


def _stability():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED + 1)
    mismatches, marginal, checked = 0, 0, 0
    for _ in range(1000):
        ka, gb, G, dc2 = 10 ** rng.uniform(-3, 3, size=4)
        for build in (build_full, build_rwa):
            rep = eigen_stability(build(dc2, 1.0, ka, gb, G))
            if rep.marginal:
                marginal += 1
                continue
            checked += 1
            mismatches += rep.routh_hurwitz_pass != rep.eigen_pass
    r1 = _result("STAB.oracle_agreement", mismatches, 0, 0, "abs", t0, 5.0,
                 checked=checked, marginal=marginal)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        D = 10 ** rng.uniform(-1, 3)
        xi = D * 10 ** rng.uniform(-4, 0)
        G = D * 10 ** rng.uniform(-4, 0.5)
        ev = np.sort_complex(eigenvalues(build_rwa(D, D, xi, xi, G)))
        ref = np.sort_complex(np.array([1j * (D - G) + 0.5 * xi, 1j * (D + G) + 0.5 * xi]))
        worst = max(worst, float(np.max(np.abs(ev - ref) / np.abs(ref))))
    r2 = _result("STAB.rwa_analytic_eigenvalues", worst, 0.0, 1e-12, "abs", t0, 5.0, draws=200)
    return [r1, r2]


def _blockade():
    t0 = time.perf_counter()
    D = SIDEBAND_RATIO
    G = np.linspace(1.0, 5.0, 401)
    t = probability_arrays(D, D, D, 1.0, 1.0, G, which="rwa")["t_ab"]
    t3 = float(probability_arrays(D, D, D, 1.0, 1.0, 3.0, which="rwa")["t_ab"])
    r1 = _result("BLOCK.t_at_3kappa", t3, 0.11, 0.0, "le", t0, 1.0)
    t0 = time.perf_counter()
    step = float(np.max(np.diff(t)))
    r2 = _result("BLOCK.strictly_decreasing", step, 0.0, 0.0, "lt", t0, 1.0)
    return [r1, r2]


def _chain():
    t0 = time.perf_counter()
    p = circuit_qed()
    P = np.geomspace(1e-18, 1e-9, 200)
    beta = real_beta_s(laser_amplitude(P, p.gamma_b, p.delta_m, p.hbar), math.pi, p.gamma_b)
    composed = avg_phonon_number(beta, p.chi * beta, p.gamma_b, p.delta_m)
    direct = phonon_number_from_power(P, math.pi, p.delta_m, p.gamma_b, p.delta_m, p.chi, p.hbar)
    rel = float(np.max(np.abs(composed - direct) / np.abs(direct)))
    return [_result("CHAIN.phonon_consistency", rel, 0.0, 1e-12, "abs", t0, 1.0, points=P.size)]


CRITERIA = (
    ("T2", _table2), ("NA", _single_photon), ("CRIT", _critical), ("ORACLE", _oracle),
    ("FIG6", _fig6), ("FIG7", _fig7), ("FIG5B", _fig5b), ("FIG5A", _fig5a),
    ("DECOMP", _decomposition), ("APPD", _appendix_d), ("STAB", _stability),
    ("BLOCK", _blockade), ("CHAIN", _chain),
)


def run_acceptance(filter=None):
    """Run every criterion whose id starts with ``filter`` (all if ``None``)."""
    results = []
    for prefix, fn in CRITERIA:
        if filter and not (prefix.startswith(filter) or filter.startswith(prefix)):
            continue
        t0 = time.perf_counter()
        try:
            batch = fn()
        except Exception as exc:  # failures are results
            batch = [AcceptanceResult(prefix, math.nan, math.nan, math.nan, False,
                                      (time.perf_counter() - t0) * 1e3, "error",
                                      {"error": f"{type(exc).__name__}: {exc}"})]
        results.extend(r for r in batch if not filter or r.criterion_id.startswith(filter))
    return results


def summary(results):
    return {
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
        "results": [r.as_dict() for r in results],
    }
