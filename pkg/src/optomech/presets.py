"""Named reproduction runs for the regime table and the spectral figures.

Each preset evaluates a fixed parameter set on one or more grids and returns
CSV/JSON text plus a summary of the features worth checking (peaks,
critical points, bound violations). Rates are in units of ``kappa_a`` (or
of ``delta_m`` where a sweep runs up to it) except for the circuit-QED
presets, which are SI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import io
from .dynamics import batch_min_real_eigenvalue, full_drift
from .exceptions import UnknownPreset
from .params import Drive, SystemParams, circuit_qed
from .scattering import CHANNELS, find_peaks, probability_arrays
from .steadystate import (
    avg_phonon_number,
    avg_photon_number,
    laser_amplitude,
    phonon_number_from_power,
    real_beta_s,
    regime_table,
)

# rounded hbar used for the circuit-QED reference numbers
ROUNDED_HBAR = 1.05e-34
# detuning-to-linewidth ratio of the sideband-resolved figures
SIDEBAND_RATIO = 158.0

PRESETS = ("table2", "fig3a", "fig3b", "fig5", "fig6", "fig7", "fig8",
           "fig9a", "fig9b", "fig10", "fig11", "appendixD")


@dataclass(frozen=True)
class AxisSpec:
    """A sampled axis; ``open=True`` drops both endpoints of the interval."""

    start: float
    stop: float
    count: int
    scale: str = "linear"
    open: bool = False

    def __post_init__(self):
        if int(self.count) < 2:
            raise ValueError(f"axis count must be >= 2, got {self.count}")
        if not self.start < self.stop:
            raise ValueError(f"axis start {self.start} must be < stop {self.stop}")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"scale must be 'linear' or 'log', got {self.scale!r}")
        if self.scale == "log" and self.start <= 0:
            raise ValueError("log axis needs start > 0")

    def values(self):
        n = int(self.count)
        if self.scale == "log":
            pts = np.geomspace(self.start, self.stop, n + 2 if self.open else n)
        else:
            pts = np.linspace(self.start, self.stop, n + 2 if self.open else n)
        return pts[1:-1] if self.open else pts


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams | None = None
    drives: tuple[Drive, Drive] | None = None
    grids: dict = field(default_factory=dict)
    preset: str | None = None
    output_path: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if self.preset is not None and self.preset not in PRESETS:
            raise UnknownPreset(self.preset)
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")


@dataclass
class PresetResult:
    name: str
    files: dict
    summary: dict

    def write(self, out_dir):
        out = Path(out_dir)
        written = [str(io.write_text(out / fname, text)) for fname, text in sorted(self.files.items())]
        written.append(str(io.write_text(out / f"{self.name}_summary.json", io.dumps(self.summary))))
        return written


# -- helpers -----------------------------------------------------------------

def _unstable_fraction(dc2, dm, ka, gb, G):
    min_re = batch_min_real_eigenvalue(full_drift(dc2, dm, ka, gb, G))
    return float(np.mean(min_re <= 0))


def _table(names, columns):
    return io.table_csv(names, zip(*columns))


def _grid(cfg: RunConfig, name, default: AxisSpec, count=None):
    axis = cfg.grids.get(name, default)
    if isinstance(axis, dict):
        axis = replace(default, **axis)
    if count is not None:
        axis = replace(axis, count=int(count))
    return axis.values()


def _output(fmt, stem, header, columns):
    if fmt == "json":
        return {f"{stem}.json": io.dumps({h: list(c) for h, c in zip(header, columns)})}
    return {f"{stem}.csv": _table(header, columns)}


def _long_output(fmt, stem, p1, p2, values, names):
    if fmt == "json":
        return {f"{stem}.json": io.dumps({names[0]: p1, names[1]: p2, "value": values})}
    return {f"{stem}.csv": io.long_csv(p1, p2, values)}


# -- presets -----------------------------------------------------------------

def _table2(cfg, count):
    params = cfg.params or circuit_qed().replace(hbar=ROUNDED_HBAR)
    rows = regime_table(params)
    header = ("regime", "beta_lo", "beta_hi", "power_lo_w", "power_hi_w", "n_b_lo", "n_b_hi")
    lines = [",".join(header)]
    for r in rows:
        vals = [*r["beta"], *r["power_w"], *r["n_b"]]
        lines.append(r["regime"] + "," + ",".join(io.fmt(v) for v in vals))
    files = {"table2.csv": "\n".join(lines) + "\n"} if cfg.format == "csv" else {"table2.json": io.dumps(rows)}
    thresholds = [{"regime": r["regime"], "beta": r["beta"][0], "power_w": r["power_w"][0],
                   "n_b": r["n_b"][0]} for r in rows[1:]]
    return files, {"thresholds": thresholds}


def _fig3a(cfg, count):
    params = cfg.params or circuit_qed().replace(hbar=ROUNDED_HBAR)
    power = _grid(cfg, "power_a", AxisSpec(0.0, 0.5e-15, 101), count)
    phase = _grid(cfg, "phi_a", AxisSpec(0.0, 0.5 * math.pi, 101, open=False), count)[:-1]
    P, F = np.meshgrid(power, phase, indexing="ij")
    n_a = avg_photon_number(P, F, params.delta_m, params.kappa_a, params.hbar)
    single = avg_photon_number(8.93e-17, 0.0, params.delta_m, params.kappa_a, params.hbar)
    files = _long_output(cfg.format, "fig3a_n_a", power, phase, n_a, ("power_a", "phi_a"))
    return files, {"n_a_at_8.93e-17W_phi0": float(single), "max_n_a": float(n_a.max())}


def _fig3b(cfg, count):
    params = cfg.params or circuit_qed().replace(hbar=ROUNDED_HBAR)
    power = _grid(cfg, "power_b", AxisSpec(0.0, 5e-15, 101), count)
    phase = _grid(cfg, "phi_b", AxisSpec(math.pi, 1.5 * math.pi, 101), count)[:-1]
    P, F = np.meshgrid(power, phase, indexing="ij")
    n_b = phonon_number_from_power(P, F, params.delta_m, params.gamma_b, params.delta_m,
                                   params.chi, params.hbar)
    files = _long_output(cfg.format, "fig3b_n_b", power, phase, n_b, ("power_b", "phi_b"))
    # lowest power reaching the strong-coupling phonon threshold at phi_b = pi
    beta_star = 0.5 * params.kappa_a / params.chi
    nb_star = avg_phonon_number(beta_star, params.chi * beta_star, params.gamma_b, params.delta_m)
    fine = np.linspace(0.0, 5e-15, 50001)
    eps = laser_amplitude(fine, params.gamma_b, params.delta_m, params.hbar)
    beta = real_beta_s(eps, math.pi, params.gamma_b)
    nb = avg_phonon_number(beta, params.chi * beta, params.gamma_b, params.delta_m)
    hit = np.flatnonzero(nb >= nb_star * (1 - 1e-12))
    p_min = float(fine[hit[0]]) if hit.size else None
    return files, {"strong_threshold_n_b": float(nb_star), "min_power_w_at_phi_pi": p_min}


def _sideband(kappa=1.0):
    return SIDEBAND_RATIO * kappa


def _fig5(cfg, count):
    D = _sideband()
    G = _grid(cfg, "g_eff", AxisSpec(D / 200, D, 200), count)
    v = probability_arrays(D, D, D, 1.0, 1.0, G)
    diff = np.abs(v["p_ab"] - v["t_ab"])
    th = v["theta_vac_a"]
    low = G <= 0.3 * D
    header = ("g_eff", "p_ab", "t_ab", "theta_vac_a")
    files = _output(cfg.format, "fig5", header, (G, v["p_ab"], v["t_ab"], th))
    theta_at_d = float(probability_arrays(D, D, D, 1.0, 1.0, D)["theta_vac_a"])
    summary = {
        "max_abs_p_minus_t": float(diff.max()),
        "theta_vac_a_at_g_eq_delta": theta_at_d,
        "theta_nondecreasing_up_to_0.3delta": bool(np.all(np.diff(th[low]) >= 0)),
        "unstable_fraction_full": _unstable_fraction(D, D, 1.0, 1.0, G),
    }
    return files, summary


FIG6_COUPLINGS = (0.1, 0.3, 0.5, 0.7, 2.0)
FIG7_DAMPINGS = (0.0, 0.02, 0.2, 0.4, 1.0, 1.4, 1.8, 4.0, 10.0)


def _spectrum_family(cfg, count, stem, label, values, make_args):
    D = _sideband()
    omega = _grid(cfg, "omega", AxisSpec(D - 5.0, D + 5.0, 2001), count)
    rows_label, rows_w, rows_t = [], [], []
    peaks = {}
    for val in values:
        t = probability_arrays(omega, *make_args(D, val), which="rwa")["t_ab"]
        pa = find_peaks(omega, t, center=D) if omega.size >= 5 else None
        peaks[io.fmt(val)] = None if pa is None else dict(pa.as_dict(), max_t=float(t.max()))
        rows_label.append(np.full(omega.size, val))
        rows_w.append(omega)
        rows_t.append(t)
    columns = (np.concatenate(rows_label), np.concatenate(rows_w), np.concatenate(rows_t))
    files = _output(cfg.format, stem, (label, "omega", "t_ab"), columns)
    return files, peaks, omega


def _fig6(cfg, count):
    files, peaks, omega = _spectrum_family(
        cfg, count, "fig6a", "g_eff", FIG6_COUPLINGS, lambda D, G: (D, D, 1.0, 1.0, G))
    D = _sideband()
    w2 = _grid(cfg, "omega_map", AxisSpec(D - 5.0, D + 5.0, 201), count)
    G2 = _grid(cfg, "g_eff", AxisSpec(0.0, 2.5, 126), count)
    t2 = probability_arrays(w2[None, :], D, D, 1.0, 1.0, G2[:, None], which="rwa")["t_ab"]
    files.update(_long_output(cfg.format, "fig6b", G2, w2, t2, ("g_eff", "omega")))
    return files, {"peaks": peaks}


def _fig7(cfg, count):
    # gamma_b = 0 has no stable dissipative steady state and is skipped
    damp = tuple(g for g in FIG7_DAMPINGS if g > 0)
    files, peaks, omega = _spectrum_family(
        cfg, count, "fig7a", "gamma_b", damp, lambda D, gb: (D, D, 1.0, gb, 0.5))
    D = _sideband()
    w2 = _grid(cfg, "omega_map", AxisSpec(D - 5.0, D + 5.0, 201), count)
    g2 = _grid(cfg, "gamma_b", AxisSpec(0.0, 4.0, 101, open=True), count)
    t2 = probability_arrays(w2[None, :], D, D, 1.0, g2[:, None], 0.5, which="rwa")["t_ab"]
    files.update(_long_output(cfg.format, "fig7b", g2, w2, t2, ("gamma_b", "omega")))
    return files, {"peaks": peaks, "skipped": ["gamma_b=0: no damping, rates must be > 0"]}


def _fig8(cfg, count):
    files, panels = {}, {}
    for tag, top in (("a", 1e-4), ("b", 1e-2)):
        g = _grid(cfg, "gamma_b", AxisSpec(0.0, top, 101, open=True), count)
        G = _grid(cfg, "g_eff", AxisSpec(0.0, top, 101, open=True), count)
        t = probability_arrays(1.0, 1.0, 1.0, g[None, :], g[None, :], G[:, None], which="rwa")["t_ab"]
        files.update(_long_output(cfg.format, f"fig8{tag}", G, g, t, ("g_eff", "gamma_b")))
        ridge = probability_arrays(1.0, 1.0, 1.0, g, g, 0.5 * g, which="rwa")["t_ab"]
        panels[tag] = {"min_t_on_g_eq_half_gamma": float(ridge.min()),
                       "max_t_on_g_eq_half_gamma": float(ridge.max())}
    return files, {"critical_line": panels}


def _fig9a(cfg, count):
    xi = _grid(cfg, "xi", AxisSpec(0.0, 1.0, 100, open=True), count)
    G = _grid(cfg, "g_eff", AxisSpec(0.0, 1.0, 100, open=True), count)
    th = probability_arrays(1.0, 1.0, 1.0, xi[None, :], xi[None, :], G[:, None], which="full")["theta_vac_a"]
    files = _long_output(cfg.format, "fig9a", G, xi, th, ("g_eff", "xi"))
    i, j = np.unravel_index(np.argmax(th), th.shape)
    summary = {"max_theta_vac_a": float(th[i, j]), "at_g_eff": float(G[i]), "at_xi": float(xi[j]),
               "unstable_fraction_full": _unstable_fraction(1.0, 1.0, xi[None, :], xi[None, :], G[:, None])}
    return files, summary


def _fig9b(cfg, count):
    D = _sideband()
    gb = _grid(cfg, "gamma_b", AxisSpec(0.0, D, 100, open=True), count)
    G = _grid(cfg, "g_eff", AxisSpec(0.0, D, 100, open=True), count)
    th = probability_arrays(D, D, D, 1.0, gb[None, :], G[:, None], which="full")["theta_vac_a"]
    files = _long_output(cfg.format, "fig9b", G, gb, th, ("g_eff", "gamma_b"))
    i, j = np.unravel_index(np.argmax(th), th.shape)
    summary = {"max_theta_vac_a": float(th[i, j]), "at_g_eff": float(G[i]), "at_gamma_b": float(gb[j]),
               "unstable_fraction_full": _unstable_fraction(D, D, 1.0, gb[None, :], G[:, None])}
    return files, summary


def decomposition_lines(xi, delta=1.0):
    """Dissipative-equilibrium lines used for the decomposition check.

    Returns ``{label: (g_eff array, probability dict, stable mask)}`` for
    ``G = kappa_a``, ``G = 0.2 delta`` and ``G = 0.5 delta``.
    """
    xi = np.asarray(xi, dtype=float)
    lines = {"g=kappa": xi, "g=0.2delta": np.full_like(xi, 0.2 * delta),
             "g=0.5delta": np.full_like(xi, 0.5 * delta)}
    out = {}
    for label, G in lines.items():
        v = probability_arrays(delta, delta, delta, xi, xi, G)
        stable = batch_min_real_eigenvalue(full_drift(delta, delta, xi, xi, G)) > 0
        out[label] = (G, v, stable)
    return out


def _line_table(cfg, stem, x, lines, xname):
    cols = [[], [], [], [], [], [], [], []]
    for k, (label, (G, v, stable)) in enumerate(lines.items()):
        resid = v["p_ab"] - v["theta_vac_a"] - v["t_ab"]
        for c, arr in zip(cols, (np.full(x.size, k), x, G, v["p_ab"], v["t_ab"],
                                 v["p_ab"] - v["theta_vac_a"], resid, stable.astype(float))):
            c.append(arr)
    header = ("line", xname, "g_eff", "p_ab", "t_ab", "p_minus_theta", "residual", "stable")
    return _output(cfg.format, stem, header, [np.concatenate(c) for c in cols])


def _line_summary(lines):
    out = {}
    for label, (G, v, stable) in lines.items():
        resid = np.abs(v["p_ab"] - v["theta_vac_a"] - v["t_ab"])
        out[label] = {
            "max_abs_residual": float(resid.max()),
            "max_abs_residual_stable": float(resid[stable].max()) if stable.any() else None,
            "unstable_points": int((~stable).sum()),
        }
    return out


def _fig10(cfg, count):
    xi = _grid(cfg, "xi", AxisSpec(0.0, 1.0, 100, open=True), count)
    lines = decomposition_lines(xi)
    files = _line_table(cfg, "fig10", xi, lines, "xi")
    summary = _line_summary(lines)
    summary["overall_max_abs_residual"] = max(s["max_abs_residual"] for s in summary.values())
    return files, {"lines": summary}


def _fig11(cfg, count):
    D = _sideband()
    gb = _grid(cfg, "gamma_b", AxisSpec(0.0, D, 100, open=True), count)
    lines = {}
    for label, Gv in (("g=kappa", 1.0), ("g=7kappa", 7.0), ("g=0.2delta", 0.2 * D)):
        G = np.full_like(gb, Gv)
        v = probability_arrays(D, D, D, 1.0, gb, G)
        stable = batch_min_real_eigenvalue(full_drift(D, D, 1.0, gb, G)) > 0
        lines[label] = (G, v, stable)
    files = _line_table(cfg, "fig11", gb, lines, "gamma_b")
    return files, {"lines": _line_summary(lines)}


def _appendix_d(cfg, count):
    xi = _grid(cfg, "xi", AxisSpec(0.0, 1.0, 100, open=True), count)
    G = _grid(cfg, "g_eff", AxisSpec(0.0, 1.0, 100, open=True), count)
    v = probability_arrays(1.0, 1.0, 1.0, xi[None, :], xi[None, :], G[:, None], which="full")
    excess = v["sigma_ab"] - v["theta_vac_a"]
    corrected = v["p_ab"] - v["theta_vac_a"]
    files = _long_output(cfg.format, "appendixD_sigma_minus_theta", G, xi, excess, ("g_eff", "xi"))
    i, j = np.unravel_index(np.argmax(excess), excess.shape)
    line = probability_arrays(1.0, 1.0, 1.0, xi, xi, 0.5, which="full")
    k = int(np.argmax(line["sigma_ab"] - line["theta_vac_a"]))
    summary = {
        "max_sigma_minus_theta": float(excess[i, j]),
        "at_g_eff": float(G[i]),
        "at_xi": float(xi[j]),
        "max_p_minus_theta": float(corrected.max()),
        "violations": [] if excess[i, j] <= 1 else ["sigma_ab - theta_vac_a exceeds 1"],
        "line_g_half_delta": {
            "max_sigma_minus_theta": float((line["sigma_ab"] - line["theta_vac_a"])[k]),
            "at_xi": float(xi[k]),
            "max_p_minus_theta": float((line["p_ab"] - line["theta_vac_a"]).max()),
        },
    }
    return files, summary


_RUNNERS = {
    "table2": _table2, "fig3a": _fig3a, "fig3b": _fig3b, "fig5": _fig5, "fig6": _fig6,
    "fig7": _fig7, "fig8": _fig8, "fig9a": _fig9a, "fig9b": _fig9b, "fig10": _fig10,
    "fig11": _fig11, "appendixD": _appendix_d,
}


def run_preset(name, overrides=None, out_dir=None) -> PresetResult:
    """Run a named preset.

    ``overrides`` may be a :class:`RunConfig` or a mapping with keys
    ``count`` (applied to every axis), ``grids``, ``params`` and ``format``.
    Output files are written only when ``out_dir`` is given, after all
    computation has finished.
    """
    if name not in _RUNNERS:
        raise UnknownPreset(name)
    overrides = overrides or {}
    count = None
    if isinstance(overrides, RunConfig):
        cfg = replace(overrides, preset=name)
    else:
        count = overrides.get("count")
        grids = {k: (AxisSpec(**v) if isinstance(v, dict) and "start" in v else v)
                 for k, v in (overrides.get("grids") or {}).items()}
        cfg = RunConfig(params=overrides.get("params"), grids=grids, preset=name,
                        output_path=overrides.get("output_path"),
                        format=overrides.get("format", "csv"))
    files, summary = _RUNNERS[name](cfg, count)
    summary = {"preset": name, "files": sorted(files), **summary}
    summary.setdefault("violations", [])
    result = PresetResult(name=name, files=files, summary=summary)
    target = out_dir or cfg.output_path
    if target is not None:
        result.write(target)
    return result


__all__ = ["AxisSpec", "RunConfig", "PresetResult", "PRESETS", "run_preset", "CHANNELS"]
