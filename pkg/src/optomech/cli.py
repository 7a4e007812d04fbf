"""Command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 physics error
(unstable or singular model, no admissible root), 4 acceptance failure.
``stability`` additionally returns 2 for unstable and 3 for marginal.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io
from .acceptance import run_acceptance, summary
from .dynamics import build_full, build_rwa, eigen_stability
from .exceptions import InvalidParameters, OptomechError, PhysicsError, UnknownPreset
from .params import Drive, load_config
from .presets import PRESETS, AxisSpec, run_preset
from .scattering import CHANNELS, probability_arrays, sweep_spectrum
from .steadystate import classify_regime, regime_table, solve_steady_state

EXIT_OK, EXIT_USAGE, EXIT_PHYSICS, EXIT_MARGINAL, EXIT_ACCEPTANCE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text, out=None):
    if out:
        io.write_text(out, text)
    else:
        sys.stdout.write(text)


def _flat(record, prefix=""):
    lines = []
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            lines.extend(_flat(value, name + "."))
        elif isinstance(value, (list, tuple)):
            lines.append(f"{name}=" + ",".join(_scalar(v) for v in value))
        else:
            lines.append(f"{name}={_scalar(value)}")
    return lines


def _scalar(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_scalar(x) for x in v) + "]"
    return io.fmt(v)


def _jobs(args):
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get("OPTOMECH_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise UsageError(f"OPTOMECH_JOBS={env!r} is not an integer") from exc
    return 1


def _config(args):
    if not args.config:
        raise UsageError("--config is required")
    try:
        return load_config(args.config)
    except FileNotFoundError as exc:
        raise UsageError(f"config file not found: {args.config}") from exc


def _drives(pf):
    dm = pf.params.delta_m
    a = pf.drives.get("a", Drive(power=0.0, phase=0.0, frequency=dm))
    b = pf.drives.get("b", Drive(power=0.0, phase=np.pi, frequency=dm))
    return a, b


def _model_inputs(pf):
    """``(delta_c2, g_eff)`` from explicit keys, else from the steady state."""
    model = dict(pf.model)
    if "g_eff" not in model or "delta_c2" not in model:
        if pf.drives:
            st = solve_steady_state(pf.params, *_drives(pf))
            model.setdefault("g_eff", st.g_eff)
            model.setdefault("delta_c2", st.delta_c2)
        model.setdefault("g_eff", 0.0)
        model.setdefault("delta_c2", pf.params.delta_c)
    return model["delta_c2"], model["g_eff"]


# -- subcommands ---------------------------------------------------------------

def cmd_steady(args):
    pf = _config(args)
    st = solve_steady_state(pf.params, *_drives(pf))
    report = classify_regime(st.g_eff, pf.params, omega_lb=_drives(pf)[1].frequency, alpha_r=st.alpha_r)
    record = {"steady": st.as_dict(), "regime": report.as_dict()}
    if args.json or args.format == "json":
        _emit(io.dumps(record), args.out)
    else:
        _emit("\n".join(_flat(io.jsonable(record))) + "\n", args.out)
    return EXIT_OK


def cmd_stability(args):
    pf = _config(args)
    dc2, G = _model_inputs(pf)
    p = pf.params
    kinds = ("full", "rwa") if args.model == "both" else (args.model,)
    builders = {"full": build_full, "rwa": build_rwa}
    reports = {k: eigen_stability(builders[k](dc2, p.delta_m, p.kappa_a, p.gamma_b, G)) for k in kinds}
    record = {k: r.as_dict() for k, r in reports.items()}
    record["g_eff"], record["delta_c2"] = G, dc2
    verdicts = [r.verdict for r in reports.values()]
    record["verdict"] = "unstable" if "unstable" in verdicts else ("marginal" if "marginal" in verdicts else "stable")
    if args.format == "json":
        _emit(io.dumps(record), args.out)
    else:
        _emit("\n".join(_flat(io.jsonable(record))) + "\n", args.out)
    return {"stable": EXIT_OK, "unstable": EXIT_PHYSICS, "marginal": EXIT_MARGINAL}[record["verdict"]]


def _axis(text, name):
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise UsageError(f"{name} must be NAME:START:STOP:COUNT[:log], got {text!r}")
    try:
        axis = AxisSpec(float(parts[1]), float(parts[2]), int(parts[3]),
                        scale="log" if len(parts) == 5 and parts[4] == "log" else "linear")
    except ValueError as exc:
        raise UsageError(f"{name}: {exc}") from exc
    return parts[0], axis


def cmd_spectrum(args):
    pf = _config(args)
    dc2, G = _model_inputs(pf)
    p = pf.params
    start = p.delta_m - 5 * p.kappa_a if args.start is None else args.start
    stop = p.delta_m + 5 * p.kappa_a if args.stop is None else args.stop
    try:
        grid = AxisSpec(start, stop, args.count).values()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    spec = sweep_spectrum(p, G, grid, which=args.which, delta_c2=dc2,
                          allow_unstable=args.allow_unstable, jobs=_jobs(args))
    if args.format == "json":
        text = io.dumps({"omega": spec.omega, **spec.values, "params": spec.params_snapshot,
                         "stability": spec.stability})
    else:
        text = io.spectrum_csv(spec)
    _emit(text, args.out)
    return EXIT_OK


SWEEP_NAMES = ("omega", "g_eff", "kappa_a", "gamma_b", "xi", "delta_c2", "delta_m")


def cmd_sweep2d(args):
    pf = _config(args)
    dc2, G = _model_inputs(pf)
    p = pf.params
    base = {"omega": p.delta_m if args.omega is None else args.omega, "g_eff": G,
            "kappa_a": p.kappa_a, "gamma_b": p.gamma_b, "delta_c2": dc2, "delta_m": p.delta_m}
    (n1, a1), (n2, a2) = _axis(args.param1, "--param1"), _axis(args.param2, "--param2")
    for n in (n1, n2):
        if n not in SWEEP_NAMES:
            raise UsageError(f"unknown sweep parameter {n!r}; choose from {SWEEP_NAMES}")
    if n1 == n2:
        raise UsageError("--param1 and --param2 must differ")
    v1, v2 = a1.values(), a2.values()
    grid = dict(base)
    for n, v in ((n1, v1[:, None]), (n2, v2[None, :])):
        if n == "xi":
            grid["kappa_a"] = grid["gamma_b"] = v
        else:
            grid[n] = v
    which = "rwa" if args.channel in ("t_ab", "t_ba") else "full"
    vals = probability_arrays(grid["omega"], grid["delta_c2"], grid["delta_m"], grid["kappa_a"],
                              grid["gamma_b"], grid["g_eff"], which=which)
    z = np.broadcast_to(vals[args.channel], (v1.size, v2.size))
    if args.format == "json":
        text = io.dumps({"param1": n1, "param2": n2, "values1": v1, "values2": v2,
                         "channel": args.channel, "value": z})
    else:
        text = io.long_csv(v1, v2, z)
    _emit(text, args.out)
    return EXIT_OK


def cmd_regimes(args):
    pf = _config(args)
    rows = regime_table(pf.params)
    record = {"regimes": rows}
    if "g_eff" in pf.model or pf.drives:
        _, G = _model_inputs(pf)
        record["classification"] = classify_regime(G, pf.params).as_dict()
    if args.format == "json":
        _emit(io.dumps(record), args.out)
    else:
        header = "regime,beta_lo,beta_hi,power_lo_w,power_hi_w,n_b_lo,n_b_hi\n"
        body = "".join(r["regime"] + "," + ",".join(io.fmt(v) for v in (*r["beta"], *r["power_w"], *r["n_b"]))
                       + "\n" for r in rows)
        _emit(header + body, args.out)
    return EXIT_OK


def cmd_reproduce(args):
    overrides = {"format": args.format}
    if args.count is not None:
        overrides["count"] = args.count
    result = run_preset(args.preset, overrides, out_dir=args.out)
    sys.stdout.write(io.dumps(result.summary))
    return EXIT_OK


def cmd_acceptance(args):
    results = run_acceptance(args.filter)
    for r in results:
        sys.stdout.write(r.line() + "\n")
    report = summary(results)
    if args.out:
        io.write_text(args.out, io.dumps(report))
    else:
        sys.stdout.write(json.dumps({"passed": report["passed"], "failed": report["failed"]}) + "\n")
    return EXIT_ACCEPTANCE if report["failed"] else EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="optomech", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, fmt=True):
        p.add_argument("--config", help="TOML parameter file")
        p.add_argument("--out", help="output file (default: stdout)")
        if fmt:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--allow-unstable", action="store_true")
        p.add_argument("--jobs", type=int, default=None, help="worker threads (env OPTOMECH_JOBS)")
        return p

    p = common(sub.add_parser("steady", help="steady state and regime"))
    p.add_argument("--json", action="store_true", help="single JSON object instead of key=value lines")
    p.set_defaults(func=cmd_steady)

    p = common(sub.add_parser("stability", help="Routh-Hurwitz and eigenvalue stability"))
    p.add_argument("--model", choices=("full", "rwa", "both"), default="both")
    p.set_defaults(func=cmd_stability)

    p = common(sub.add_parser("spectrum", help="scattering probabilities over a probe grid"))
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--count", type=int, default=2001)
    p.add_argument("--which", choices=("full", "rwa", "both"), default="both")
    p.set_defaults(func=cmd_spectrum)

    p = common(sub.add_parser("sweep2d", help="one channel on a two-parameter grid"))
    p.add_argument("--param1", required=True, help="NAME:START:STOP:COUNT[:log]")
    p.add_argument("--param2", required=True, help="NAME:START:STOP:COUNT[:log]")
    p.add_argument("--channel", choices=CHANNELS, default="t_ab")
    p.add_argument("--omega", type=float, help="fixed probe frequency (default: delta_m)")
    p.set_defaults(func=cmd_sweep2d)

    p = common(sub.add_parser("regimes", help="coupling regime table"))
    p.set_defaults(func=cmd_regimes)

    p = common(sub.add_parser("reproduce", help="run a table/figure preset"))
    p.add_argument("preset", choices=PRESETS)
    p.add_argument("--count", type=int, help="override every axis count")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("acceptance", help="run the acceptance suite")
    p.add_argument("--filter", help="criterion id prefix")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_acceptance)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    # several physics errors are also ValueErrors, so they go first
    except PhysicsError as exc:
        sys.stderr.write(f"optomech: {type(exc).__name__}: {exc}\n")
        return EXIT_PHYSICS
    except (UsageError, InvalidParameters, UnknownPreset, ValueError) as exc:
        sys.stderr.write(f"optomech: {exc}\n")
        return EXIT_USAGE
    except OptomechError as exc:
        sys.stderr.write(f"optomech: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"optomech: I/O error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
