"""Parameter model, unit conventions and validation.

All frequencies and rates are angular (rad/s) internally. Values quoted as
f/2pi in Hz are converted once, at ingestion, with :func:`from_hz_over_2pi`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

from .exceptions import InvalidParameters

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

HBAR_SI = 1.054571817e-34
TWO_PI = 2.0 * math.pi

UNITS = ("angular", "hz_over_2pi")


def from_hz_over_2pi(value):
    """Convert a frequency given as f/2pi (Hz) to angular frequency (rad/s)."""
    return TWO_PI * value


@dataclass(frozen=True)
class SystemParams:
    """Detunings, rates and couplings of the two-mode system, all in rad/s.

    ``delta_c`` is the bare optical detuning and ``delta_m`` the mechanical
    detuning in the frame rotating with the respective drive. ``hbar`` is a
    parameter so that normalised runs (``hbar=1``) are possible.
    """

    delta_c: float
    delta_m: float
    kappa_a: float
    gamma_b: float
    chi: float = 0.0
    g0: float = 0.0
    hbar: float = HBAR_SI

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class Drive:
    """A monochromatic drive: power (W), phase (rad) and angular frequency.

    The phase is stored reduced to ``[0, 2pi)``.
    """

    power: float
    phase: float = 0.0
    frequency: float = 1.0

    def __post_init__(self):
        if math.isfinite(self.phase):
            object.__setattr__(self, "phase", normalize_phase(self.phase))


@dataclass(frozen=True)
class TaylorCoupling:
    """Expansion of the cavity frequency in the mirror displacement."""

    x_zpf: float
    domega_dx: float = 0.0
    d2omega_dx2: float = 0.0


def normalize_phase(phi: float) -> float:
    phi = math.fmod(phi, TWO_PI)
    if phi < 0.0:
        phi += TWO_PI
    # fmod of values just below a multiple of 2pi can round up to 2pi
    return 0.0 if phi >= TWO_PI else phi


def violations(params: SystemParams) -> list[tuple[str, str]]:
    """Return the list of ``(code, message)`` invariant violations."""
    found = []
    for f in fields(params):
        value = getattr(params, f.name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            found.append(("NonFinite", f"{f.name}={value!r} is not finite"))
    finite = {code for code, _ in found} == set()
    for name in ("kappa_a", "gamma_b"):
        value = getattr(params, name)
        if math.isfinite(value) and value <= 0.0:
            found.append(("NonPositiveRate", f"{name}={value!r} must be > 0"))
    if math.isfinite(params.chi) and params.chi < 0.0:
        found.append(("NegativeChi", f"chi={params.chi!r} must be >= 0"))
    if finite and params.hbar <= 0.0:
        found.append(("NonPositiveRate", f"hbar={params.hbar!r} must be > 0"))
    return found


def validate(params: SystemParams) -> SystemParams:
    """Return ``params`` itself if every invariant holds, else raise.

    Raises
    ------
    InvalidParameters
        Carrying every violation found, with codes ``NonPositiveRate``,
        ``NonFinite`` or ``NegativeChi``.
    """
    found = violations(params)
    if found:
        raise InvalidParameters(found)
    return params


def validate_drive(drive: Drive) -> Drive:
    found = []
    for name in ("power", "phase", "frequency"):
        value = getattr(drive, name)
        if not math.isfinite(value):
            found.append(("NonFinite", f"{name}={value!r} is not finite"))
    if math.isfinite(drive.power) and drive.power < 0.0:
        found.append(("NegativePower", f"power={drive.power!r} must be >= 0"))
    if math.isfinite(drive.frequency) and drive.frequency <= 0.0:
        found.append(("NonPositiveFrequency", f"frequency={drive.frequency!r} must be > 0"))
    if found:
        raise InvalidParameters(found)
    return drive


def derive_couplings(t: TaylorCoupling) -> tuple[float, float]:
    """Radiation-pressure and cross-Kerr couplings from the Taylor expansion.

    Returns ``(g0, chi)`` with ``g0 = -x_zpf * dw/dx`` and
    ``chi = x_zpf**2 * d2w/dx2``.
    """
    if not t.x_zpf > 0.0:
        raise InvalidParameters([("NonPositiveZpf", f"x_zpf={t.x_zpf!r} must be > 0")])
    g0 = -t.x_zpf * t.domega_dx
    chi = t.x_zpf * t.x_zpf * t.d2omega_dx2
    return g0, chi


def circuit_qed() -> SystemParams:
    """Circuit-QED parameter row (detunings 5.2 GHz, rates 33 MHz, chi 2.5 MHz, all /2pi).

    The optical detuning is set so that the modified detuning equals the
    mechanical one, which is how the row is used throughout.
    """
    dm = from_hz_over_2pi(5.2e9)
    return SystemParams(
        delta_c=dm,
        delta_m=dm,
        kappa_a=from_hz_over_2pi(3.3e7),
        gamma_b=from_hz_over_2pi(3.3e7),
        chi=from_hz_over_2pi(2.5e6),
    )


# -- configuration files ----------------------------------------------------

_FREQUENCY_KEYS = ("delta_c", "delta_m", "kappa_a", "gamma_b", "chi", "g0")
# optional overrides for the linearised model, same unit tag as the rest
_MODEL_KEYS = ("g_eff", "delta_c2")


@dataclass(frozen=True)
class ParamFile:
    params: SystemParams
    drives: dict[str, Drive] = field(default_factory=dict)
    model: dict[str, float] = field(default_factory=dict)
    extra: dict[str, Any] = field(default_factory=dict)


def parse_config(data: Mapping[str, Any]) -> ParamFile:
    """Build a :class:`ParamFile` from an already-parsed TOML mapping."""
    units = data.get("units", "angular")
    if units not in UNITS:
        raise InvalidParameters([("BadUnits", f"units={units!r}, expected one of {UNITS}")])
    scale = TWO_PI if units == "hz_over_2pi" else 1.0

    missing = [k for k in ("delta_c", "delta_m", "kappa_a", "gamma_b") if k not in data]
    if missing:
        raise InvalidParameters([("MissingKey", f"{k} is required") for k in missing])

    kwargs = {k: float(data[k]) * scale for k in _FREQUENCY_KEYS if k in data}
    if "hbar" in data:
        kwargs["hbar"] = float(data["hbar"])
    params = validate(SystemParams(**kwargs))

    drives = {}
    for name, table in (data.get("drive") or {}).items():
        if name not in ("a", "b"):
            raise InvalidParameters([("UnknownDrive", f"drive.{name} (expected a or b)")])
        drives[name] = validate_drive(
            Drive(
                power=float(table.get("power_w", 0.0)),
                phase=float(table.get("phase_rad", 0.0)),
                frequency=float(table.get("frequency", params.delta_m / scale)) * scale,
            )
        )

    model = {k: float(data[k]) * scale for k in _MODEL_KEYS if k in data}
    known = set(_FREQUENCY_KEYS) | set(_MODEL_KEYS) | {"units", "hbar", "drive"}
    extra = {k: v for k, v in data.items() if k not in known}
    return ParamFile(params=params, drives=drives, model=model, extra=extra)


def load_config(path) -> ParamFile:
    """Read a TOML parameter file."""
    with open(Path(path), "rb") as fh:
        data = tomllib.load(fh)
    return parse_config(data)
