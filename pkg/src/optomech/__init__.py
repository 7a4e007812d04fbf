"""Optomechanics with cross-Kerr-enhanced coupling: steady states, stability and scattering."""
from .dynamics import (
    FluctuationModel,
    ModelKind,
    StabilityReport,
    build_full,
    build_rwa,
    char_poly,
    eigen_stability,
    routh_hurwitz,
)
from .exceptions import (
    InvalidParameters,
    OptomechError,
    PhysicsError,
    SingularAtProbe,
    UnknownPreset,
    UnstableModel,
)
from .params import Drive, SystemParams, TaylorCoupling, circuit_qed, derive_couplings, validate
from .scattering import (
    PeakAnalysis,
    ProbabilitySet,
    Spectrum,
    analytic_x_symmetric,
    peak_analysis,
    probabilities,
    scatter_full,
    scatter_rwa,
    sweep_spectrum,
)
from .steadystate import Regime, RegimeReport, SteadyState, classify_regime, solve_steady_state

__version__ = "0.1.0"
