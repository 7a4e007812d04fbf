"""scikit-learn style wrappers around the functional API.

The estimators carry physical parameters as constructor arguments, so they
support ``get_params``/``set_params``, cloning and grid search. ``fit``
validates those parameters and precomputes models; it ignores ``y`` and,
for the stateless solvers, ``X`` as well.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_frequencies
from .dynamics import build_full, build_rwa, eigen_stability
from .exceptions import UnstableModel
from .params import HBAR_SI, Drive, SystemParams, validate
from .scattering import CHANNELS, _which, probability_arrays
from .steadystate import Regime, classify_regime, solve_steady_state


class ScatteringSpectrum(TransformerMixin, BaseEstimator):
    """Map probe frequencies to the seven scattering channels.

    Parameters
    ----------
    delta_c2, delta_m : float
        Modified optical and mechanical detunings (rad/s).
    kappa_a, gamma_b : float
        Optical and mechanical decay rates (rad/s).
    g_eff : float
        Effective linearised coupling (rad/s).
    which : {"both", "full", "rwa"}
        Models to evaluate; channels of the other model are NaN.
    allow_unstable : bool
        Skip the stability gate in ``fit``.

    Attributes
    ----------
    stability_ : dict
        :class:`~optomech.dynamics.StabilityReport` per evaluated model.
    """

    def __init__(self, delta_c2=1.0, delta_m=1.0, kappa_a=1.0, gamma_b=1.0, g_eff=0.0,
                 which="both", allow_unstable=False):
        self.delta_c2 = delta_c2
        self.delta_m = delta_m
        self.kappa_a = kappa_a
        self.gamma_b = gamma_b
        self.g_eff = g_eff
        self.which = which
        self.allow_unstable = allow_unstable

    def _args(self):
        return (self.delta_c2, self.delta_m, self.kappa_a, self.gamma_b, self.g_eff)

    def fit(self, X=None, y=None):
        which = _which(self.which)
        builders = {"full": build_full, "rwa": build_rwa}
        kinds = ("full", "rwa") if which == "both" else (which,)
        self.stability_ = {k: eigen_stability(builders[k](*self._args())) for k in kinds}
        bad = [k for k, r in self.stability_.items() if not r.stable]
        if bad and not self.allow_unstable:
            raise UnstableModel(f"model(s) {bad} not stable")
        self.which_ = which
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "stability_")
        omega = check_frequencies(X)
        vals = probability_arrays(omega, *self._args(), which=self.which_)
        return np.column_stack([vals[k] for k in CHANNELS])

    def get_feature_names_out(self, input_features=None):
        return np.asarray(CHANNELS, dtype=object)


class SteadyStateSolver(BaseEstimator):
    """Steady state for fixed system parameters and drives.

    After ``fit`` the result is in ``steady_state_``; ``transform`` returns
    the effective couplings for a column of optical drive powers, which is
    the quantity usually swept.
    """

    def __init__(self, delta_c=1.0, delta_m=1.0, kappa_a=1.0, gamma_b=1.0, chi=0.0, g0=0.0,
                 hbar=HBAR_SI, power_a=0.0, phase_a=0.0, frequency_a=None,
                 power_b=0.0, phase_b=np.pi, frequency_b=None):
        self.delta_c = delta_c
        self.delta_m = delta_m
        self.kappa_a = kappa_a
        self.gamma_b = gamma_b
        self.chi = chi
        self.g0 = g0
        self.hbar = hbar
        self.power_a = power_a
        self.phase_a = phase_a
        self.frequency_a = frequency_a
        self.power_b = power_b
        self.phase_b = phase_b
        self.frequency_b = frequency_b

    def _system(self):
        return validate(SystemParams(
            delta_c=float(self.delta_c), delta_m=float(self.delta_m), kappa_a=float(self.kappa_a),
            gamma_b=float(self.gamma_b), chi=float(self.chi), g0=float(self.g0),
            hbar=float(self.hbar)))

    def _drive(self, power, phase, frequency):
        return Drive(power=float(power), phase=float(phase),
                     frequency=float(self.delta_m if frequency is None else frequency))

    def fit(self, X=None, y=None):
        self.params_ = self._system()
        self.steady_state_ = solve_steady_state(
            self.params_,
            self._drive(self.power_a, self.phase_a, self.frequency_a),
            self._drive(self.power_b, self.phase_b, self.frequency_b))
        return self

    def transform(self, X):
        """Effective coupling for each optical drive power in ``X``."""
        check_is_fitted(self, "steady_state_")
        powers = check_frequencies(X, name="power_a")
        drive_b = self._drive(self.power_b, self.phase_b, self.frequency_b)
        out = np.empty(powers.size)
        for i, p in enumerate(powers):
            st = solve_steady_state(self.params_, self._drive(p, self.phase_a, self.frequency_a), drive_b)
            out[i] = st.g_eff
        return out[:, None]


class RegimeClassifier(ClassifierMixin, BaseEstimator):
    """Label effective couplings with their interaction regime."""

    def __init__(self, kappa_a=1.0, delta_m=1.0, chi=0.0, gamma_b=1.0, hbar=HBAR_SI):
        self.kappa_a = kappa_a
        self.delta_m = delta_m
        self.chi = chi
        self.gamma_b = gamma_b
        self.hbar = hbar

    def fit(self, X=None, y=None):
        self.params_ = validate(SystemParams(
            delta_c=float(self.delta_m), delta_m=float(self.delta_m), kappa_a=float(self.kappa_a),
            gamma_b=float(self.gamma_b), chi=float(self.chi), hbar=float(self.hbar)))
        # raises early when the thresholds are out of order
        self.boundaries_ = classify_regime(0.0, self.params_).boundaries
        self.classes_ = np.array([r.label for r in Regime], dtype=object)
        return self

    def predict(self, X):
        check_is_fitted(self, "boundaries_")
        g = check_frequencies(X, name="g_eff")
        return np.array([classify_regime(v, self.params_).regime.label for v in g], dtype=object)

    def predict_tier(self, X):
        check_is_fitted(self, "boundaries_")
        g = check_frequencies(X, name="g_eff")
        return np.array([int(classify_regime(v, self.params_).regime) for v in g])
