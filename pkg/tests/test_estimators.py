import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from optomech.estimators import RegimeClassifier, ScatteringSpectrum, SteadyStateSolver
from optomech.exceptions import UnstableModel
from optomech.params import circuit_qed
from optomech.scattering import CHANNELS, probability_arrays

DELTA = 158.0


def test_scattering_spectrum_transform_matches_functional():
    est = ScatteringSpectrum(DELTA, DELTA, 1.0, 1.0, 0.7)
    w = np.linspace(DELTA - 5, DELTA + 5, 51)
    out = est.fit().transform(w[:, None])
    assert out.shape == (51, len(CHANNELS))
    ref = probability_arrays(w, DELTA, DELTA, 1.0, 1.0, 0.7)
    np.testing.assert_array_equal(out[:, CHANNELS.index("t_ab")], ref["t_ab"])
    assert list(est.get_feature_names_out()) == list(CHANNELS)


def test_scattering_spectrum_params_and_clone():
    est = ScatteringSpectrum(g_eff=0.3, which="rwa")
    assert est.get_params()["g_eff"] == 0.3
    twin = clone(est).set_params(g_eff=0.4)
    assert twin.g_eff == 0.4 and est.g_eff == 0.3


def test_scattering_spectrum_not_fitted_and_unstable():
    with pytest.raises(NotFittedError):
        ScatteringSpectrum().transform([1.0, 2.0])
    with pytest.raises(UnstableModel):
        ScatteringSpectrum(1.0, 1.0, 0.1, 0.1, 0.6).fit()
    est = ScatteringSpectrum(1.0, 1.0, 0.1, 0.1, 0.6, allow_unstable=True).fit()
    assert est.stability_["full"].verdict == "unstable"


def test_steady_state_solver_transform_column():
    p = circuit_qed()
    est = SteadyStateSolver(p.delta_c, p.delta_m, p.kappa_a, p.gamma_b, chi=p.chi,
                            power_b=3.87e-15)
    est.fit()
    assert est.steady_state_.g_eff == 0.0  # no optical drive, no mean field
    g = est.transform(np.array([[0.0], [8.93e-17]]))
    assert g.shape == (2, 1)
    assert g[0, 0] == 0.0 and g[1, 0] > 0
    with pytest.raises(NotFittedError):
        SteadyStateSolver().transform([[0.0]])


def test_regime_classifier_labels_ordered():
    p = circuit_qed()
    clf = RegimeClassifier(p.kappa_a, p.delta_m, p.chi, p.gamma_b).fit()
    tiers = clf.predict_tier([[1e-3 * p.kappa_a], [0.5 * p.delta_m]])
    assert tiers[0] < tiers[1]
    labels = clf.predict([[1e-3 * p.kappa_a]])
    assert labels[0] in clf.classes_
