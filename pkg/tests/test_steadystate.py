import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from optomech.exceptions import (
    DegenerateDenominator,
    InconsistentBoundaries,
    NoRootInBranch,
    PhaseOutOfBranch,
)
from optomech.params import Drive, SystemParams, circuit_qed
from optomech.presets import ROUNDED_HBAR
from optomech.steadystate import (
    Regime,
    alpha_real,
    avg_phonon_number,
    avg_photon_number,
    classify_regime,
    complex_beta_s,
    complex_mean_fields,
    eta_of_alpha,
    laser_amplitude,
    mean_field_cubic,
    phase_condition_phi_b,
    phi_a_rhs,
    phonon_number_from_power,
    power_for_beta,
    real_beta_s,
    regime_table,
    solve_phi_a,
    solve_phi_a_all,
    solve_steady_state,
    transient_beta,
)

QED = circuit_qed()
EXQED = QED.replace(hbar=ROUNDED_HBAR)


# -- drive amplitude and displacement ----------------------------------------

def test_laser_amplitude_examples():
    eps = laser_amplitude(3.873e-15, QED.gamma_b, QED.delta_m, ROUNDED_HBAR)
    assert eps == pytest.approx(6.84e8, rel=5e-3)
    assert laser_amplitude(0.0, 1.0, 1.0) == 0.0


def test_single_photon_drive():
    eps = laser_amplitude(8.93e-17, EXQED.kappa_a, EXQED.delta_m, EXQED.hbar)
    assert alpha_real(eps, 0.0, EXQED.kappa_a) ** 2 == pytest.approx(1.0, rel=0.01)
    assert avg_photon_number(8.93e-17, 0.0, EXQED.delta_m, EXQED.kappa_a, EXQED.hbar) == \
        pytest.approx(1.0, rel=0.01)


def test_photon_number_phase_rules():
    full = avg_photon_number(1e-16, 0.0, QED.delta_m, QED.kappa_a)
    assert avg_photon_number(1e-16, math.pi / 2, QED.delta_m, QED.kappa_a) == pytest.approx(0.0, abs=1e-15)
    assert avg_photon_number(1e-16, math.pi / 4, QED.delta_m, QED.kappa_a) == pytest.approx(full / 2)


def test_phase_condition_phi_b():
    assert phase_condition_phi_b(0.0, 1.0) == math.pi
    assert phase_condition_phi_b(0.5, 1.0) == pytest.approx(1.25 * math.pi)
    phi = phase_condition_phi_b(QED.delta_m, QED.gamma_b)
    assert phi - math.pi == pytest.approx(math.atan(315.1515), abs=1e-5)
    assert phi - math.pi == pytest.approx(1.56762, abs=1e-5)
    assert math.cos(phi) <= 0


def test_real_beta_examples():
    eps = laser_amplitude(3.873e-15, QED.gamma_b, QED.delta_m, ROUNDED_HBAR)
    assert real_beta_s(eps, math.pi, QED.gamma_b) == pytest.approx(6.6, rel=0.01)
    assert real_beta_s(0.0, math.pi, 1.0) == 0.0
    assert real_beta_s(1e9, 1.5 * math.pi - 1e-9, 1.0) == pytest.approx(0.0, abs=3.0)
    with pytest.raises(PhaseOutOfBranch):
        real_beta_s(1.0, 0.0, 1.0)


def test_beta_power_scaling():
    e1 = laser_amplitude(1e-15, QED.gamma_b, QED.delta_m)
    e2 = laser_amplitude(2e-15, QED.gamma_b, QED.delta_m)
    b1, b2 = real_beta_s(e1, math.pi, QED.gamma_b), real_beta_s(e2, math.pi, QED.gamma_b)
    assert b2 / b1 == pytest.approx(math.sqrt(2), rel=1e-14)


def test_power_for_beta_inverts():
    P = power_for_beta(6.6, math.pi, QED.delta_m, QED.gamma_b, ROUNDED_HBAR)
    assert P == pytest.approx(3.87e-15, rel=0.01)
    eps = laser_amplitude(P, QED.gamma_b, QED.delta_m, ROUNDED_HBAR)
    assert real_beta_s(eps, math.pi, QED.gamma_b) == pytest.approx(6.6, rel=1e-12)


def test_complex_beta_examples():
    assert complex_beta_s(0.0, 1.0, 1.0) == 0
    assert complex_beta_s(1.0, 1.0, 2.0) == pytest.approx((1 + 1j) / 2)
    with pytest.raises(DegenerateDenominator):
        complex_beta_s(1.0, 0.0, 0.0)


@pytest.mark.parametrize("dm,gb", [(3.2673e10, 2.0735e8), (1.0, 1.0), (0.0, 2.0), (158.0, 1.0)])
def test_complex_beta_real_branch(dm, gb):
    phi = phase_condition_phi_b(dm, gb)
    eps = 3.7
    beta = complex_beta_s(1j * eps * cmath.exp(1j * phi), dm, gb)
    assert abs(beta.imag) <= 1e-12 * abs(beta)
    assert beta.real > 0
    # the real branch formula takes the free phase, so compare magnitudes
    assert abs(beta) == pytest.approx(2 * eps / math.hypot(gb, 2 * dm), rel=1e-12)


def test_transient_fixed_point_and_initial():
    omega_b, dm, gb = 0.3 + 0.1j, 2.0, 0.5
    bs = complex_beta_s(omega_b, dm, gb)
    assert np.allclose(transient_beta(np.linspace(0, 5, 7), bs, omega_b, dm, gb), bs)
    assert transient_beta(0.0, 1 + 2j, omega_b, dm, gb) == pytest.approx(1 + 2j)


def test_transient_matches_ode():
    omega_b, dm, gb, b0 = 0.8 - 0.2j, 3.0, 0.4, 0.5 + 0.5j
    T = 20.0 / gb

    def rhs(t, y):
        b = y[0] + 1j * y[1]
        db = -(1j * dm + 0.5 * gb) * b + 1j * omega_b
        return [db.real, db.imag]

    sol = solve_ivp(rhs, (0, T), [b0.real, b0.imag], rtol=1e-10, atol=1e-12, dense_output=True)
    ts = np.linspace(0, T, 50)
    num = sol.sol(ts)[0] + 1j * sol.sol(ts)[1]
    assert np.allclose(transient_beta(ts, b0, omega_b, dm, gb), num, atol=1e-8)
    bs = complex_beta_s(omega_b, dm, gb)
    assert abs(transient_beta(T, b0, omega_b, dm, gb) - bs) <= abs(b0 - bs) * math.exp(-10) * (1 + 1e-12)


# -- optical phase -------------------------------------------------------------

def _unit():
    return SystemParams(0.0, 1.0, 1.0, 1.0)


def test_phi_a_linear_cases():
    assert solve_phi_a(_unit(), 0.5, 0.0, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert solve_phi_a(_unit(), 0.5, 0.0, 0.5) == pytest.approx(math.pi / 4, abs=1e-12)


def test_phi_a_table1_dense_grid_oracle():
    g = QED.chi * 6.6
    eps = 0.5 * QED.kappa_a
    dc0 = QED.delta_c + QED.chi * 6.6 ** 2
    phi = solve_phi_a(QED, eps, g, dc0)
    rhs = phi_a_rhs(phi, QED, eps, g, dc0)
    assert abs(math.tan(phi) - rhs) <= 1e-10 * (1 + abs(rhs)) * (1 + abs(math.tan(phi)))
    grid = np.linspace(0.0, 0.5 * math.pi, 10 ** 6, endpoint=False)
    h = np.sin(grid) - np.cos(grid) * phi_a_rhs(grid, QED, eps, g, dc0)
    idx = np.flatnonzero(np.sign(h[:-1]) != np.sign(h[1:]))
    assert idx.size >= 1
    assert grid[idx[0]] <= phi <= grid[idx[0] + 1]


def test_phi_a_residual_and_branch():
    p = SystemParams(2.0, 1.5, 1.0, 0.5)
    for eps, g in ((0.3, 0.0), (1.0, 0.7), (3.0, 1.2)):
        for phi in solve_phi_a_all(p, eps, g, 2.0):
            assert math.cos(phi) >= 0
            rhs = phi_a_rhs(phi, p, eps, g, 2.0)
            resid = math.sin(phi) - math.cos(phi) * rhs
            assert abs(resid) <= 1e-10 * (1 + abs(rhs))


def test_phi_a_prefers_first_quadrant():
    p = SystemParams(0.0, 1.0, 1.0, 1.0)
    roots = solve_phi_a_all(p, 0.5, 0.0, -0.5)
    assert roots == [pytest.approx(1.75 * math.pi)]
    assert solve_phi_a(p, 0.5, 0.0, -0.5) == pytest.approx(1.75 * math.pi)


def test_phi_a_no_root(monkeypatch):
    import optomech.steadystate as ss
    monkeypatch.setattr(ss, "solve_phi_a_all", lambda *a, **k: [])
    with pytest.raises(NoRootInBranch):
        ss.solve_phi_a(_unit(), 1.0, 0.0, 0.0)


def test_alpha_real_examples():
    assert alpha_real(0.0, 0.0, 1.0) == 0.0
    assert alpha_real(0.5, 0.0, 1.0) == 1.0
    with pytest.raises(PhaseOutOfBranch):
        alpha_real(1.0, math.pi, 1.0)


def test_eta_examples():
    assert eta_of_alpha(0.0, 1.0, 1.0, 1.0) == 0
    assert eta_of_alpha(1.0, 1.0, 0.0, 2.0) == pytest.approx(1j)
    g = QED.chi * 6.6
    eta = eta_of_alpha(1.0, g, QED.delta_m, QED.gamma_b)
    assert abs(eta) ** 2 == pytest.approx(g ** 2 / ((QED.gamma_b / 2) ** 2 + QED.delta_m ** 2), rel=1e-12)
    assert abs(eta) ** 2 == pytest.approx(1.0e-5, rel=0.01)
    with pytest.raises(DegenerateDenominator):
        eta_of_alpha(1.0, 1.0, 0.0, 0.0)


# -- mean-field cubic ------------------------------------------------------------

BISTABLE = SystemParams(3.0, 1.0, 1.0, 2.0)


def _cubic_poly(params, omega_a, g, dc0):
    # expanded independently: s^2 N^3 - 2 s dc0 N^2 + (k^2/4 + dc0^2) N - |W|^2
    s = 2 * g * g * params.delta_m / ((params.gamma_b / 2) ** 2 + params.delta_m ** 2)
    return [s * s, -2 * s * dc0, params.kappa_a ** 2 / 4 + dc0 ** 2, -abs(omega_a) ** 2]


def test_cubic_linear_cavity():
    mf = complex_mean_fields(BISTABLE, 2.0, 0.0, 3.0)
    assert mf.all_roots == (pytest.approx(4.0 / 9.25),)


def test_cubic_no_drive():
    mf = complex_mean_fields(BISTABLE, 0.0, 1.0, 3.0)
    assert mf.all_roots == (0.0,) and mf.alpha == 0 and mf.eta == 0


def test_cubic_bistable_three_roots():
    omega = math.sqrt(2.0)
    mf = complex_mean_fields(BISTABLE, omega, 1.0, 3.0)
    assert len(mf.all_roots) == 3
    assert list(mf.all_roots) == sorted(mf.all_roots)
    poly = _cubic_poly(BISTABLE, omega, 1.0, 3.0)
    for n in mf.all_roots:
        scale = sum(abs(c) * n ** (3 - i) for i, c in enumerate(poly))
        assert abs(np.polyval(poly, n)) <= 1e-9 * scale
        assert abs(mean_field_cubic(n, BISTABLE, omega, 1.0, 3.0)) <= 1e-9 * scale
    assert abs(mf.alpha) ** 2 == pytest.approx(mf.all_roots[0], rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 10), st.floats(0.0, 5), st.floats(-5, 5), st.floats(0.0, 10))
def test_cubic_roots_residual(ka, g, dc0, w):
    p = SystemParams(dc0, 1.3, ka, 0.7)
    mf = complex_mean_fields(p, w, g, dc0)
    poly = _cubic_poly(p, w, g, dc0)
    for n in mf.all_roots:
        assert n >= 0
        scale = sum(abs(c) * n ** (3 - i) for i, c in enumerate(poly)) or 1.0
        # absolute floor covers drives so weak that the residual is subnormal
        assert abs(np.polyval(poly, n)) <= 1e-9 * scale + 1e-300
    if g == 0:
        assert len(mf.all_roots) == 1


# -- phonon numbers and regimes ------------------------------------------------

def test_phonon_number_examples():
    assert avg_phonon_number(6.6, QED.chi * 6.6, QED.gamma_b, QED.delta_m) == pytest.approx(44, rel=0.01)
    assert avg_phonon_number(0.0, 0.0, 1.0, 1.0) == 0.0
    assert avg_phonon_number(208, QED.chi * 208, QED.gamma_b, QED.delta_m) == pytest.approx(4.326e4, rel=1e-3)
    nb = phonon_number_from_power(3.87e-15, math.pi, QED.delta_m, QED.gamma_b, QED.delta_m, QED.chi,
                                  ROUNDED_HBAR)
    # 44 in the table is 43.56 rounded up, and 3.87 fW is itself rounded
    assert nb == pytest.approx(44, rel=0.015)
    assert phonon_number_from_power(0.0, math.pi, 1, 1, 1, 1) == 0.0
    assert phonon_number_from_power(1e-12, 1.5 * math.pi - 1e-9, QED.delta_m, QED.gamma_b,
                                    QED.delta_m, QED.chi) == pytest.approx(0.0, abs=1e-6)


@given(st.floats(-18, -9))
def test_consistency_chain(logp):
    P = 10 ** logp
    eps = laser_amplitude(P, QED.gamma_b, QED.delta_m)
    beta = real_beta_s(eps, math.pi, QED.gamma_b)
    composed = avg_phonon_number(beta, QED.chi * beta, QED.gamma_b, QED.delta_m)
    direct = phonon_number_from_power(P, math.pi, QED.delta_m, QED.gamma_b, QED.delta_m, QED.chi)
    assert composed == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("beta,regime,power", [
    (6.6, Regime.STRONG, 3.87e-15),
    (208.0, Regime.ULTRASTRONG, 3.85e-12),
    (2080.0, Regime.ULTRASTRONG, 0.385e-9),
])
def test_classify_table2_boundaries(beta, regime, power):
    rep = classify_regime(EXQED.chi * beta, EXQED)
    assert rep.regime is regime
    assert rep.power_required[0] == pytest.approx(power, rel=0.01) or \
        rep.power_required[1] == pytest.approx(power, rel=0.01)


def test_classify_tiers():
    p = SystemParams(100.0, 100.0, 1.0, 1.0, chi=1.0)
    labels = [classify_regime(g, p).regime.label for g in (0.1, 0.5, 5.0, 10.0, 100.0, 101.0)]
    assert labels == ["Weak", "Strong", "Strong", "Ultrastrong", "Ultrastrong", "DeepStrong"]


def test_classify_inconsistent():
    with pytest.raises(InconsistentBoundaries):
        classify_regime(1.0, SystemParams(1.0, 1.0, 1.0, 1.0))


@given(st.floats(0, 1e3), st.floats(0, 1e3))
def test_classify_monotone(a, b):
    p = SystemParams(100.0, 100.0, 1.0, 1.0, chi=1.0)
    lo, hi = sorted((a, b))
    assert classify_regime(lo, p).regime <= classify_regime(hi, p).regime


def test_regime_table_intervals_contiguous():
    rows = regime_table(EXQED)
    for a, b in zip(rows, rows[1:]):
        assert a["beta"][1] == b["beta"][0]
        assert a["power_w"][1] == b["power_w"][0]
        assert a["n_b"][1] == b["n_b"][0]
    assert [r["beta"][0] for r in rows[1:]] == pytest.approx([6.6, 208, 2080])


def test_solve_steady_state_invariants():
    p = SystemParams(0.0, 3.0, 1.0, 1.0, chi=0.05, hbar=1.0)
    st_ = solve_steady_state(p, Drive(0.1, 0.0, 1.0), Drive(2.0, math.pi, 1.0))
    assert st_.n_a == pytest.approx(st_.alpha_r ** 2)
    assert st_.n_a >= 0 and st_.n_b >= 0 and st_.beta_s_real >= 0
    assert st_.g_single == pytest.approx(p.chi * st_.beta_s_real)
    assert st_.g_eff == pytest.approx(st_.g_single * st_.alpha_r)
    assert math.cos(st_.phi_a) >= 0
    d = st_.as_dict()
    assert "beta_s_re" in d and "n_b_discrepancy" in d
