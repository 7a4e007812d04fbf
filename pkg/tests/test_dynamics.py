import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optomech.dynamics import (
    ModelKind,
    build_full,
    build_rwa,
    char_poly,
    eigen_stability,
    eigenvalues,
    faddeev_leverrier,
    routh_hurwitz,
    stability_polynomial,
)
from optomech.exceptions import NonPositiveRate, WrongDegree

DELTA = 158.0


def test_full_entries():
    m = build_full(2.0, 3.0, 0.5, 0.25, 0.7)
    K = m.drift
    assert m.kind is ModelKind.FULL and m.dim == 4
    assert K[0, 1] == -0.7j
    assert K[2, 3] == 0.7j
    assert K[0, 2] == 0 and K[2, 0] == 0
    assert K[0, 0] == 2.0j + 0.25
    assert K[3, 3] == -3.0j + 0.125
    np.testing.assert_allclose(m.damping, np.sqrt([0.5, 0.25, 0.5, 0.25]))


def test_full_zero_coupling_block_decouples():
    m = build_full(2.0, 3.0, 0.5, 0.25, 0.0)
    K = m.drift
    assert np.count_nonzero(K - np.diag(np.diag(K))) == 0
    expected = np.sort_complex(np.array([2j + 0.25, 3j + 0.125, -2j + 0.25, -3j + 0.125]))
    np.testing.assert_allclose(np.sort_complex(eigenvalues(m)), expected, atol=1e-14)


def test_full_swap_symmetry_symmetric_params():
    K = build_full(DELTA, DELTA, 1.0, 1.0, 0.5).drift
    perm = np.eye(4)[[1, 0, 3, 2]]
    np.testing.assert_array_equal(perm @ K @ perm.T, K)


def test_rwa_entries():
    m = build_rwa(2.0, 3.0, 0.5, 0.25, 0.7)
    np.testing.assert_array_equal(m.drift, [[2j + 0.25, -0.7j], [-0.7j, 3j + 0.125]])
    np.testing.assert_allclose(m.damping, np.sqrt([0.5, 0.25]))
    assert m.kind is ModelKind.RWA
    assert np.count_nonzero(build_rwa(2.0, 3.0, 0.5, 0.25, 0.0).drift - np.diag([2j + 0.25, 3j + 0.125])) == 0


def test_rates_must_be_positive():
    with pytest.raises(NonPositiveRate):
        build_full(1.0, 1.0, 0.0, 1.0, 0.1)
    with pytest.raises(NonPositiveRate):
        build_rwa(1.0, 1.0, 1.0, -1.0, 0.1)


def test_faddeev_leverrier_matches_numpy_poly():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    np.testing.assert_allclose(faddeev_leverrier(A), np.poly(A), atol=1e-10)


def test_char_poly_decoupled_expansion():
    m = build_full(2.0, 3.0, 0.5, 0.25, 0.0)
    lam = np.array([2j + 0.25, 3j + 0.125, -2j + 0.25, -3j + 0.125])
    # roots of det(lambda I + K) are the negated drift eigenvalues
    np.testing.assert_allclose(char_poly(m), np.poly(-lam).real, rtol=1e-12, atol=1e-12)


def test_char_poly_rwa_trace_det():
    m = build_rwa(2.0, 3.0, 0.5, 0.25, 0.7)
    M = m.drift
    np.testing.assert_allclose(char_poly(m), [1, np.trace(M), np.linalg.det(M)], rtol=1e-12)


@given(st.floats(1e-2, 1e2), st.floats(1e-2, 1e2))
def test_char_poly_rwa_symmetric_vieta(G, xi):
    m = build_rwa(DELTA, DELTA, xi, xi, G)
    e1 = 1j * (DELTA - G) + xi / 2
    e2 = 1j * (DELTA + G) + xi / 2
    c = char_poly(m)
    np.testing.assert_allclose(c[1], e1 + e2, rtol=1e-12)
    np.testing.assert_allclose(c[2], e1 * e2, rtol=1e-12)


def test_stability_polynomial_rwa_is_real_product():
    m = build_rwa(2.0, 3.0, 0.5, 0.25, 0.7)
    c = char_poly(m)
    np.testing.assert_allclose(stability_polynomial(m), np.convolve(c, np.conj(c)).real)
    assert stability_polynomial(m).size == 5


def test_routh_hurwitz_examples():
    rh = routh_hurwitz([1, 4, 6, 4, 1])
    assert rh.passed and not rh.marginal
    assert rh.margins == (4.0, 20.0, 64.0, 1.0)
    bad = routh_hurwitz([1, 4, 6, 4, -1])
    assert not bad.passed
    assert bad.margins[3] == -1.0
    assert routh_hurwitz([1, 3, 2]).passed
    assert not routh_hurwitz([1, -3, 2]).passed


def test_routh_hurwitz_wrong_degree():
    with pytest.raises(WrongDegree):
        routh_hurwitz([1, 2, 3, 4])


def test_routh_hurwitz_marginal_on_imaginary_axis():
    # (l^2 + 1)(l + 1)^2 has a root pair on the imaginary axis
    rh = routh_hurwitz(np.convolve([1, 0, 1], [1, 2, 1]))
    assert rh.marginal


def test_symmetric_table1_half_kappa_stable():
    for build in (build_full, build_rwa):
        rep = eigen_stability(build(DELTA, DELTA, 1.0, 1.0, 0.5))
        assert rep.verdict == "stable" and rep.agree


def test_rwa_symmetric_eigenvalues_analytic():
    rep = eigen_stability(build_rwa(DELTA, DELTA, 1.0, 1.0, 0.5))
    expected = [1j * (DELTA - 0.5) + 0.5, 1j * (DELTA + 0.5) + 0.5]
    np.testing.assert_allclose(rep.eigenvalues, expected, rtol=1e-12)
    np.testing.assert_allclose(min(z.real for z in rep.eigenvalues), 0.5, rtol=1e-12)


@given(st.floats(0.0, 0.49 * DELTA), st.floats(0.01, 100.0))
def test_full_equal_rates_real_parts(G, xi):
    ev = eigenvalues(build_full(DELTA, DELTA, xi, xi, G))
    # equal rates shift a coupled-oscillator core by xi/2; below G = DELTA/2
    # that core has a purely imaginary spectrum
    np.testing.assert_allclose(ev.real, xi / 2, atol=1e-9 * (DELTA + G + xi))


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.01, 10), st.floats(0.01, 10),
       st.floats(0, 10))
def test_full_spectrum_conjugate_closed(dc, dm, ka, gb, G):
    K = build_full(dc, dm, ka, gb, G).drift
    scale = np.abs(K).max()
    c = faddeev_leverrier(-K / scale)
    assert np.abs(c.imag).max() <= 1e-9 * (1 + np.abs(c.real).max())


log_rate = st.floats(-3, 3).map(lambda e: 10.0 ** e)


@settings(max_examples=300, deadline=None)
@given(log_rate, log_rate, st.floats(0.1, 2.0), st.floats(0, 1.5), st.booleans())
def test_routh_hurwitz_agrees_with_eigen(ka, gb, dc_ratio, g_ratio, rwa):
    build = build_rwa if rwa else build_full
    rep = eigen_stability(build(dc_ratio, 1.0, ka, gb, g_ratio))
    if not rep.marginal:
        assert rep.agree


def test_full_unstable_beyond_half_delta():
    rep = eigen_stability(build_full(1.0, 1.0, 0.01, 0.01, 0.6))
    assert rep.verdict == "unstable" and rep.agree


def test_report_as_dict():
    d = eigen_stability(build_rwa(1.0, 1.0, 0.5, 0.5, 0.1)).as_dict()
    assert d["kind"] == "rwa" and d["verdict"] == "stable"
    assert len(d["coefficients"]) == 5 and len(d["eigenvalues"]) == 2
