import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

import histoshep as hs
from histoshep.errors import WindowViolation
from histoshep.histopoly import gram_matrix

from conftest import poly_data

EX21 = [i / 10 for i in range(11)]


def test_basis_integral_simple():
    assert hs.basis_segment_integral(0, (-1, 1), (-1, 1)) == pytest.approx(2.0, abs=1e-15)
    assert hs.basis_segment_integral(1, (-1, 1), (0, 1)) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("k", range(8))
def test_basis_integral_vs_quadrature(k):
    window, seg = (-0.7, 2.3), (-0.3, 0.7)
    T = np.polynomial.Chebyshev.basis(k, domain=window)
    ref = T.integ()(seg[1]) - T.integ()(seg[0])
    alt, _ = quad(T, *seg, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert ref == pytest.approx(alt, abs=1e-13)
    assert hs.basis_segment_integral(k, window, seg) == pytest.approx(ref, abs=1e-13)


def test_basis_integral_window_violation():
    with pytest.raises(WindowViolation):
        hs.basis_segment_integral(2, (0, 1), (0.5, 1.5))
    with pytest.raises(WindowViolation):
        hs.basis_segment_integral(2, (0, 1), (0.6, 0.5))


def test_eval_poly_examples():
    assert hs.eval_poly(hs.ScaledChebyshevPoly(0, 1, [2.5]), 17.0) == 2.5
    assert hs.eval_poly(hs.ScaledChebyshevPoly(-1, 1, [0, 1]), 0.25) == 0.25
    assert hs.eval_poly(hs.ScaledChebyshevPoly(0, 2, [0, 0, 1]), 1.5) == pytest.approx(-0.5, abs=1e-15)


def test_eval_poly_matches_numpy(rng):
    c = rng.normal(size=9)
    p = hs.ScaledChebyshevPoly(-0.3, 1.7, c)
    ref = np.polynomial.Chebyshev(c, domain=[-0.3, 1.7])
    x = rng.uniform(-1, 3, 50)  # outside the window too
    np.testing.assert_allclose(p(x), ref(x), rtol=1e-12, atol=1e-12)


def test_integrate_poly():
    assert hs.integrate_poly(hs.ScaledChebyshevPoly(0, 1, [3.0]), (0, 1)) == pytest.approx(3.0)
    assert hs.integrate_poly(hs.ScaledChebyshevPoly(-1, 1, [0, 1]), (0, 2)) == pytest.approx(2.0)


def test_integrate_random_poly_vs_quadrature(rng):
    c = rng.normal(size=6)
    p = hs.ScaledChebyshevPoly(0, 1, c)
    ref, _ = quad(p, 0.1, 0.7, epsabs=1e-14, epsrel=1e-14, limit=200)
    assert hs.integrate_poly(p, (0.1, 0.7)) == pytest.approx(ref, abs=1e-12)


def test_scaled_poly_invariants():
    with pytest.raises(WindowViolation):
        hs.ScaledChebyshevPoly(1, 1, [1.0])
    with pytest.raises(ValueError):
        hs.ScaledChebyshevPoly(0, 1, [])
    with pytest.raises(ValueError):
        hs.ScaledChebyshevPoly(0, 1, [np.nan])
    assert hs.ScaledChebyshevPoly(0, 1, [1, 2, 3]).degree == 2


def test_fit_single_segment_average():
    g = hs.build_grid([0, 1], [3.0])
    h = hs.fit_histopolant(g, [1])
    assert h.poly.coeffs.tolist() == [3.0] and h.residual == 0.0


def test_fit_linear_two_segments():
    g = hs.build_grid([0, 1, 2], [0.5, 1.5])
    h = hs.fit_histopolant(g, [1, 2])
    x = np.linspace(-1, 3, 9)
    np.testing.assert_allclose(h.poly(x), x, atol=1e-14)


def _monomial_oracle(x, mu):
    """Monomial-basis solve of the same system: sum_q a_q int x^q = mu."""
    k = len(mu)
    V = np.array([[(x[i + 1] ** (q + 1) - x[i] ** (q + 1)) / (q + 1) for q in range(k)] for i in range(k)])
    return np.polynomial.Polynomial(np.linalg.solve(V, mu))


def test_fit_matches_monomial_oracle_example():
    x = np.array(EX21)
    g = hs.build_grid(x, poly_data([0, 0, 1], x))
    h = hs.fit_histopolant(g, [5, 6, 7])
    q = _monomial_oracle(x[4:8], g.data[4:7])
    pts = np.linspace(0.4, 0.7, 13)
    np.testing.assert_allclose(h.poly(pts), q(pts), rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(h.poly(pts), pts**2, rtol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_fit_oracle_equivalence(k, seed):
    r = np.random.default_rng(seed)
    x = np.sort(r.uniform(-2, 3, k + 1))
    if np.min(np.diff(x)) < 1e-2:
        return
    mu = r.normal(size=k)
    g = hs.build_grid(x, mu)
    h = hs.fit_histopolant(g, range(1, k + 1))
    q = _monomial_oracle(x, mu)
    t = r.uniform(x[0], x[-1], 30)
    scale = max(1.0, np.max(np.abs(q(t))))
    np.testing.assert_allclose(h.poly(t), q(t), atol=1e-9 * scale)


def test_local_reproduction(rng):
    for k in range(1, 9):
        x = np.sort(rng.uniform(0, 1, k + 1))
        c = rng.normal(size=k)
        g = hs.build_grid(x, poly_data(c, x))
        h = hs.fit_histopolant(g, range(1, k + 1))
        t = rng.uniform(x[0], x[-1], 50)
        q = np.polynomial.Polynomial(c)(t)
        np.testing.assert_allclose(h.poly(t), q, rtol=1e-9, atol=1e-9 * np.max(np.abs(q)))


def test_residual_and_condition_reported(rng):
    x = np.linspace(0, 1, 9)
    g = hs.build_grid(x, rng.normal(size=8))
    h = hs.fit_histopolant(g, range(1, 9), iota=4)
    assert h.iota == 4 and h.k == 8 and h.poly.degree == 7
    assert h.residual <= 1e-10 and h.condition >= 1.0
    for i in h.segment_ids:
        assert abs(hs.integrate_poly(h.poly, g.segment(i)) - g.data[i - 1]) <= 1e-10 * max(1, abs(g.data[i - 1]))


def test_fit_rejects_unchained():
    g = hs.build_grid(EX21, np.ones(10))
    with pytest.raises(ValueError):
        hs.fit_histopolant(g, [1, 3])
    with pytest.raises(IndexError):
        hs.fit_histopolant(g, [10, 11])


def test_gram_rows_sum_over_window():
    # the rows integrate T_0 = 1 to the segment lengths
    segs = np.array([[0, 0.2], [0.2, 0.5], [0.5, 1.0]])
    G = gram_matrix(3, (0, 1), segs)
    np.testing.assert_allclose(G[:, 0], [0.2, 0.3, 0.5], atol=1e-15)
