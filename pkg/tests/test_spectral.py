import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from sskdyn.ensembles import WignerSpec, sample_wigner
from sskdyn.errors import DomainError, NumericalError
from sskdyn.spectral import (
    SpectralData,
    edge_gap_stats,
    eig_sym,
    eigvals_sym,
    fix_signs,
    rescaled_gap,
    sample_semicircle,
    semicircle_cdf,
    semicircle_pdf,
    semicircle_ppf,
    stieltjes_dm,
    stieltjes_m,
)


class TestEigSym:
    def test_exchange_matrix(self):
        sp = eig_sym(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(sp.eigenvalues, [-1.0, 1.0], atol=1e-15)

    def test_identity_sign_convention(self):
        sp = eig_sym(np.eye(5))
        assert np.all(sp.eigenvalues == 1.0)
        np.testing.assert_allclose(sp.eigenvectors, np.eye(5), atol=1e-15)

    def test_reconstruction(self, goe_small):
        sp = eig_sym(goe_small)
        V, lam = sp.eigenvectors, sp.eigenvalues
        assert np.max(np.abs(V @ np.diag(lam) @ V.T - goe_small)) <= 1e-10
        assert np.all(np.diff(lam) >= 0)
        assert np.max(np.abs(V.T @ V - np.eye(8))) <= 1e-10

    def test_sign_convention(self, goe_small):
        V = eig_sym(goe_small).eigenvectors
        for j in range(V.shape[1]):
            i = np.argmax(np.abs(V[:, j]))
            assert V[i, j] > 0

    def test_fix_signs_tie_goes_to_lowest_index(self):
        V = np.array([[-1.0, 1.0], [1.0, 1.0]]) / math.sqrt(2)
        W = fix_signs(V)
        assert W[0, 0] > 0 and W[0, 1] > 0

    def test_rejects_asymmetric(self):
        with pytest.raises(DomainError):
            eig_sym(np.array([[0.0, 1.0], [1.1, 0.0]]))

    def test_tolerance_violation_reports_worst(self, goe_small):
        with pytest.raises(NumericalError) as info:
            eig_sym(goe_small, tol_eig=1e-30)
        assert info.value.worst > 0

    def test_permutation_invariance(self):
        J = sample_wigner(WignerSpec(N=60, seed=10))
        P = np.eye(60)[np.random.default_rng(0).permutation(60)]
        np.testing.assert_allclose(eigvals_sym(P @ J @ P.T), eigvals_sym(J), atol=1e-10)

    def test_trace_identity(self):
        J = sample_wigner(WignerSpec(N=300, seed=12))
        assert abs(eig_sym(J).eigenvalues.sum() - np.trace(J)) <= 1e-9 * 300

    def test_abs_order(self):
        sp = SpectralData(np.array([-3.0, -1.0, 0.5, 1.0, 3.0]), np.eye(5))
        assert list(sp.abs_order()) == [4, 0, 3, 1, 2]
        np.testing.assert_array_equal(sp.by_abs().eigenvalues, [3.0, -3.0, 1.0, -1.0, 0.5])

    def test_semicircle_convergence(self):
        lam = eigvals_sym(sample_wigner(WignerSpec(N=2000, seed=1)))
        emp = np.arange(1, 2001) / 2000
        assert np.max(np.abs(emp - semicircle_cdf(lam))) <= 0.02


class TestSemicircle:
    def test_pdf_values(self):
        assert semicircle_pdf(0.0) == pytest.approx(1 / math.pi, rel=1e-15)
        assert semicircle_pdf(2.0) == 0.0 and semicircle_pdf(-2.0) == 0.0
        assert semicircle_pdf(3.0) == 0.0

    def test_pdf_normalized(self):
        x = np.linspace(-2, 2, 10_001)
        y = semicircle_pdf(x)
        # integrate the sqrt edge exactly by substituting x = 2 sin(u)
        u = np.linspace(-math.pi / 2, math.pi / 2, 10_001)
        z = semicircle_pdf(2 * np.sin(u)) * 2 * np.cos(u)
        total = (z.sum() - 0.5 * (z[0] + z[-1])) * (u[1] - u[0])
        assert total == pytest.approx(1.0, abs=1e-8)
        assert y.min() >= 0

    def test_cdf_matches_quadrature(self):
        for x in (-1.5, 0.0, 0.7, 1.99):
            q, _ = integrate.quad(semicircle_pdf, -2, x, epsabs=1e-13)
            assert semicircle_cdf(x) == pytest.approx(q, abs=1e-10)

    def test_ppf_inverts_cdf(self):
        u = np.array([0.0, 1e-9, 0.1, 0.5, 0.77, 1 - 1e-9, 1.0])
        np.testing.assert_allclose(semicircle_cdf(semicircle_ppf(u)), u, atol=1e-12)

    def test_samples(self):
        s = sample_semicircle(3, 50_000)
        assert np.all(np.abs(s) <= 2)
        assert np.mean(s * s) == pytest.approx(1.0, abs=0.02)
        assert np.array_equal(s[:10], sample_semicircle(3, 10))


class TestStieltjes:
    @pytest.mark.parametrize("s", [3.0, 10.0, 2.5, 2.01])
    def test_against_quadrature(self, s):
        q, _ = integrate.quad(lambda x: 1.0 / (s - x), -2, 2, weight="alg", wvar=(0.5, 0.5), epsabs=1e-14)
        assert stieltjes_m(s) == pytest.approx(q / (2 * math.pi), rel=1e-10)

    def test_known_values(self):
        assert stieltjes_m(2.0) == 1.0
        assert stieltjes_m(3.0) == pytest.approx(0.3819660113, abs=1e-10)
        assert stieltjes_m(10.0) == pytest.approx(0.1010205144, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            stieltjes_m(1.999)
        with pytest.raises(DomainError):
            stieltjes_dm(2.0)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(2.0 + 1e-9, 1e6))
    def test_self_consistency(self, s):
        m = stieltjes_m(s)
        assert abs(m * m - s * m + 1.0) <= 1e-12 * max(1.0, s * m)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(2.001, 100.0), st.floats(1e-3, 10.0))
    def test_decreasing(self, s, d):
        assert stieltjes_m(s + d) < stieltjes_m(s)

    def test_derivative(self):
        s, h = 3.0, 1e-6
        fd = (stieltjes_m(s + h) - stieltjes_m(s - h)) / (2 * h)
        assert stieltjes_dm(s) == pytest.approx(fd, rel=1e-7)

    def test_root_by_bisection_matches_inverse(self):
        # m is invertible: m(s) = y  <=>  s = y + 1/y
        for y in (0.2, 0.5, 0.9):
            s = optimize.brentq(lambda v: stieltjes_m(v) - y, 2.0, 100.0, xtol=1e-14)
            assert s == pytest.approx(y + 1 / y, rel=1e-12)


class TestEdgeGaps:
    def test_two_by_two(self):
        lam = eigvals_sym(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert rescaled_gap(lam, "bottom") == pytest.approx(2.0 * 2 ** (2 / 3))
        assert rescaled_gap(lam, "top") == pytest.approx(2.0 * 2 ** (2 / 3))

    def test_abs_top(self):
        assert rescaled_gap([-3.0, 0.0, 2.0], "abs-top") == pytest.approx(3 ** (2 / 3))

    def test_unknown_edge(self):
        with pytest.raises(DomainError):
            rescaled_gap([0.0, 1.0], "middle")

    def test_positive_and_deterministic(self):
        spec = WignerSpec(N=200, seed=4)
        g = edge_gap_stats(spec, 40)
        assert np.percentile(g, 10) > 0
        assert np.array_equal(g, edge_gap_stats(spec, 40))

    def test_parallel_matches_serial(self):
        spec = WignerSpec(N=60, seed=1)
        np.testing.assert_array_equal(edge_gap_stats(spec, 6, "top", workers=2), edge_gap_stats(spec, 6, "top"))
