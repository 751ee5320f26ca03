import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import neumann_inverse, random_economy
from outage_io.errors import (
    DimensionMismatch,
    NegativeEntry,
    NotProductive,
    PerturbationExceedsOutput,
    ZeroOutputWithFlows,
)
from outage_io.mrio import (
    MrioTable,
    allocation_matrix,
    build_technical_coefficients,
    ghosh_output,
    ghosh_system,
    inoperability_system,
    leontief_delta,
    leontief_inverse,
    productiveness_check,
    spectral_radius_bounds,
)

A2 = np.array([[0.2, 0.3], [0.4, 0.1]])
X2 = np.array([105.0, 80.0])
F2 = np.array([60.0, 30.0])
V2 = np.array([42.0, 48.0])


def rel_err(a, b):
    return np.abs(np.asarray(a) - np.asarray(b)).max() / max(np.abs(b).max(), 1e-300)


class TestTechnicalCoefficients:
    def test_hand_division(self):
        T = np.array([[21.0, 24.0], [42.0, 8.0]])
        A = build_technical_coefficients(T, X2)
        np.testing.assert_allclose(A, A2, rtol=0, atol=1e-15)
        # recompute transactions from the coefficients
        np.testing.assert_allclose(A @ np.diag(X2), T, rtol=1e-15)

    def test_empty_economy(self):
        A = build_technical_coefficients(np.zeros((2, 2)), [1.0, 1.0])
        assert not A.any()

    def test_zero_output_with_flows(self):
        with pytest.raises(ZeroOutputWithFlows):
            build_technical_coefficients([[5, 0], [0, 0]], [0, 10])

    def test_zero_output_without_flows_gives_zero_column(self):
        A = build_technical_coefficients([[5, 0], [0, 0]], [10, 0])
        assert not A[:, 1].any()


class TestProductiveness:
    def test_fixture_passes(self):
        r = productiveness_check(A2)
        assert r.passed and r.converged
        assert r.max_col_sum == pytest.approx(0.6, abs=1e-15)
        # Perron root of [[.2,.3],[.4,.1]] is (0.3 + sqrt(0.01 + 0.48)) / 2
        assert r.spectral_radius == pytest.approx((0.3 + np.sqrt(0.49)) / 2, abs=1e-6)

    def test_zero_matrix(self):
        r = productiveness_check(np.zeros((3, 3)))
        assert r.passed and r.spectral_radius == 0.0

    def test_unit_root_fails(self):
        assert not productiveness_check([[1.0]]).passed

    def test_negative_entry(self):
        with pytest.raises(NegativeEntry):
            productiveness_check([[0.1, -0.1], [0.0, 0.1]])

    def test_cyclic_matrix_converges(self):
        # period-2 permutation structure defeats an unshifted power iteration
        P = np.array([[0.0, 0.5], [0.5, 0.0]])
        lo, hi, _, converged = spectral_radius_bounds(P)
        assert converged and lo <= 0.5 <= hi and hi - lo < 1e-6

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_bounds_bracket_eigenvalue(self, seed):
        A, *_ = random_economy(np.random.default_rng(seed), max_col_sum=1.3)
        lo, hi, _, converged = spectral_radius_bounds(A)
        rho = np.abs(np.linalg.eigvals(A)).max()
        assert lo - 1e-9 <= rho <= hi + 1e-9


class TestLeontief:
    def test_fixture_against_neumann(self):
        L = leontief_inverse(A2)
        oracle = neumann_inverse(A2, rho_bound=0.7, tol=1e-14)
        np.testing.assert_allclose(L.matrix, oracle, atol=1e-8)
        np.testing.assert_allclose(L.matrix, [[1.5, 0.5], [2 / 3, 4 / 3]], atol=1e-12)
        assert L.residual() < 1e-10

    def test_identity_case(self):
        np.testing.assert_array_equal(leontief_inverse(np.zeros((3, 3))).matrix, np.eye(3))

    def test_not_productive(self):
        with pytest.raises(NotProductive):
            leontief_inverse([[0.6, 0.5], [0.5, 0.6]])

    def test_delta_fixture(self):
        L = leontief_inverse(A2)
        np.testing.assert_allclose(leontief_delta(L, [6.0, 0.0]), [9.0, 4.0], atol=1e-12)
        assert not leontief_delta(L, [0.0, 0.0]).any()
        np.testing.assert_allclose(leontief_delta(L, F2), X2, rtol=1e-12)

    def test_delta_dimension(self):
        with pytest.raises(DimensionMismatch):
            leontief_delta(leontief_inverse(A2), [1.0, 2.0, 3.0])

    def test_matrix_is_read_only(self):
        L = leontief_inverse(A2)
        with pytest.raises(ValueError):
            L.matrix[0, 0] = 3.0

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(-5, 5))
    def test_linearity(self, seed, a, b):
        rng = np.random.default_rng(seed)
        A, F, x, v = random_economy(rng)
        n = A.shape[0]
        L = leontief_inverse(A)
        d1, d2 = rng.random(n), rng.random(n)
        lhs = leontief_delta(L, a * d1 + b * d2)
        rhs = a * leontief_delta(L, d1) + b * leontief_delta(L, d2)
        scale = max(np.abs(rhs).max(), np.abs(leontief_delta(L, d1)).max() * (abs(a) + abs(b)), 1e-300)
        assert np.abs(lhs - rhs).max() <= 1e-10 * scale

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_neumann_equivalence(self, seed):
        A, *_ = random_economy(np.random.default_rng(seed), max_col_sum=0.9)
        L = leontief_inverse(A)
        assert np.abs(L.matrix - neumann_inverse(A, 0.9)).max() < 1e-8
        assert (L.matrix >= -1e-15).all()


class TestGhosh:
    def test_fixture(self):
        G = ghosh_system(A2, X2)
        np.testing.assert_allclose(G.B, [[0.2, 0.3 * 80 / 105], [0.4 * 105 / 80, 0.1]], atol=1e-15)
        np.testing.assert_allclose(G.B[0, 1], 0.22857, atol=1e-5)
        np.testing.assert_allclose(G.B[1, 0], 0.525, atol=1e-15)
        L = leontief_inverse(A2).matrix
        oracle = np.diag(1 / X2) @ L @ np.diag(X2)
        np.testing.assert_allclose(G.G, oracle, atol=1e-10)
        np.testing.assert_allclose(G.G, [[1.5, 0.380952], [0.875, 1.33333]], atol=1e-5)

    def test_zero(self):
        G = ghosh_system(np.zeros((2, 2)), X2)
        assert not G.B.any()
        np.testing.assert_array_equal(G.G, np.eye(2))

    def test_uniform_output_gives_A(self):
        A = np.array([[0.1, 0.2, 0.0], [0.3, 0.1, 0.1], [0.05, 0.0, 0.2]])
        np.testing.assert_array_equal(ghosh_system(A, np.full(3, 7.0)).B, A)

    def test_output_fixture(self):
        G = ghosh_system(A2, X2)
        np.testing.assert_allclose(ghosh_output(V2, G), X2, rtol=1e-12)
        assert not ghosh_output([0.0, 0.0], G).any()
        # explicit summation oracle for v G
        v = np.array([4.2, 0.0])
        oracle = [sum(v[i] * G.G[i, j] for i in range(2)) for j in range(2)]
        np.testing.assert_allclose(ghosh_output(v, G), oracle, rtol=1e-12)
        np.testing.assert_allclose(ghosh_output(v, G), [6.3, 1.6], rtol=1e-12)

    def test_output_dimension(self):
        with pytest.raises(DimensionMismatch):
            ghosh_output([1.0], ghosh_system(A2, X2))

    def test_zero_output_sector_excluded(self):
        A = np.array([[0.2, 0.0, 0.3], [0.0, 0.0, 0.0], [0.4, 0.0, 0.1]])
        x = np.array([105.0, 0.0, 80.0])
        B = allocation_matrix(A, x)
        assert not B[1].any() and not B[:, 1].any()
        np.testing.assert_allclose(B[np.ix_([0, 2], [0, 2])], ghosh_system(A2, X2).B)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_similarity_identity(self, seed):
        A, F, x, v = random_economy(np.random.default_rng(seed))
        G = ghosh_system(A, x).G
        S = np.diag(1 / x) @ leontief_inverse(A).matrix @ np.diag(x)
        assert rel_err(G, S) < 1e-10
        assert (G >= -1e-12 * np.abs(G).max()).all()

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_conservation(self, seed):
        A, F, x, v = random_economy(np.random.default_rng(seed))
        assert rel_err(leontief_delta(leontief_inverse(A), F), x) < 1e-8
        assert rel_err(ghosh_output(v, ghosh_system(A, x)), x) < 1e-8


class TestInoperability:
    def test_fixture(self):
        s = inoperability_system(A2, X2, [6.0, 3.0])
        np.testing.assert_allclose(s.c_star, [6 / 105, 0.0375], atol=1e-15)
        np.testing.assert_allclose(s.c_star, [0.05714, 0.0375], atol=1e-5)
        np.testing.assert_allclose(s.q, [0.1, 0.1], atol=1e-12)
        np.testing.assert_allclose(s.lost_output, [10.5, 8.0], atol=1e-10)
        np.testing.assert_allclose(s.lost_output, leontief_delta(leontief_inverse(A2), [6.0, 3.0]), atol=1e-10)
        np.testing.assert_allclose(s.A_star, ghosh_system(A2, X2).B)

    def test_zero_shock(self):
        assert not inoperability_system(A2, X2, [0.0, 0.0]).q.any()

    def test_exceeds_output(self):
        with pytest.raises(PerturbationExceedsOutput):
            inoperability_system(A2, X2, [X2[0] * 10, 0.0])

    def test_negative_perturbation(self):
        with pytest.raises(NegativeEntry):
            inoperability_system(A2, X2, [-1.0, 0.0])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_iim_leontief_identity(self, seed):
        rng = np.random.default_rng(seed)
        A, F, x, v = random_economy(rng)
        dx = x * rng.random(x.size) * 0.5
        s = inoperability_system(A, x, dx)
        Ldx = leontief_delta(leontief_inverse(A), dx)
        assert rel_err(s.lost_output, Ldx) < 1e-10
        assert (s.q >= -1e-15).all()


class TestMrioTable:
    def test_immutable(self, two_sector):
        with pytest.raises(ValueError):
            two_sector.A[0, 0] = 0.5
        with pytest.raises(AttributeError):
            two_sector.x = np.ones(2)

    def test_residuals_zero_on_fixture(self, two_sector):
        assert two_sector.consistency_residual() == 0.0
        assert two_sector.value_added_residual() < 1e-15

    def test_zero_output_with_flows_rejected(self):
        labels = (("R", "a", "a"), ("R", "b", "b"))
        with pytest.raises(ZeroOutputWithFlows):
            MrioTable(labels, A2, F2, [105.0, 0.0], V2)

    def test_zero_output_flagged(self):
        labels = (("R", "a", "a"), ("R", "b", "b"))
        t = MrioTable(labels, [[0.2, 0.0], [0.0, 0.0]], [84.0, 0.0], [105.0, 0.0], [84.0, 0.0])
        assert t.zero_output.tolist() == [False, True]
        assert not t.ghosh.B[1].any()

    def test_cached_factorisations_shared_across_threads(self, two_region):
        from concurrent.futures import ThreadPoolExecutor

        L = two_region.leontief
        rng = np.random.default_rng(1)
        shocks = [rng.random(two_region.n) for _ in range(32)]
        with ThreadPoolExecutor(8) as pool:
            par = list(pool.map(L.solve, shocks))
        for s, r in zip(shocks, par):
            np.testing.assert_array_equal(r, L.solve(s))
