import numpy as np
import pytest

from mfoc.errors import (
    Asymmetric,
    EmptyWindow,
    NumericalBlowup,
    RankDeficient,
    SingularLyapunov,
)
from mfoc.numerics import (
    is_hurwitz,
    rk4_step,
    smat,
    smat_halved,
    solve_least_squares,
    solve_lyapunov,
    svec,
    svec_quad,
    window_integrals,
)


class TestSolveLeastSquares:
    def test_identity(self):
        z, rank = solve_least_squares(np.eye(2), np.array([3.0, 4.0]))
        assert np.allclose(z, [3.0, 4.0])
        assert rank == 2

    def test_overdetermined_mean(self):
        # ((1),(1)) z = (1,3) -> z = 2, the least-squares mean
        z, rank = solve_least_squares(np.array([[1.0], [1.0]]), np.array([1.0, 3.0]))
        assert np.allclose(z, [2.0])
        assert rank == 1

    def test_rank_one_regressor_raises(self):
        G = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        with pytest.raises(RankDeficient):
            solve_least_squares(G, np.array([1.0, 2.0, 3.0]))

    def test_underdetermined_raises(self):
        with pytest.raises(RankDeficient):
            solve_least_squares(np.ones((1, 2)), np.array([1.0]))


class TestRk4Step:
    def test_constant_dynamics_fixed_point(self):
        f = lambda x, u: np.zeros_like(x)
        s = np.array([0.7, -1.2])
        assert np.array_equal(rk4_step(f, s, np.zeros(1), 0.03), s)

    def test_exponential_taylor_truncation(self):
        # RK4 on xdot = x reproduces 1 + h + h^2/2 + h^3/6 + h^4/24
        f = lambda x, u: x
        h = 0.1
        out = rk4_step(f, np.array([1.0]), np.zeros(1), h)
        taylor = 1 + h + h**2 / 2 + h**3 / 6 + h**4 / 24
        assert out[0] == pytest.approx(taylor, abs=1e-15)
        assert out[0] == pytest.approx(1.1051708333333333, abs=1e-12)

    def test_pure_input_integration(self):
        f = lambda x, u: u
        out = rk4_step(f, np.array([0.0]), np.array([2.0]), 0.5)
        assert out[0] == pytest.approx(1.0, abs=1e-15)

    def test_taylor_match_any_rate(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            lam = rng.uniform(-30.0, 30.0)
            h = rng.uniform(1e-4, 0.2)
            f = lambda x, u: lam * x
            out = rk4_step(f, np.array([1.0]), np.zeros(1), h)
            z = lam * h
            taylor = 1 + z + z**2 / 2 + z**3 / 6 + z**4 / 24
            assert out[0] == pytest.approx(taylor, rel=1e-14)

    def test_blowup_raises(self):
        f = lambda x, u: x * 1e200
        with np.errstate(over="ignore"), pytest.raises(NumericalBlowup):
            rk4_step(f, np.array([1e200]), np.zeros(1), 1.0)


class TestSvecFamily:
    def test_identity_ordering(self):
        # (M11, M12, M22) packing; the identity's off-diagonal is zero
        assert np.array_equal(svec(np.eye(2)), [1.0, 0.0, 1.0])

    def test_upper_triangle_order(self):
        M = np.array([[1.0, 2.0], [2.0, 4.0]])
        assert np.array_equal(svec(M), [1.0, 2.0, 4.0])

    def test_asymmetric_raises(self):
        with pytest.raises(Asymmetric):
            svec(np.array([[1.0, 2.0], [3.0, 4.0]]))

    def test_smat_round_trip_identity(self):
        assert np.array_equal(smat(np.array([1.0, 0.0, 1.0])), np.eye(2))

    def test_smat_bad_length(self):
        with pytest.raises(ValueError):
            smat(np.array([1.0, 2.0, 3.0, 4.0]))

    def test_svec_quad_doubles_off_diagonals(self):
        d = svec_quad(np.array([1.0, 2.0]))
        assert np.array_equal(d, [1.0, 4.0, 4.0])
        # d . svec(P) recovers x^T P x for P = identity: 1 + 0 + 4 = 5
        assert d @ svec(np.eye(2)) == pytest.approx(5.0)

    def test_quad_identity_random(self):
        # svec_quad(x) . svec(P) = x^T P x for random symmetric P, n <= 5
        rng = np.random.default_rng(3)
        for n in range(1, 6):
            for _ in range(10):
                x = rng.standard_normal(n)
                S = rng.standard_normal((n, n))
                P = 0.5 * (S + S.T)
                assert svec_quad(x) @ svec(P) == pytest.approx(x @ P @ x, abs=1e-12)

    def test_smat_halved_recovers_outer_moment(self):
        x = np.array([1.0, 2.0])
        assert np.allclose(smat_halved(svec_quad(x)), np.outer(x, x))


class TestSolveLyapunov:
    def test_scalar(self):
        P = solve_lyapunov(np.array([[-1.0]]), np.array([[2.0]]))
        assert P[0, 0] == pytest.approx(1.0, abs=1e-14)

    def test_diagonal(self):
        P = solve_lyapunov(-np.eye(2), np.diag([100.0, 1.0]))
        assert np.allclose(P, np.diag([50.0, 0.5]), atol=1e-12)

    def test_two_by_two(self):
        A = np.array([[0.0, 1.0], [-1.0, -1.0]])
        P = solve_lyapunov(A, np.eye(2))
        assert np.allclose(P, [[1.5, 0.5], [0.5, 1.0]], atol=1e-12)
        assert np.linalg.norm(A.T @ P + P @ A + np.eye(2)) < 1e-12

    def test_symmetric_and_small_residual(self):
        rng = np.random.default_rng(11)
        for n in (2, 3, 4):
            for _ in range(5):
                G = rng.standard_normal((n, n))
                A = G - (np.abs(np.linalg.eigvals(G).real).max() + 1.0) * np.eye(n)
                assert is_hurwitz(A)
                S = rng.standard_normal((n, n))
                M = S @ S.T + np.eye(n)
                P = solve_lyapunov(A, M)
                assert np.allclose(P, P.T)
                assert np.linalg.norm(A.T @ P + P @ A + M) < 1e-9 * max(
                    1.0, np.linalg.norm(M))

    def test_singular_pair_raises(self):
        # eigenvalues +-i sum to zero, making the vectorized system singular
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        with pytest.raises(SingularLyapunov):
            solve_lyapunov(A, np.eye(2))

    def test_asymmetric_constant_raises(self):
        with pytest.raises(Asymmetric):
            solve_lyapunov(-np.eye(2), np.array([[1.0, 2.0], [3.0, 4.0]]))


class TestWindowIntegrals:
    def test_constant_state(self):
        k = 11
        xs = np.tile([1.0, 0.0], (k, 1))
        us = np.zeros((k, 1))
        Ixx, Ixu, x_start, x_end = window_integrals(xs, us, 0.003)
        assert np.allclose(Ixx, [0.03, 0.0, 0.0], atol=1e-15)
        assert np.allclose(Ixu, 0.0)
        assert np.array_equal(x_start, [1.0, 0.0])
        assert np.array_equal(x_end, [1.0, 0.0])

    def test_linear_ramp(self):
        taus = np.arange(0.0, 1.0 + 1e-12, 0.001)
        xs = np.column_stack([taus, np.zeros_like(taus)])
        us = np.ones((taus.size, 1))
        Ixx, Ixu, _, _ = window_integrals(xs, us, 0.001)
        assert Ixx[0] == pytest.approx(1.0 / 3.0, abs=1e-6)
        assert np.allclose(Ixx[1:], 0.0, atol=1e-12)
        assert Ixu[0, 0] == pytest.approx(0.5, abs=1e-6)
        assert Ixu[1, 0] == pytest.approx(0.0, abs=1e-12)

    def test_single_sample_raises(self):
        with pytest.raises(EmptyWindow):
            window_integrals(np.array([[1.0, 0.0]]), np.array([[0.0]]), 0.003)

    def test_second_order_convergence(self):
        # halving the sampling step cuts the quadrature error ~4x
        def moments_error(dt):
            taus = np.arange(0.0, 1.0 + dt / 2, dt)
            xs = np.column_stack([np.sin(taus), np.cos(taus)])
            us = np.exp(-taus)[:, None]
            Ixx, Ixu, _, _ = window_integrals(xs, us, dt)
            # analytic: int sin^2 = (1 - sin1 cos1 ... ) use closed forms
            i_ss = 0.5 - np.sin(2.0) / 4.0
            i_sc = np.sin(1.0) ** 2 / 2.0
            i_cc = 0.5 + np.sin(2.0) / 4.0
            i_su = 0.5 * (1.0 - np.exp(-1.0) * (np.sin(1.0) + np.cos(1.0)))
            exact_Ixx = np.array([i_ss, 2.0 * i_sc, i_cc])
            return max(np.abs(Ixx - exact_Ixx).max(), abs(Ixu[0, 0] - i_su))

        e1 = moments_error(0.01)
        e2 = moments_error(0.005)
        assert e1 / e2 == pytest.approx(4.0, rel=0.15)


class TestIsHurwitz:
    def test_stable(self):
        assert is_hurwitz(np.array([[-1.0, 0.0], [0.0, -2.0]]))

    def test_unstable(self):
        assert not is_hurwitz(np.array([[0.0, 1.0], [19.6, -1.33]]))
