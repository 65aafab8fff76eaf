"""Dense linear-algebra and integration primitives shared by all layers.

Everything here is a pure function of its arguments; no shared state.
"""

import numpy as np

from .errors import (
    Asymmetric,
    EmptyWindow,
    NumericalBlowup,
    RankDeficient,
    SingularLyapunov,
)

# Rank tolerance relative to the largest singular value. The learning-equation
# regressor can be poorly conditioned with short windows.
RCOND = 1e-8

SYM_TOL = 1e-10


def solve_least_squares(regressor, rhs):
    """Minimize ||regressor @ z - rhs||_2, returning (z, effective_rank).

    Raises RankDeficient when the effective rank (at RCOND relative
    tolerance) is below the number of unknowns.
    """
    regressor = np.asarray(regressor, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if regressor.shape[0] < regressor.shape[1]:
        raise RankDeficient(
            f"underdetermined system: {regressor.shape[0]} rows for "
            f"{regressor.shape[1]} unknowns"
        )
    z, _, rank, _ = np.linalg.lstsq(regressor, rhs, rcond=RCOND)
    if rank < regressor.shape[1]:
        raise RankDeficient(
            f"regressor rank {rank} < {regressor.shape[1]} unknowns "
            "(insufficient excitation)"
        )
    return z, int(rank)


def rk4_step(dynamics, state, inp, dt):
    """Classical fourth-order Runge-Kutta step with the input held constant.

    x' = x + dt/6 (k1 + 2 k2 + 2 k3 + k4). Local error O(dt^5).
    """
    x = np.asarray(state, dtype=float)
    k1 = np.asarray(dynamics(x, inp), dtype=float)
    k2 = np.asarray(dynamics(x + 0.5 * dt * k1, inp), dtype=float)
    k3 = np.asarray(dynamics(x + 0.5 * dt * k2, inp), dtype=float)
    k4 = np.asarray(dynamics(x + dt * k3, inp), dtype=float)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NumericalBlowup("non-finite state after RK4 step")
    return out


def _check_symmetric(M, what):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise Asymmetric(f"{what} must be square, got shape {M.shape}")
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(M - M.T).max() > SYM_TOL * scale:
        raise Asymmetric(f"{what} is not symmetric within {SYM_TOL}")
    return M


def svec(M):
    """Stack the upper triangle of a symmetric matrix row by row.

    Ordering for n = 2: (M11, M12, M22).
    """
    M = _check_symmetric(M, "svec input")
    n = M.shape[0]
    iu = np.triu_indices(n)
    return M[iu].copy()


def smat(v):
    """Inverse of svec: rebuild the symmetric matrix from its upper triangle."""
    v = np.asarray(v, dtype=float)
    # length n(n+1)/2 -> n
    n = int((np.sqrt(8 * v.size + 1) - 1) / 2)
    if n * (n + 1) // 2 != v.size:
        raise ValueError(f"vector of length {v.size} is not a packed triangle")
    M = np.zeros((n, n))
    iu = np.triu_indices(n)
    M[iu] = v
    M.T[iu] = v
    return M


def svec_quad(x):
    """Regressor vector d with doubled off-diagonals so d . svec(P) = x^T P x."""
    x = np.asarray(x, dtype=float)
    outer = np.outer(x, x)
    d = 2.0 * outer
    d[np.diag_indices_from(d)] *= 0.5
    iu = np.triu_indices(x.size)
    return d[iu]


def smat_halved(v):
    """Rebuild a symmetric matrix from svec_quad-weighted moments.

    If v approximates the integral of svec_quad(x(t)) dt, the returned M
    approximates the integral of x x^T dt: the doubled off-diagonal entries
    are halved back.
    """
    M = smat(v)
    off = ~np.eye(M.shape[0], dtype=bool)
    M[off] *= 0.5
    return M


def solve_lyapunov(A_cl, M):
    """Solve A_cl^T P + P A_cl + M = 0 for symmetric P.

    Uses the n^2 x n^2 Kronecker vectorization; fine for the small dense
    matrices this toolkit works with.
    """
    A_cl = np.asarray(A_cl, dtype=float)
    M = _check_symmetric(M, "Lyapunov constant term")
    n = A_cl.shape[0]
    lhs = np.kron(np.eye(n), A_cl.T) + np.kron(A_cl.T, np.eye(n))
    try:
        p = np.linalg.solve(lhs, -M.flatten(order="F"))
    except np.linalg.LinAlgError as exc:
        raise SingularLyapunov(str(exc)) from exc
    P = p.reshape((n, n), order="F")
    P = 0.5 * (P + P.T)
    residual = np.linalg.norm(A_cl.T @ P + P @ A_cl + M)
    if not np.isfinite(residual) or residual > 1e-9 * max(1.0, np.linalg.norm(M)):
        raise SingularLyapunov(f"Lyapunov residual {residual:.3e} too large")
    return P


def window_integrals(xs, us, dt_sample):
    """Trapezoid moments of one data window.

    xs: (k, n) states and us: (k, m) inputs sampled at spacing dt_sample.
    Returns (Ixx, Ixu, x_start, x_end) where Ixx integrates svec_quad(x)
    and Ixu integrates x u^T. These moments suffice to evaluate the
    learning-equation integrals for any gain, so windows are computed once
    and reused across policy-iteration sweeps.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    us = np.atleast_2d(np.asarray(us, dtype=float))
    if xs.shape[0] < 2:
        raise EmptyWindow(f"window needs >= 2 samples, got {xs.shape[0]}")
    quad = np.array([svec_quad(x) for x in xs])
    Ixx = np.trapezoid(quad, dx=dt_sample, axis=0)
    cross = xs[:, :, None] * us[:, None, :]
    Ixu = np.trapezoid(cross, dx=dt_sample, axis=0)
    return Ixx, Ixu, xs[0].copy(), xs[-1].copy()


def is_hurwitz(A):
    """True when every eigenvalue has strictly negative real part."""
    return bool(np.all(np.linalg.eigvals(np.asarray(A, dtype=float)).real < 0.0))
