"""Offline gain learning from sampled trajectory data.

Data collection excites the plant through a stabilizing initial gain plus a
sum-of-sinusoids probing signal, reduces the trajectory to per-window moment
integrals, and a least-squares policy iteration extracts the quadratic value
matrix and the improved gain simultaneously, without ever identifying (A, B).
A model-based Kleinman iteration (Lyapunov solve + gain update) serves as the
ground-truth oracle on plants whose linearization is known.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .errors import NotConverged, NotHurwitz, NumericalBlowup
from .numerics import (
    is_hurwitz,
    smat,
    smat_halved,
    solve_least_squares,
    solve_lyapunov,
    svec,
    svec_quad,
    window_integrals,
)
from .plants import CostWeights, PlantModel


class ExplorationSignal:
    """nu(t) = amplitude * sum_i sin(omega_i t), omega_i ~ U[-bound, bound].

    Frequencies are drawn once per seed and then fixed for all t, so the
    signal is deterministic in (t, seed). |nu| <= amplitude * n_terms.
    """

    def __init__(self, seed: int, n_terms: int = 100, freq_bound: float = 500.0,
                 amplitude: float = 0.5):
        rng = np.random.default_rng(seed)
        self.omegas = rng.uniform(-freq_bound, freq_bound, n_terms)
        self.amplitude = amplitude

    def __call__(self, t: float) -> float:
        return self.amplitude * float(np.sin(self.omegas * t).sum())


@lru_cache(maxsize=64)
def _cached_signal(seed: int) -> ExplorationSignal:
    return ExplorationSignal(seed)


def exploration_signal(t: float, seed: int) -> float:
    """Default probing signal value at time t for the given seed."""
    return _cached_signal(seed)(t)


@dataclass(frozen=True)
class DataWindowSet:
    """l windows of (x_start, x_end, Ixx, Ixu) moments plus their duration."""

    windows: List[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]
    T_dc: float
    l: int


@dataclass
class PolicyIterationReport:
    K_final: np.ndarray
    P_final: np.ndarray
    iterations: int
    P_history: List[np.ndarray]
    converged: bool


def min_windows(n: int, m: int) -> int:
    """Smallest l keeping the learning equations overdetermined."""
    return n * (n + 1) // 2 + m * n


def collect_data(plant: PlantModel, K0, seed: int, l: int, T_dc: float,
                 dt_sample: float, x0: Optional[np.ndarray] = None) -> DataWindowSet:
    """Simulate the excited closed loop and reduce it to window moments.

    The applied input is u(t) = K0 x(t) + nu(t) with nu continuous in time,
    so the RK4 stages evaluate both the feedback and the probing signal at
    the stage times rather than holding u over the step. Samples at
    dt_sample spacing are sliced into l windows of length T_dc
    (consecutive windows share their boundary sample).
    """
    K0 = np.atleast_2d(np.asarray(K0, dtype=float))
    m, n = K0.shape
    if l < min_windows(n, m):
        raise ValueError(f"l = {l} windows < {min_windows(n, m)} unknowns")
    nu = ExplorationSignal(seed)
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).copy()

    steps_per_window = int(round(T_dc / dt_sample))
    if abs(steps_per_window * dt_sample - T_dc) > 1e-9 * T_dc:
        raise ValueError("T_dc must be an integer multiple of dt_sample")
    total_steps = l * steps_per_window

    def f_cl(xv, t):
        u = K0 @ xv + nu(t)
        return plant.dynamics(xv, u)

    xs = np.empty((total_steps + 1, n))
    us = np.empty((total_steps + 1, m))
    xs[0] = x
    us[0] = K0 @ x + nu(0.0)
    dt = dt_sample
    for k in range(total_steps):
        t = k * dt
        k1 = f_cl(x, t)
        k2 = f_cl(x + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = f_cl(x + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = f_cl(x + dt * k3, t + dt)
        x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise NumericalBlowup(f"collection diverged at t = {t + dt:.4f}")
        xs[k + 1] = x
        us[k + 1] = K0 @ x + nu(t + dt)

    windows = []
    for w in range(l):
        lo = w * steps_per_window
        hi = (w + 1) * steps_per_window + 1
        Ixx, Ixu, x_start, x_end = window_integrals(xs[lo:hi], us[lo:hi], dt)
        windows.append((x_start, x_end, Ixx, Ixu))
    return DataWindowSet(windows=windows, T_dc=T_dc, l=l)


def assemble_learning_equations(data: DataWindowSet, K_i, w: CostWeights):
    """One least-squares row per window over the unknown (svec(P), vec(K_next)).

    Row structure, with q = n(n+1)/2 value unknowns first:
      P block:   svec_quad(x_end) - svec_quad(x_start)
      K block:   2 R (Ixu^T - K_i Mxx), flattened row-major, where Mxx is the
                 x x^T moment recovered from Ixx
      rhs:       -Ixx . svec(Q + K_i^T R K_i)
    Everything is an exact linear function of the stored moments, so the same
    data serves every iteration.
    """
    K_i = np.atleast_2d(np.asarray(K_i, dtype=float))
    m, n = K_i.shape
    QK = w.Q + K_i.T @ w.R @ K_i
    sQK = svec(QK)
    rows = []
    rhs = []
    for x_start, x_end, Ixx, Ixu in data.windows:
        pblk = svec_quad(x_end) - svec_quad(x_start)
        Mxx = smat_halved(Ixx)
        kblk = 2.0 * (w.R @ (Ixu.T - K_i @ Mxx))
        rows.append(np.concatenate([pblk, kblk.reshape(-1)]))
        rhs.append(-float(Ixx @ sQK))
    return np.array(rows), np.array(rhs)


def policy_iteration(data: DataWindowSet, K0, w: CostWeights, eps: float,
                     max_iter: int = 50) -> PolicyIterationReport:
    """Alternate learning-equation assembly and least squares until the
    value matrix stops moving (Frobenius norm < eps)."""
    K = np.atleast_2d(np.asarray(K0, dtype=float))
    m, n = K.shape
    q = n * (n + 1) // 2
    P_prev = None
    history: List[np.ndarray] = []
    for i in range(max_iter):
        G, rhs = assemble_learning_equations(data, K, w)
        z, _ = solve_least_squares(G, rhs)
        # smat is symmetric by construction, which is the (P + P^T)/2 of the
        # triangle parametrization.
        P = smat(z[:q])
        K = z[q:].reshape(m, n)
        history.append(P)
        if P_prev is not None and np.linalg.norm(P - P_prev, "fro") < eps:
            return PolicyIterationReport(K_final=K, P_final=P, iterations=i + 1,
                                         P_history=history, converged=True)
        P_prev = P
    raise NotConverged(f"policy iteration did not converge in {max_iter} iterations")


def kleinman_iteration(A, B, w: CostWeights, K0, eps: float, max_iter: int = 100,
                       return_history: bool = False):
    """Model-based policy iteration: Lyapunov solve for P under the current
    gain, then K <- -R^-1 B^T P, until ||P_i - P_{i-1}||_F < eps.

    The P_i sequence is monotone nonincreasing (PSD order) from a
    stabilizing K0; this is the oracle all data-driven results are tested
    against.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    K = np.atleast_2d(np.asarray(K0, dtype=float))
    P_prev = None
    history = []
    for _ in range(max_iter):
        A_cl = A + B @ K
        if not is_hurwitz(A_cl):
            raise NotHurwitz("closed loop lost stability during the iteration")
        P = solve_lyapunov(A_cl, w.Q + K.T @ w.R @ K)
        history.append(P)
        K = -np.linalg.solve(w.R, B.T @ P)
        if P_prev is not None and np.linalg.norm(P - P_prev, "fro") < eps:
            if return_history:
                return K, P, history
            return K, P
        P_prev = P
    raise NotConverged(f"Kleinman iteration did not converge in {max_iter} iterations")
