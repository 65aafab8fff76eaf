"""Continuous-time plants: the inverted pendulum, generic linear systems,
RK4 stepping with angle wrap, and quadratic stage cost bookkeeping."""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .numerics import rk4_step


@dataclass(frozen=True)
class PendulumParams:
    """Physical constants of the pendulum on a fixed fulcrum.

    eta is the friction coefficient exactly as it appears in the dynamics
    (no unit conversion applied).
    """

    L: float = 0.5
    M: float = 0.15
    g: float = 9.8
    eta: float = 0.05

    def __post_init__(self):
        # g = 0 is allowed: the zero-gravity limit is a damped double
        # integrator, useful as a degenerate test plant
        if self.L <= 0 or self.M <= 0 or self.g < 0 or self.eta < 0:
            raise ValueError(f"invalid pendulum parameters: {self}")


@dataclass(frozen=True)
class CostWeights:
    """Quadratic stage-cost weights; Q must be PSD and R PD."""

    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)
        if np.abs(Q - Q.T).max() > 1e-12 or np.abs(R - R.T).max() > 1e-12:
            raise ValueError("Q and R must be symmetric")
        if np.linalg.eigvalsh(Q).min() < -1e-12:
            raise ValueError("Q must be positive semi-definite")
        if np.linalg.eigvalsh(R).min() <= 0:
            raise ValueError("R must be positive definite")


@dataclass(frozen=True)
class PlantModel:
    """Continuous-time dynamics x' = f(x, u) with optional state wrap.

    The origin must be an equilibrium: dynamics(0, 0) = 0. params carries
    the physical description the plant was built from, when there is one.
    """

    n: int
    m: int
    dynamics: Callable[[np.ndarray, np.ndarray], np.ndarray]
    wrap: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "plant"
    params: object = None


def pendulum_dynamics(x, u, p: PendulumParams):
    """(psi, xi) -> (xi, (g/L) sin psi - eta/(M L^2) xi + u/(M L^2))."""
    psi, xi = float(x[0]), float(x[1])
    u0 = float(np.asarray(u).reshape(-1)[0])
    ml2 = p.M * p.L * p.L
    return np.array([xi, (p.g / p.L) * np.sin(psi) - (p.eta / ml2) * xi + u0 / ml2])


def linearize_pendulum(p: PendulumParams):
    """Analytic Jacobian of the pendulum at the upright origin.

    Oracle use only; the learning algorithms never see (A, B).
    """
    ml2 = p.M * p.L * p.L
    A = np.array([[0.0, 1.0], [p.g / p.L, -p.eta / ml2]])
    B = np.array([[0.0], [1.0 / ml2]])
    return A, B


def wrap_angle(x):
    """Wrap the first coordinate into [-pi, pi]; the rest pass through."""
    out = np.array(x, dtype=float)
    out[0] = np.arctan2(np.sin(out[0]), np.cos(out[0]))
    return out


def make_pendulum_plant(p: Optional[PendulumParams] = None) -> PlantModel:
    p = p or PendulumParams()
    return PlantModel(
        n=2,
        m=1,
        dynamics=lambda x, u: pendulum_dynamics(x, u, p),
        wrap=wrap_angle,
        name="pendulum",
        params=p,
    )


def make_linear_plant(A, B) -> PlantModel:
    """x' = A x + B u, for exercising the gain learner on a truly linear plant."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    return PlantModel(
        n=A.shape[0],
        m=B.shape[1],
        dynamics=lambda x, u: A @ np.asarray(x, float) + B @ np.atleast_1d(np.asarray(u, float)),
        wrap=None,
        name="linear",
    )


def step(plant: PlantModel, x, u, Ts):
    """One zero-order-hold RK4 step, then the plant's wrap rule."""
    out = rk4_step(plant.dynamics, x, u, Ts)
    if plant.wrap is not None:
        out = plant.wrap(out)
    return out


def reward(x_next, u, w: CostWeights):
    """Negated quadratic stage cost -(x'^T Q x' + u^T R u); always <= 0."""
    x_next = np.asarray(x_next, dtype=float)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    return -float(x_next @ w.Q @ x_next + u @ w.R @ u)
