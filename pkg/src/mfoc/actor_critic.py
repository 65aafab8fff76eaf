"""One-step actor-critic with eligibility traces over an RBF feature map,
run in parallel with a fixed linear gain.

Per executed transition (x, u_rl, x') with exploration drawn from
N(mu(x), Sigma_episode):

    delta = r + gamma * v(x') - v(x)      (bootstrap replaced by 0 on penalty)
    z     <- gamma * lambda_theta * z + zeta * phi(x)
    Z     <- gamma * lambda_W * Z + zeta * phi(x) (u_rl - mu(x))^T
    theta <- theta + alpha * delta * z
    W     <- W + beta * delta * Z
    zeta  <- gamma * zeta

The critic trace accumulates the features of the state whose value the TD
error corrects (the pre-transition state); accumulating the successor's
features instead feeds the bootstrap term back into itself and the value
weights diverge. The actor trace accumulates the Gaussian policy score
scaled by the exploration covariance, phi (u_rl - mu)^T, rather than the
raw score phi (u_rl - mu)^T / sigma^2: the raw score grows like 1/sigma as
the variance anneals, which turns late-training updates into an unbounded
random walk. The covariance scaling keeps update magnitudes independent of
the annealed variance (equivalently, the actor step size anneals with the
exploration variance) and is what keeps learning stable across the step
sizes the robustness sweep exercises.

Traces and zeta reset every episode; theta and W carry across episodes.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import NumericalBlowup
from .plants import CostWeights, PendulumParams, PlantModel, reward, step

WEIGHT_LIMIT = 1e8


@dataclass(frozen=True)
class BasisGrid:
    """Gaussian RBF centers with per-dimension widths."""

    centers: np.ndarray  # (N, n)
    widths: np.ndarray  # (n,)

    @property
    def N(self) -> int:
        return self.centers.shape[0]


def pendulum_basis_grid(n_per_dim: int = 11) -> BasisGrid:
    """Uniform grid over the angle band [-0.5, 0.5] x velocity band [-2, 2].

    Widths equal the grid spacing per dimension, so neighbouring bumps
    overlap at about exp(-1/2).
    """
    psis = np.linspace(-0.5, 0.5, n_per_dim)
    xis = np.linspace(-2.0, 2.0, n_per_dim)
    centers = np.array([[p, x] for p in psis for x in xis])
    widths = np.array([psis[1] - psis[0], xis[1] - xis[0]])
    return BasisGrid(centers=centers, widths=widths)


def features(x, grid: BasisGrid):
    """phi_j(x) = exp(-sum_d (x_d - c_jd)^2 / (2 w_d^2)); entries in (0, 1]."""
    x = np.asarray(x, dtype=float)
    d = (grid.centers - x) / grid.widths
    return np.exp(-0.5 * np.sum(d * d, axis=1))


def value(x, theta, grid: BasisGrid) -> float:
    return float(np.asarray(theta, dtype=float) @ features(x, grid))


def policy_mean(x, W, grid: BasisGrid):
    """mu(x; W) = W^T phi(x); the deterministic control law after training."""
    return np.asarray(W, dtype=float).T @ features(x, grid)


@dataclass
class CriticState:
    theta: np.ndarray
    trace_z: np.ndarray
    alpha: float
    lambda_theta: float

    @classmethod
    def zeros(cls, N: int, alpha: float, lambda_theta: float) -> "CriticState":
        return cls(theta=np.zeros(N), trace_z=np.zeros(N), alpha=alpha,
                   lambda_theta=lambda_theta)


@dataclass
class ActorState:
    W: np.ndarray  # (N, m)
    trace_Z: np.ndarray  # (N, m)
    beta: float
    lambda_W: float
    sigma2_initial: float
    Sigma_episode: np.ndarray  # (m, m)

    @classmethod
    def zeros(cls, N: int, m: int, beta: float, lambda_W: float,
              sigma2: float) -> "ActorState":
        return cls(W=np.zeros((N, m)), trace_Z=np.zeros((N, m)), beta=beta,
                   lambda_W=lambda_W, sigma2_initial=sigma2,
                   Sigma_episode=sigma2 * np.eye(m))


@dataclass(frozen=True)
class EpisodeResult:
    cost_J: float
    steps_taken: int
    terminated_by_penalty: bool


@dataclass(frozen=True)
class TrainSpec:
    """Everything an episode loop needs besides the plant and the gain."""

    weights: CostWeights
    Ts: float = 0.03
    T_epi: float = 3.0
    x0: tuple = (0.4, 0.0)
    gamma: float = 0.9
    lambda_theta: float = 0.99
    lambda_W: float = 0.99
    alpha: float = 0.05
    beta: float = 0.001
    sigma2: float = 0.05
    n_episodes: int = 5000
    penalty_angle: float = 0.5
    penalty_reward: float = -100.0

    @property
    def max_steps(self) -> int:
        return int(round(self.T_epi / self.Ts))


def sample_action(x, actor: ActorState, grid: BasisGrid, rng):
    """Draw u_rl ~ N(policy_mean(x), Sigma_episode); one normal per input dim."""
    mu = policy_mean(x, actor.W, grid)
    return _draw(mu, actor.Sigma_episode, rng)


def _draw(mu, Sigma, rng):
    m = mu.shape[0]
    if m == 1:
        return mu + np.sqrt(Sigma[0, 0]) * rng.standard_normal(1)
    return mu + np.linalg.cholesky(Sigma) @ rng.standard_normal(m)


def log_policy_density(u, x, actor: ActorState, grid: BasisGrid) -> float:
    u = np.atleast_1d(np.asarray(u, dtype=float))
    mu = policy_mean(x, actor.W, grid)
    diff = u - mu
    m = u.size
    Sinv = np.linalg.inv(actor.Sigma_episode)
    _, logdet = np.linalg.slogdet(actor.Sigma_episode)
    return float(-0.5 * (m * np.log(2 * np.pi) + logdet + diff @ Sinv @ diff))


def log_policy_grad(u, x, actor: ActorState, grid: BasisGrid):
    """Gradient of log N(u; W^T phi, Sigma) in W: phi(x) ((u - mu)^T Sigma^-1)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    mu = policy_mean(x, actor.W, grid)
    phi = features(x, grid)
    return np.outer(phi, np.linalg.solve(actor.Sigma_episode, u - mu))


def variance_schedule(E: int, sigma2: float, N_epi: int) -> float:
    """Geometric decay from sigma2 at E = 0 to sigma2 * 1e-4 at E = N_epi."""
    if not 0 <= E <= max(N_epi, 1):
        raise ValueError(f"episode index {E} outside [0, {N_epi}]")
    if N_epi == 0:
        return sigma2
    return sigma2 * (1e-4) ** (float(E) / float(N_epi))


def actor_critic_update(critic: CriticState, actor: ActorState, delta: float,
                        phi_value, grad_prev, zeta: float, gamma: float):
    """Trace decay-and-accumulate, then the weight updates.

    phi_value: features of the state whose value the TD error corrects.
    grad_prev: covariance-scaled policy score of the action taken there.
    The caller multiplies zeta <- gamma * zeta afterward.
    """
    critic.trace_z = gamma * critic.lambda_theta * critic.trace_z \
        + zeta * np.asarray(phi_value, float)
    actor.trace_Z = gamma * actor.lambda_W * actor.trace_Z \
        + zeta * np.asarray(grad_prev, float)
    critic.theta = critic.theta + critic.alpha * delta * critic.trace_z
    actor.W = actor.W + actor.beta * delta * actor.trace_Z
    if np.abs(critic.theta).max() > WEIGHT_LIMIT or np.abs(actor.W).max() > WEIGHT_LIMIT:
        raise NumericalBlowup("weights exceeded 1e8; learning diverged")
    return critic, actor


def run_episode(plant: PlantModel, K: Optional[np.ndarray], critic: CriticState,
                actor: ActorState, spec: TrainSpec, rng, grid: BasisGrid,
                update_actor: bool = True) -> EpisodeResult:
    """One learning episode of the composed controller u = K x + u_rl.

    Runs at most T_epi / Ts steps; crossing the penalty angle ends the
    episode after its update, with reward penalty_reward and zero bootstrap.
    The episode cost J accumulates the quadratic stage cost of every
    executed step, the penalty step included; the penalty itself is a
    learning signal, not a cost term. With update_actor False the policy
    trace accumulates zeros, so W stays fixed while the critic learns.
    """
    x = np.asarray(spec.x0, dtype=float).copy()
    critic.trace_z = np.zeros_like(critic.trace_z)
    actor.trace_Z = np.zeros_like(actor.trace_Z)
    zeta = 1.0
    phi = features(x, grid)
    J = 0.0
    steps = 0
    penalized = False
    for _ in range(spec.max_steps):
        mu = actor.W.T @ phi
        u_rl = _draw(mu, actor.Sigma_episode, rng)
        u = (K @ x + u_rl) if K is not None else u_rl
        x_new = step(plant, x, u, spec.Ts)
        r_quad = reward(x_new, u, spec.weights)
        J += -r_quad
        steps += 1
        penalized = bool(abs(x_new[0]) >= spec.penalty_angle)
        phi_new = features(x_new, grid)
        v = float(critic.theta @ phi)
        v_new = float(critic.theta @ phi_new)
        r = spec.penalty_reward if penalized else r_quad
        bootstrap = 0.0 if penalized else v_new
        delta = r + spec.gamma * bootstrap - v
        if update_actor:
            grad = np.outer(phi, u_rl - mu)  # score times Sigma_episode
        else:
            grad = np.zeros_like(actor.trace_Z)
        actor_critic_update(critic, actor, delta, phi, grad, zeta, spec.gamma)
        zeta *= spec.gamma
        if penalized:
            break
        x = x_new
        phi = phi_new
    return EpisodeResult(cost_J=J, steps_taken=steps, terminated_by_penalty=penalized)


def train(plant: PlantModel, K: Optional[np.ndarray], spec: TrainSpec, seed: int,
          grid: Optional[BasisGrid] = None, use_fast: bool = True):
    """Run n_episodes of learning, refreshing Sigma from the variance
    schedule each episode. Returns (critic, actor, cost_curve).

    theta and W start at zero. The compiled kernel handles the pendulum
    preset; the pure-python path is the reference implementation and serves
    any plant. Identical (spec, seed) on the same path gives bit-identical
    results.
    """
    grid = grid or pendulum_basis_grid()
    N = grid.N
    m = plant.m
    critic = CriticState.zeros(N, alpha=spec.alpha, lambda_theta=spec.lambda_theta)
    actor = ActorState.zeros(N, m, beta=spec.beta, lambda_W=spec.lambda_W,
                             sigma2=spec.sigma2)
    rng = np.random.default_rng(seed)
    curve: List[EpisodeResult] = []

    fast_ok = (use_fast and m == 1
               and isinstance(getattr(plant, "params", None), PendulumParams))
    if fast_ok:
        from . import _fast
        args = _fast.pack_args(plant.params, spec, grid)
        theta = critic.theta
        Wvec = actor.W[:, 0]
        kvec = np.zeros(2) if K is None else np.asarray(K, float).reshape(2)
        use_k = K is not None
        for E in range(spec.n_episodes):
            sig2 = variance_schedule(E, spec.sigma2, spec.n_episodes)
            J, steps, pen = _fast.episode(theta, Wvec, sig2, use_k,
                                          kvec[0], kvec[1], rng, *args)
            if np.abs(theta).max() > WEIGHT_LIMIT or np.abs(Wvec).max() > WEIGHT_LIMIT:
                raise NumericalBlowup(f"episode {E}: weights exceeded 1e8")
            curve.append(EpisodeResult(cost_J=J, steps_taken=steps,
                                       terminated_by_penalty=bool(pen)))
        last = max(spec.n_episodes - 1, 0)
        actor.Sigma_episode = variance_schedule(last, spec.sigma2,
                                                spec.n_episodes) * np.eye(m)
        return critic, actor, curve

    for E in range(spec.n_episodes):
        actor.Sigma_episode = variance_schedule(E, spec.sigma2,
                                                spec.n_episodes) * np.eye(m)
        try:
            res = run_episode(plant, K, critic, actor, spec, rng, grid)
        except NumericalBlowup as exc:
            raise NumericalBlowup(f"episode {E}: {exc}") from exc
        curve.append(res)
    return critic, actor, curve


def evaluate_deterministic(plant: PlantModel, K: Optional[np.ndarray],
                           W: Optional[np.ndarray], grid: Optional[BasisGrid],
                           spec: TrainSpec):
    """Deterministic rollout: u_rl = mu(x), full horizon, no termination.

    Returns (cost_J, max_abs_angle, x_final); the angle excursion and the
    final state feed the sweep's stabilization criterion.
    """
    x = np.asarray(spec.x0, dtype=float).copy()
    J = 0.0
    max_abs = 0.0
    for _ in range(spec.max_steps):
        u = np.zeros(plant.m)
        if K is not None:
            u = u + K @ x
        if W is not None:
            u = u + np.asarray(W, float).T @ features(x, grid)
        x = step(plant, x, u, spec.Ts)
        J += -reward(x, u, spec.weights)
        max_abs = max(max_abs, abs(float(x[0])))
    return J, max_abs, x
