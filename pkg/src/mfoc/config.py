"""Experiment configuration: defaults, JSON parsing, validation, and the
bridge into plant presets and training specs."""

import json
import math
from dataclasses import asdict, dataclass, field
from typing import List

import numpy as np

from .actor_critic import BasisGrid, TrainSpec, pendulum_basis_grid
from .errors import ConfigError
from .lqr import min_windows
from .plants import (
    CostWeights,
    PendulumParams,
    PlantModel,
    linearize_pendulum,
    make_linear_plant,
    make_pendulum_plant,
)

MODES = ("K+RL", "K0+RL", "RL-alone", "K-alone", "K0-alone")
PLANTS = ("pendulum", "linear")


@dataclass
class ExperimentConfig:
    """All tunables of the study plus run identity and output location.

    Defaults reproduce the reference pendulum setup end to end.
    """

    plant: str = "pendulum"
    # gain-learning block
    Q: List[List[float]] = field(default_factory=lambda: [[100.0, 0.0], [0.0, 1.0]])
    R: List[List[float]] = field(default_factory=lambda: [[1.0]])
    K0: List[List[float]] = field(default_factory=lambda: [[-2.87, -2.00]])
    l: int = 10
    T_dc: float = 0.03
    eps: float = 1e-3
    # sampling step for collection-time integration and quadrature; T_dc/10
    # is too coarse for the gain tolerances downstream, see README
    dt_sample: float = 5e-5
    # episode block
    Ts: float = 0.03
    T_epi: float = 3.0
    x0: List[float] = field(default_factory=lambda: [0.4, 0.0])
    gamma: float = 0.9
    lambda_theta: float = 0.99
    lambda_W: float = 0.99
    alpha: float = 0.05
    beta: float = 0.001
    sigma2: float = 0.05
    n_basis: int = 121
    N_epi: int = 5000
    # run identity
    mode: str = "K+RL"
    seed: int = 0
    out_dir: str = "."

    def validate(self):
        if self.plant not in PLANTS:
            raise ConfigError(f"plant must be one of {PLANTS}, got {self.plant!r}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        Q = np.asarray(self.Q, dtype=float)
        R = np.asarray(self.R, dtype=float)
        K0 = np.asarray(self.K0, dtype=float)
        if Q.shape != (2, 2) or R.shape != (1, 1) or K0.shape != (1, 2):
            raise ConfigError("Q must be 2x2, R 1x1, K0 1x2")
        try:
            CostWeights(Q=Q, R=R)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.l < min_windows(2, 1):
            raise ConfigError(f"l = {self.l} < {min_windows(2, 1)} unknowns")
        for name in ("T_dc", "eps", "dt_sample", "Ts", "T_epi", "sigma2"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in [0, 1], got {self.gamma}")
        for name in ("lambda_theta", "lambda_W"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise ConfigError(f"{name} must be in [0, 1), got {v}")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{name} must be in (0, 1), got {v}")
        side = math.isqrt(self.n_basis)
        if side * side != self.n_basis or side < 2:
            raise ConfigError(f"n_basis must be a square >= 4, got {self.n_basis}")
        if self.N_epi < 0:
            raise ConfigError("N_epi must be >= 0")
        if len(self.x0) != 2:
            raise ConfigError("x0 must have two entries")
        return self

    # ---- bridges into the library layers ----

    def cost_weights(self) -> CostWeights:
        return CostWeights(Q=np.asarray(self.Q, float), R=np.asarray(self.R, float))

    def gain_K0(self) -> np.ndarray:
        return np.asarray(self.K0, dtype=float)

    def make_plant(self) -> PlantModel:
        if self.plant == "pendulum":
            return make_pendulum_plant(PendulumParams())
        A, B = linearize_pendulum(PendulumParams())
        return make_linear_plant(A, B)

    def make_grid(self) -> BasisGrid:
        return pendulum_basis_grid(math.isqrt(self.n_basis))

    def train_spec(self, mode_beta: float = None, mode_sigma2: float = None,
                   n_episodes: int = None) -> TrainSpec:
        return TrainSpec(
            weights=self.cost_weights(),
            Ts=self.Ts,
            T_epi=self.T_epi,
            x0=tuple(self.x0),
            gamma=self.gamma,
            lambda_theta=self.lambda_theta,
            lambda_W=self.lambda_W,
            alpha=self.alpha,
            beta=self.beta if mode_beta is None else mode_beta,
            sigma2=self.sigma2 if mode_sigma2 is None else mode_sigma2,
            n_episodes=self.N_epi if n_episodes is None else n_episodes,
        )


def parse_config(path) -> ExperimentConfig:
    """Read a JSON config; an empty file means all defaults.

    Unknown keys are rejected by name; values are range-checked.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return config_from_text(text)


def config_from_text(text: str) -> ExperimentConfig:
    if not text.strip():
        return ExperimentConfig().validate()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    try:
        cfg = ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def write_resolved(cfg: ExperimentConfig, path):
    """Persist the fully-resolved configuration next to a run's outputs."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(asdict(cfg), fh, indent=2, sort_keys=True)
        fh.write("\n")
