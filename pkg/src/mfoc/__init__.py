"""Model-free optimal control: data-driven LQR gain learning plus a residual
actor-critic policy, with an inverted-pendulum study harness."""

from .errors import (
    MfocError,
    RankDeficient,
    NumericalBlowup,
    Asymmetric,
    EmptyWindow,
    SingularLyapunov,
    NotConverged,
    NotHurwitz,
    ConfigError,
)
from .numerics import (
    solve_least_squares,
    rk4_step,
    svec,
    smat,
    svec_quad,
    smat_halved,
    solve_lyapunov,
    window_integrals,
    is_hurwitz,
)
from .plants import (
    PendulumParams,
    CostWeights,
    PlantModel,
    pendulum_dynamics,
    linearize_pendulum,
    wrap_angle,
    make_pendulum_plant,
    make_linear_plant,
    step,
    reward,
)
from .lqr import (
    ExplorationSignal,
    exploration_signal,
    DataWindowSet,
    PolicyIterationReport,
    min_windows,
    collect_data,
    assemble_learning_equations,
    policy_iteration,
    kleinman_iteration,
)
from .actor_critic import (
    BasisGrid,
    pendulum_basis_grid,
    features,
    value,
    policy_mean,
    CriticState,
    ActorState,
    EpisodeResult,
    TrainSpec,
    sample_action,
    log_policy_density,
    log_policy_grad,
    variance_schedule,
    actor_critic_update,
    run_episode,
    train,
    evaluate_deterministic,
)
from .config import ExperimentConfig, parse_config, config_from_text
from .harness import (
    Step1Result,
    Step2Result,
    EvalResult,
    SweepCell,
    SweepSpec,
    SweepReport,
    run_step1,
    run_step2,
    evaluate_policy,
    compare,
    robustness_sweep,
    sweep_seed,
)

__version__ = "0.1.0"

__all__ = [
    "MfocError", "RankDeficient", "NumericalBlowup", "Asymmetric",
    "EmptyWindow", "SingularLyapunov", "NotConverged", "NotHurwitz",
    "ConfigError",
    "solve_least_squares", "rk4_step", "svec", "smat", "svec_quad",
    "smat_halved", "solve_lyapunov", "window_integrals", "is_hurwitz",
    "PendulumParams", "CostWeights", "PlantModel", "pendulum_dynamics",
    "linearize_pendulum", "wrap_angle", "make_pendulum_plant",
    "make_linear_plant", "step", "reward",
    "ExplorationSignal", "exploration_signal", "DataWindowSet",
    "PolicyIterationReport", "min_windows", "collect_data",
    "assemble_learning_equations", "policy_iteration", "kleinman_iteration",
    "BasisGrid", "pendulum_basis_grid", "features", "value", "policy_mean",
    "CriticState", "ActorState", "EpisodeResult", "TrainSpec",
    "sample_action", "log_policy_density", "log_policy_grad",
    "variance_schedule", "actor_critic_update", "run_episode", "train",
    "evaluate_deterministic",
    "ExperimentConfig", "parse_config", "config_from_text",
    "Step1Result", "Step2Result", "EvalResult", "SweepCell", "SweepSpec",
    "SweepReport",
    "run_step1", "run_step2", "evaluate_policy", "compare",
    "robustness_sweep", "sweep_seed",
]
