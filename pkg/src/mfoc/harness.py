"""Study harness: the two learning stages, deterministic evaluation, the
four-way cost comparison, and the hyperparameter robustness sweep, each with
CSV/JSON outputs suitable for downstream plotting.

All floats land in output files via repr-exact formatting (17 significant
digits), so reruns with the same seed are byte-identical.
"""

import csv
import os
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .actor_critic import (
    ActorState,
    BasisGrid,
    CriticState,
    EpisodeResult,
    evaluate_deterministic,
)
from .actor_critic import train as train_actor_critic
from .config import ExperimentConfig, write_resolved
from .errors import ConfigError, MfocError
from .lqr import collect_data, kleinman_iteration, policy_iteration
from .plants import PendulumParams, PlantModel, linearize_pendulum, step

# stabilization thresholds for the sweep's success count: the deterministic
# rollout must never cross the penalty band and must end inside this box
STABLE_ANGLE = 0.05
STABLE_RATE = 0.1


def fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_csv(path, header: Sequence[str], rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(row)


@dataclass(frozen=True)
class Step1Result:
    K: np.ndarray
    P: np.ndarray
    iterations: int
    converged: bool
    P_history_norms: List[float]
    K_star: np.ndarray
    P_star: np.ndarray


def run_step1(cfg: ExperimentConfig, out_dir: Optional[str] = None) -> Step1Result:
    """Learn the linear gain from sampled data, with the model-based solution
    alongside for reference. Writes gain.json and trajectory.csv when out_dir
    is given."""
    plant = cfg.make_plant()
    w = cfg.cost_weights()
    data = collect_data(plant, cfg.gain_K0(), seed=cfg.seed, l=cfg.l,
                        T_dc=cfg.T_dc, dt_sample=cfg.dt_sample)
    report = policy_iteration(data, cfg.gain_K0(), w, eps=cfg.eps)
    A, B = linearize_pendulum(PendulumParams())
    K_star, P_star = kleinman_iteration(A, B, w, cfg.gain_K0(), eps=1e-10)
    res = Step1Result(
        K=report.K_final, P=report.P_final, iterations=report.iterations,
        converged=report.converged,
        P_history_norms=[float(np.linalg.norm(P)) for P in report.P_history],
        K_star=K_star, P_star=P_star)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_gain_json(os.path.join(out_dir, "gain.json"), res)
        _write_trajectory_csv(os.path.join(out_dir, "trajectory.csv"),
                              plant, cfg, res)
        write_resolved(cfg, os.path.join(out_dir, "config.resolved.json"))
    return res


def _write_gain_json(path, res: Step1Result):
    import json

    def mat(M):
        return [[float(v) for v in row] for row in np.atleast_2d(M)]

    payload = {
        "K": mat(res.K),
        "P": mat(res.P),
        "iterations": res.iterations,
        "converged": res.converged,
        "P_history_norms": [float(v) for v in res.P_history_norms],
        "K_star": mat(res.K_star),
        "P_star": mat(res.P_star),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _write_trajectory_csv(path, plant: PlantModel, cfg: ExperimentConfig,
                          res: Step1Result):
    """Angle traces of the initial, learned, and model-based gains from x0."""
    gains = {"psi_K0": cfg.gain_K0(), "psi_K": res.K, "psi_Kstar": res.K_star}
    n_steps = int(round(cfg.T_epi / cfg.Ts))
    cols = {}
    for name, K in gains.items():
        x = np.asarray(cfg.x0, dtype=float).copy()
        trace = [x[0]]
        for _ in range(n_steps):
            x = step(plant, x, K @ x, cfg.Ts)
            trace.append(x[0])
        cols[name] = trace
    rows = []
    for i in range(n_steps + 1):
        t = i * cfg.Ts
        rows.append([fmt(t)] + [fmt(cols[c][i]) for c in gains])
    _write_csv(path, ["t", "psi_K0", "psi_K", "psi_Kstar"], rows)


def _mode_gain(cfg: ExperimentConfig, mode: str,
               K: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if mode in ("K+RL", "K-alone"):
        if K is None:
            raise ConfigError(f"mode {mode!r} needs the learned gain; run step1")
        return np.asarray(K, dtype=float)
    if mode in ("K0+RL", "K0-alone"):
        return cfg.gain_K0()
    return None  # RL-alone


@dataclass(frozen=True)
class EvalResult:
    cost: float
    max_abs_angle: float
    x_final: np.ndarray

    @property
    def stabilized(self) -> bool:
        return (self.max_abs_angle < 0.5
                and abs(float(self.x_final[0])) < STABLE_ANGLE
                and abs(float(self.x_final[1])) < STABLE_RATE)


def evaluate_policy(cfg: ExperimentConfig, mode: str,
                    K: Optional[np.ndarray] = None,
                    W: Optional[np.ndarray] = None,
                    grid: Optional[BasisGrid] = None) -> EvalResult:
    """Deterministic full-horizon rollout of one controller composition."""
    if mode not in ("K+RL", "K0+RL", "RL-alone", "K-alone", "K0-alone"):
        raise ConfigError(f"unknown mode {mode!r}")
    gain = _mode_gain(cfg, mode, K)
    use_W = W if mode.endswith("RL") or mode == "RL-alone" else None
    if mode in ("K+RL", "K0+RL", "RL-alone") and W is None:
        raise ConfigError(f"mode {mode!r} needs trained policy weights; run step2")
    plant = cfg.make_plant()
    grid = grid or cfg.make_grid()
    J, max_abs, x_final = evaluate_deterministic(plant, gain, use_W, grid,
                                                 cfg.train_spec())
    return EvalResult(cost=float(J), max_abs_angle=float(max_abs), x_final=x_final)


@dataclass(frozen=True)
class Step2Result:
    critic: CriticState
    actor: ActorState
    curve: List[EpisodeResult]
    deterministic_cost: float


def run_step2(cfg: ExperimentConfig, K: Optional[np.ndarray] = None,
              out_dir: Optional[str] = None) -> Step2Result:
    """Train the residual policy in the configured mode. Writes costs.csv and
    weights.json when out_dir is given."""
    if cfg.mode in ("K-alone", "K0-alone"):
        raise ConfigError(f"mode {cfg.mode!r} has no learning stage")
    gain = _mode_gain(cfg, cfg.mode, K)
    plant = cfg.make_plant()
    grid = cfg.make_grid()
    critic, actor, curve = train_actor_critic(plant, gain, cfg.train_spec(),
                                              seed=cfg.seed, grid=grid)
    J, _, _ = evaluate_deterministic(plant, gain, actor.W, grid, cfg.train_spec())
    res = Step2Result(critic=critic, actor=actor, curve=curve,
                      deterministic_cost=float(J))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        _write_costs_csv(os.path.join(out_dir, "costs.csv"), curve)
        _write_weights_json(os.path.join(out_dir, "weights.json"), res)
        write_resolved(cfg, os.path.join(out_dir, "config.resolved.json"))
    return res


def _write_costs_csv(path, curve: List[EpisodeResult]):
    rows = [[str(i), fmt(r.cost_J), str(r.steps_taken),
             "1" if r.terminated_by_penalty else "0"]
            for i, r in enumerate(curve)]
    _write_csv(path, ["episode", "cost", "steps", "penalized"], rows)


def _write_weights_json(path, res: Step2Result):
    import json

    payload = {
        "theta": [float(v) for v in res.critic.theta],
        "W": [[float(v) for v in row] for row in res.actor.W],
        "deterministic_cost": res.deterministic_cost,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def compare(cfg: ExperimentConfig, out_dir: Optional[str] = None) -> dict:
    """Four-way deterministic cost comparison at one seed: both standalone
    gains, the learned gain with its residual policy, and the residual policy
    alone. Writes table3.csv when out_dir is given."""
    s1 = run_step1(cfg, out_dir=out_dir)
    results = {}
    results["K0-alone"] = evaluate_policy(cfg, "K0-alone").cost
    results["K-alone"] = evaluate_policy(cfg, "K-alone", K=s1.K).cost
    for mode in ("K+RL", "RL-alone"):
        cfg_mode = ExperimentConfig(**{**_as_dict(cfg), "mode": mode})
        s2 = run_step2(cfg_mode, K=s1.K)
        results[mode] = evaluate_policy(cfg, mode, K=s1.K, W=s2.actor.W).cost
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        rows = [[m, fmt(c)] for m, c in results.items()]
        _write_csv(os.path.join(out_dir, "table3.csv"), ["mode", "cost"], rows)
    return results


def _as_dict(cfg: ExperimentConfig) -> dict:
    from dataclasses import asdict

    return asdict(cfg)


@dataclass(frozen=True)
class SweepSpec:
    """One robustness grid: which step sizes and variances to exercise, how
    many independent trainings per cell, and over which controller modes."""

    config: ExperimentConfig
    betas: Sequence[float]
    sigma2s: Sequence[float]
    n_sim: int
    modes: Sequence[str] = ("K+RL", "K0+RL", "RL-alone")

    def __post_init__(self):
        if self.n_sim < 1:
            raise ConfigError(f"n_sim must be >= 1, got {self.n_sim}")
        if not self.betas or not self.sigma2s:
            raise ConfigError("betas and sigma2s must be nonempty")
        for m in self.modes:
            if m not in ("K+RL", "K0+RL", "RL-alone"):
                raise ConfigError(f"sweep mode {m!r} is not a learning mode")


@dataclass(frozen=True)
class SweepCell:
    mode: str
    beta: float
    sigma2: float
    success_pct: float
    improvement_pct: float
    costs: List[float]


@dataclass(frozen=True)
class SweepReport:
    cells: List[SweepCell]
    baseline_cost: float  # learned gain alone, the improvement yardstick


def sweep_seed(base_seed: int, mode_idx: int, beta_idx: int, sigma2_idx: int,
               run_idx: int) -> int:
    """Deterministic, collision-free seed for each sweep run."""
    return base_seed + 100000 * mode_idx + 10000 * beta_idx \
        + 1000 * sigma2_idx + run_idx


def robustness_sweep(sweep: SweepSpec,
                     K: Optional[np.ndarray] = None,
                     out_dir: Optional[str] = None) -> SweepReport:
    """Success and improvement percentages over n_sim independent trainings
    per (mode, beta, sigma2) cell.

    Success: the deterministic post-training rollout keeps |angle| below the
    penalty band throughout and ends with |angle| < 0.05, |rate| < 0.1.
    Improvement: cost strictly below the learned-gain-alone baseline, for
    every mode. A run that diverges counts as neither; it never aborts the
    sweep.
    """
    cfg = sweep.config
    if K is None:
        K = run_step1(cfg).K
    plant = cfg.make_plant()
    grid = cfg.make_grid()
    base_eval = evaluate_policy(cfg, "K-alone", K=K)
    baseline = base_eval.cost
    cells: List[SweepCell] = []
    run_rows = []
    for mi, mode in enumerate(sweep.modes):
        gain = _mode_gain(cfg, mode, K)
        for bi, beta in enumerate(sweep.betas):
            for si, sigma2 in enumerate(sweep.sigma2s):
                spec = cfg.train_spec(mode_beta=float(beta),
                                      mode_sigma2=float(sigma2))
                n_success = 0
                n_improved = 0
                costs = []
                for run in range(sweep.n_sim):
                    seed = sweep_seed(cfg.seed, mi, bi, si, run)
                    try:
                        _, actor, _ = train_actor_critic(plant, gain, spec,
                                                         seed=seed, grid=grid)
                        J, max_abs, x_final = evaluate_deterministic(
                            plant, gain, actor.W, grid, spec)
                    except MfocError:
                        run_rows.append([mode, fmt(beta), fmt(sigma2),
                                         str(run), str(seed), "nan", "0", "0"])
                        continue
                    ok = (max_abs < spec.penalty_angle
                          and abs(float(x_final[0])) < STABLE_ANGLE
                          and abs(float(x_final[1])) < STABLE_RATE)
                    better = bool(J < baseline)
                    n_success += int(ok)
                    n_improved += int(better)
                    costs.append(float(J))
                    run_rows.append([mode, fmt(beta), fmt(sigma2), str(run),
                                     str(seed), fmt(J), str(int(ok)),
                                     str(int(better))])
                cells.append(SweepCell(
                    mode=mode, beta=float(beta), sigma2=float(sigma2),
                    success_pct=100.0 * n_success / sweep.n_sim,
                    improvement_pct=100.0 * n_improved / sweep.n_sim,
                    costs=costs))
    report = SweepReport(cells=cells, baseline_cost=float(baseline))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        rows = [[c.mode, fmt(c.beta), fmt(c.sigma2), fmt(c.success_pct),
                 fmt(c.improvement_pct)] for c in report.cells]
        _write_csv(os.path.join(out_dir, "sweep.csv"),
                   ["mode", "beta", "sigma2", "success_pct", "improvement_pct"],
                   rows)
        _write_csv(os.path.join(out_dir, "sweep_runs.csv"),
                   ["mode", "beta", "sigma2", "run", "seed", "cost",
                    "success", "improved"], run_rows)
        write_resolved(cfg, os.path.join(out_dir, "config.resolved.json"))
    return report
