"""Command-line front end.

Subcommands mirror the study stages: step1 learns the linear gain from
data, step2 trains the residual policy, eval rolls out a controller
deterministically, compare produces the four-way cost table, sweep runs the
hyperparameter robustness grid. Fatal errors print one line to stderr and
exit nonzero.
"""

import argparse
import json
import os
import sys

import numpy as np

from .config import ExperimentConfig, parse_config
from .errors import MfocError
from . import harness


def _load_config(args) -> ExperimentConfig:
    if getattr(args, "config", None):
        cfg = parse_config(args.config)
    else:
        cfg = ExperimentConfig().validate()
    # flags override file values
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "mode", None) is not None:
        cfg.mode = args.mode
    if getattr(args, "out", None) is not None:
        cfg.out_dir = args.out
    return cfg.validate()


def _add_common(p, mode=False, n_sim=False):
    p.add_argument("--config", help="JSON config file; empty file = defaults")
    p.add_argument("--seed", type=int, help="base RNG seed")
    p.add_argument("--out", help="output directory")
    if mode:
        p.add_argument("--mode", help="controller composition, e.g. K+RL")
    if n_sim:
        p.add_argument("--n-sim", type=int, default=20,
                       help="independent trainings per sweep cell")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mfoc",
        description="model-free LQR gain learning plus residual actor-critic")
    sub = ap.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("step1", help="learn the linear gain from data"))
    _add_common(sub.add_parser("step2", help="train the residual policy"),
                mode=True)
    _add_common(sub.add_parser("eval", help="deterministic rollout of a mode"),
                mode=True)
    _add_common(sub.add_parser("compare", help="four-way cost comparison"))
    _add_common(sub.add_parser("sweep", help="robustness grid over step sizes"),
                mode=False, n_sim=True)
    return ap


def _cmd_step1(cfg: ExperimentConfig):
    res = harness.run_step1(cfg, out_dir=cfg.out_dir)
    print(f"K = {np.array2string(res.K, precision=6)}  "
          f"iterations = {res.iterations}  converged = {res.converged}")
    return 0


def _maybe_learned_gain(cfg: ExperimentConfig):
    """The learned gain, from gain.json if a prior step1 left one, else fresh."""
    path = os.path.join(cfg.out_dir, "gain.json")
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            return np.asarray(json.load(fh)["K"], dtype=float)
    return harness.run_step1(cfg, out_dir=cfg.out_dir).K


def _cmd_step2(cfg: ExperimentConfig):
    K = _maybe_learned_gain(cfg) if cfg.mode in ("K+RL", "K-alone") else None
    res = harness.run_step2(cfg, K=K, out_dir=cfg.out_dir)
    pen = sum(r.terminated_by_penalty for r in res.curve)
    print(f"mode = {cfg.mode}  episodes = {len(res.curve)}  "
          f"penalized = {pen}  deterministic cost = {res.deterministic_cost:.4f}")
    return 0


def _cmd_eval(cfg: ExperimentConfig):
    K = None
    if cfg.mode in ("K+RL", "K-alone"):
        K = _maybe_learned_gain(cfg)
    W = None
    if cfg.mode in ("K+RL", "K0+RL", "RL-alone"):
        path = os.path.join(cfg.out_dir, "weights.json")
        if not os.path.exists(path):
            raise MfocError(f"mode {cfg.mode!r} needs {path}; run step2 first")
        with open(path, "r", encoding="utf-8") as fh:
            W = np.asarray(json.load(fh)["W"], dtype=float)
    ev = harness.evaluate_policy(cfg, cfg.mode, K=K, W=W)
    print(f"mode = {cfg.mode}  cost = {ev.cost:.4f}  "
          f"max |angle| = {ev.max_abs_angle:.4f}  stabilized = {ev.stabilized}")
    return 0


def _cmd_compare(cfg: ExperimentConfig):
    results = harness.compare(cfg, out_dir=cfg.out_dir)
    for mode, cost in results.items():
        print(f"{mode:10s} {cost:.4f}")
    return 0


def _cmd_sweep(cfg: ExperimentConfig, n_sim: int):
    # beta axis defaults to a decade either side of the configured value
    spec = harness.SweepSpec(config=cfg,
                             betas=[cfg.beta / 10.0, cfg.beta, cfg.beta * 10.0],
                             sigma2s=[cfg.sigma2], n_sim=n_sim)
    report = harness.robustness_sweep(spec, out_dir=cfg.out_dir)
    print(f"baseline (learned gain alone) = {report.baseline_cost:.4f}")
    for c in report.cells:
        print(f"{c.mode:10s} beta = {c.beta:<8g} sigma2 = {c.sigma2:<8g} "
              f"success = {c.success_pct:5.1f}%  improved = {c.improvement_pct:5.1f}%")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "step1":
            return _cmd_step1(cfg)
        if args.command == "step2":
            return _cmd_step2(cfg)
        if args.command == "eval":
            return _cmd_eval(cfg)
        if args.command == "compare":
            return _cmd_compare(cfg)
        if args.command == "sweep":
            return _cmd_sweep(cfg, args.n_sim)
        raise MfocError(f"unknown command {args.command!r}")
    except MfocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
