"""Command-line interface: simulate, test, level, power."""

from __future__ import annotations

import argparse
import json
import sys

from .adaptive import TestConfig, run_multiple_test
from .baselines import gaue_grid, gaue_test, ks_test
from .coefficients import estimate_coefficients
from .experiments import (
    LEVEL_DATASETS,
    POWER_DATASETS,
    ExperimentConfig,
    run_level_experiment,
    run_power_experiment,
    write_report,
)
from .haar import NONNEG, TWO_SIDED, IndexSet
from .process import read_events, write_events
from .simulate import DATASET_NAMES, DatasetId, RngSeed, make_dataset


def _add_simulate(sub):
    p = sub.add_parser("simulate", help="draw one (parents, children) dataset")
    p.add_argument("--dataset", required=True, choices=DATASET_NAMES)
    p.add_argument("--T", type=float, default=2.0, help="recording length (default 2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-parents", required=True)
    p.add_argument("--out-children", required=True)
    p.set_defaults(func=_cmd_simulate)


def _cmd_simulate(args) -> int:
    parents, children = make_dataset(
        DatasetId(args.dataset), args.T, RngSeed(args.seed)
    )
    write_events(parents, args.out_parents)
    write_events(children, args.out_children)
    print(
        f"wrote {parents.count()} parents to {args.out_parents}, "
        f"{children.count()} children to {args.out_children}"
    )
    return 0


def _add_test(sub):
    p = sub.add_parser("test", help="test h = 0 on event files")
    p.add_argument("--parents", required=True, help="parent events on [0; T]")
    p.add_argument("--children", required=True)
    p.add_argument("--method", choices=("wavelet", "ks", "gaue"), default="wavelet")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--j0", type=int, default=3)
    p.add_argument("--side", choices=(TWO_SIDED, NONNEG), default=TWO_SIDED)
    p.add_argument("--B", type=int, default=20000)
    p.add_argument("--scale", type=float, default=50.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, help="single delay for --method gaue")
    p.add_argument(
        "--delta-grid",
        action="store_true",
        help="evaluate gaue over the 0.001..0.040 grid",
    )
    p.add_argument(
        "--coeffs-only",
        action="store_true",
        help="print only the coefficient table (j, k, beta_hat, t_stat)",
    )
    p.set_defaults(func=_cmd_test)


def _cmd_test(args) -> int:
    parents = read_events(args.parents)
    children = read_events(args.children)
    T = parents.window.hi

    if args.method == "ks":
        from .process import Window

        ks_window = Window(-1.0 / args.scale, T + 1.0 / args.scale)
        res = ks_test(children, ks_window, args.alpha)
        print(f"d_stat: {res.d_stat:.6f}")
        print(f"p_value: {res.p_value:.6g}")
        print(f"decision: {'reject' if res.reject else 'accept'}")
        return 0

    if args.method == "gaue":
        if args.delta_grid or args.delta is None:
            results = gaue_grid(parents, children, T, args.alpha)
        else:
            results = [gaue_test(parents, children, T, args.delta, args.alpha)]
        print("delta,x_t,m0_hat,sigma_hat,reject")
        for g in results:
            print(
                f"{g.delta:.3f},{g.x_t},{g.m0_hat:.6f},{g.sigma_hat:.6f},{int(g.reject)}"
            )
        print(f"decision: {'reject' if any(g.reject for g in results) else 'accept'}")
        return 0

    cfg = TestConfig(
        alpha=args.alpha, j0=args.j0, side=args.side, B=args.B, scale=args.scale
    )
    if args.coeffs_only:
        from .adaptive import _scaled_inputs

        scaled_parents, observed, _ = _scaled_inputs(parents, children, cfg.scale)
        coef = estimate_coefficients(
            scaled_parents, observed, IndexSet(cfg.j0, cfg.side)
        )
        print("j,k,beta_hat,t_stat")
        for ix, b, t in zip(
            coef.index_set.indices, coef.beta_hat, coef.t_stat
        ):
            print(f"{ix.j},{ix.k},{b:.10g},{t:.10g}")
        return 0

    outcome = run_multiple_test(parents, children, cfg, seed=RngSeed(args.seed))
    print(f"decision: {'reject' if outcome.reject else 'accept'}")
    print(f"u_alpha: {outcome.u_alpha:.6g}")
    if outcome.no_information:
        print("note: no informative events (empty parents or children)")
        return 0
    print(
        "j,k,beta_hat,t_stat,threshold,reject,"
        "position_original_time,range_original_time"
    )
    for ix, b, t, th, rej, pos, rng in zip(
        outcome.index_set.indices,
        outcome.beta_hat,
        outcome.t_stat,
        outcome.thresholds,
        outcome.single_reject,
        outcome.positions_original,
        outcome.ranges_original,
    ):
        print(
            f"{ix.j},{ix.k},{b:.10g},{t:.10g},{th:.10g},{int(rej)},"
            f"{pos:.10g},{rng:.10g}"
        )
    return 0


def _add_experiment(sub, name, help_text):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--config", help="JSON file of ExperimentConfig fields")
    p.add_argument("--R", type=int)
    p.add_argument("--B", type=int)
    p.add_argument("--j0", type=int)
    p.add_argument("--side", choices=(TWO_SIDED, NONNEG))
    p.add_argument("--T", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--datasets", nargs="+", choices=DATASET_NAMES)
    p.add_argument("--methods", nargs="+", choices=("wavelet", "ks", "gaue"))
    p.add_argument("--workers", type=int)
    p.add_argument(
        "--paper-scale",
        action="store_true",
        help="table-scale preset: R=5000 (level) or 1000 (power), B=20000",
    )
    p.add_argument("--out", help="output path; writes CSV plus a JSON sidecar")
    p.set_defaults(func=_cmd_level if name == "level" else _cmd_power)


def _experiment_config(args, kind: str) -> ExperimentConfig:
    fields: dict = {}
    if kind == "level":
        fields["datasets"] = LEVEL_DATASETS
        fields["R"] = 1000
    else:
        fields["datasets"] = POWER_DATASETS
        fields["R"] = 500
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        for key in ("datasets", "methods"):
            if key in loaded:
                loaded[key] = tuple(loaded[key])
        fields.update(loaded)
    if args.paper_scale:
        fields["R"] = 5000 if kind == "level" else 1000
        fields["B"] = 20000
    overrides = {
        "R": args.R,
        "B": args.B,
        "j0": args.j0,
        "side": args.side,
        "T": args.T,
        "alpha": args.alpha,
        "master_seed": args.seed,
        "workers": args.workers,
    }
    fields.update({k: v for k, v in overrides.items() if v is not None})
    if args.datasets:
        fields["datasets"] = tuple(args.datasets)
    if args.methods:
        fields["methods"] = tuple(args.methods)
    return ExperimentConfig(**fields)


def _emit_report(report, out) -> int:
    sys.stdout.write(report.to_csv())
    if out:
        csv_path, json_path = write_report(report, out)
        print(f"wrote {csv_path} and {json_path}", file=sys.stderr)
    return 0


def _cmd_level(args) -> int:
    report = run_level_experiment(_experiment_config(args, "level"))
    return _emit_report(report, args.out)


def _cmd_power(args) -> int:
    report = run_power_experiment(_experiment_config(args, "power"))
    return _emit_report(report, args.out)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ppwave",
        description="Interaction tests for parent/child point processes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate(sub)
    _add_test(sub)
    _add_experiment(sub, "level", "empirical type-I error benchmark")
    _add_experiment(sub, "power", "empirical power benchmark")
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
