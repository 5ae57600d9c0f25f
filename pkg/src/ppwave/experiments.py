"""Replicate-level driver for the level and power benchmarks.

Each replicate draws a fresh dataset, runs the selected methods, and the
harness aggregates rejection rates with binomial confidence halfwidths.
Per-replicate seeds are pure functions of (master_seed, dataset, replicate),
so reports are bit-identical for any worker count. The coincidence test is
summarized as min/median/max of the per-delta rates over the delay grid.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .adaptive import TestConfig, run_multiple_test
from .baselines import DELTA_GRID, gaue_grid, ks_test
from .haar import NONNEG, TWO_SIDED
from .process import Window
from .simulate import DATASET_NAMES, DatasetId, make_dataset

__all__ = [
    "LEVEL_DATASETS",
    "POWER_DATASETS",
    "ExperimentConfig",
    "ReportRow",
    "ExperimentReport",
    "run_level_experiment",
    "run_power_experiment",
    "write_report",
]

LEVEL_DATASETS = ("Data_0",)
POWER_DATASETS = (
    "Data_10",
    "Data_30",
    "Data_50",
    "Data_80",
    "Data_10r",
    "Data_30r",
    "Data_50r",
    "Data_80r",
)

_KNOWN_METHODS = ("wavelet", "ks", "gaue")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a level/power run depends on; defaults are desk scale."""

    datasets: tuple[str, ...] = LEVEL_DATASETS
    methods: tuple[str, ...] = _KNOWN_METHODS
    alpha: float = 0.05
    R: int = 1000
    B: int = 2000
    j0: int = 3
    side: str = TWO_SIDED
    T: float = 2.0
    scale: float = 50.0
    master_seed: int = 20260810
    workers: int | None = None

    def __post_init__(self):
        if self.R < 1:
            raise ValueError("R must be >= 1")
        if self.B < 2 or self.B % 2:
            raise ValueError("B must be an even integer >= 2")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0; 1)")
        if self.side not in (TWO_SIDED, NONNEG):
            raise ValueError(f"side must be {TWO_SIDED!r} or {NONNEG!r}")
        for name in self.datasets:
            DatasetId(name)
        unknown = set(self.methods) - set(_KNOWN_METHODS)
        if unknown or not self.methods:
            raise ValueError(f"methods must be a nonempty subset of {_KNOWN_METHODS}")


@dataclass(frozen=True)
class ReportRow:
    dataset: str
    method: str
    delta_summary: str
    rate: float
    ci_halfwidth: float
    R: int


@dataclass
class ExperimentReport:
    """Aggregated rates plus sidecar detail (per-delta rates, u_alpha range)."""

    rows: list[ReportRow]
    config: ExperimentConfig
    wall_time_s: float
    gaue_delta_rates: dict[str, list[float]] = field(default_factory=dict)
    u_alpha_min: dict[str, float] = field(default_factory=dict)
    u_alpha_max: dict[str, float] = field(default_factory=dict)

    def rate(self, dataset: str, method: str, delta_summary: str = "") -> float:
        for row in self.rows:
            if (
                row.dataset == dataset
                and row.method == method
                and row.delta_summary == delta_summary
            ):
                return row.rate
        raise KeyError((dataset, method, delta_summary))

    def to_csv(self) -> str:
        lines = ["dataset,method,delta_summary,rate,ci_halfwidth,R"]
        for row in self.rows:
            lines.append(
                f"{row.dataset},{row.method},{row.delta_summary},"
                f"{row.rate:.6f},{row.ci_halfwidth:.6f},{row.R}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "config": asdict(self.config),
            "rows": [asdict(row) for row in self.rows],
            "delta_grid": [float(d) for d in DELTA_GRID],
            "gaue_delta_rates": self.gaue_delta_rates,
            "u_alpha_min": self.u_alpha_min,
            "u_alpha_max": self.u_alpha_max,
            "wall_time_s": self.wall_time_s,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _ci_halfwidth(rate: float, R: int) -> float:
    return 1.96 * np.sqrt(rate * (1.0 - rate) / R)


def _replicate(args):
    """One dataset draw plus every requested method; pure in its arguments."""
    (master_seed, name, r, T, alpha, B, j0, side, scale, methods) = args
    ds_pos = DATASET_NAMES.index(name)
    data_seq = np.random.SeedSequence(master_seed, spawn_key=(ds_pos, r, 0))
    parents, children = make_dataset(DatasetId(name), T, data_seq)
    out = {}
    if "wavelet" in methods:
        null_seq = np.random.SeedSequence(master_seed, spawn_key=(ds_pos, r, 1))
        cfg = TestConfig(alpha=alpha, j0=j0, side=side, B=B, scale=scale)
        outcome = run_multiple_test(parents, children, cfg, seed=null_seq)
        out["wavelet"] = outcome.reject
        out["u_alpha"] = outcome.u_alpha
    if "ks" in methods:
        # KS runs on the conditioning window ([-1; Ts+1] scaled, mapped back
        # to original time), where null children are exactly uniform.
        ks_window = Window(-1.0 / scale, T + 1.0 / scale)
        out["ks"] = ks_test(children, ks_window, alpha).reject
    if "gaue" in methods:
        out["gaue"] = [g.reject for g in gaue_grid(parents, children, T, alpha)]
    return out


def _run(cfg: ExperimentConfig) -> ExperimentReport:
    start = time.perf_counter()
    tasks = [
        (
            cfg.master_seed,
            name,
            r,
            cfg.T,
            cfg.alpha,
            cfg.B,
            cfg.j0,
            cfg.side,
            cfg.scale,
            cfg.methods,
        )
        for name in cfg.datasets
        for r in range(cfg.R)
    ]
    workers = cfg.workers if cfg.workers is not None else (os.cpu_count() or 1)
    if workers <= 1:
        results = [_replicate(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate, tasks, chunksize=chunk))

    report = ExperimentReport([], cfg, 0.0)
    for pos, name in enumerate(cfg.datasets):
        recs = results[pos * cfg.R : (pos + 1) * cfg.R]
        for method in cfg.methods:
            if method == "gaue":
                grid = np.array([rec["gaue"] for rec in recs], dtype=float)
                per_delta = grid.mean(axis=0)
                report.gaue_delta_rates[name] = [float(x) for x in per_delta]
                for label, value in (
                    ("min", per_delta.min()),
                    ("median", np.median(per_delta)),
                    ("max", per_delta.max()),
                ):
                    report.rows.append(
                        ReportRow(
                            name,
                            "gaue",
                            label,
                            float(value),
                            float(_ci_halfwidth(float(value), cfg.R)),
                            cfg.R,
                        )
                    )
            else:
                rate = float(np.mean([rec[method] for rec in recs]))
                report.rows.append(
                    ReportRow(
                        name,
                        method,
                        "",
                        rate,
                        float(_ci_halfwidth(rate, cfg.R)),
                        cfg.R,
                    )
                )
        if "wavelet" in cfg.methods:
            u_values = [rec["u_alpha"] for rec in recs]
            report.u_alpha_min[name] = float(min(u_values))
            report.u_alpha_max[name] = float(max(u_values))
    report.wall_time_s = time.perf_counter() - start
    return report


def run_level_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Empirical type-I error run; requires the null dataset Data_0."""
    if "Data_0" not in cfg.datasets:
        raise ValueError("a level experiment must include Data_0")
    return _run(cfg)


def run_power_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Empirical power run over the configured (usually non-null) datasets."""
    return _run(cfg)


def write_report(report: ExperimentReport, out_path: str) -> tuple[str, str]:
    """Write the CSV table and its JSON sidecar; returns both paths."""
    base = out_path[:-4] if out_path.endswith(".csv") else out_path
    csv_path = base + ".csv"
    json_path = base + ".json"
    with open(csv_path, "w") as fh:
        fh.write(report.to_csv())
    with open(json_path, "w") as fh:
        fh.write(report.to_json())
    return csv_path, json_path
