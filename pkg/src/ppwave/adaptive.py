"""Single and aggregated wavelet tests with Monte-Carlo calibration.

The null reference is built conditionally on the observed parents and the
observed child count m: B independent m-samples of uniforms on the analysis
window produce null statistics per index. One half of the rows estimates the
conditional quantiles, the other half drives the dichotomy that calibrates
the aggregation level u_alpha. The data are rescaled (default x50) before
testing so the kernel support sits strictly inside (-1; 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .coefficients import _batch_coefficients, estimate_coefficients
from .haar import NONNEG, TWO_SIDED, IndexSet, WaveletIndex
from .process import EventTrain, Window, scale_train
from .simulate import as_generator

__all__ = [
    "TestConfig",
    "NullStatMatrix",
    "TestOutcome",
    "aggregation_weight",
    "aggregation_weights",
    "simulate_null_stats",
    "empirical_quantile",
    "calibrate_u_alpha",
    "run_multiple_test",
    "run_single_test",
]

_LOG_PI_OVER_SQRT6 = math.log(math.pi / math.sqrt(6.0))


def aggregation_weight(index: WaveletIndex, side: str = TWO_SIDED) -> float:
    """Weight w = 2(ln(j+1) + ln(pi/sqrt(6))) + ln|K_j| for one index.

    |K_j| is 2^(j+1) for the two-sided family and 2^j for the nonnegative
    one, keeping sum(exp(-w)) <= 1 in both cases. The value depends on j
    only.
    """
    if side == TWO_SIDED:
        if not index.in_family():
            raise ValueError(f"{index} lies outside the two-sided family")
        n_translations = 2 ** (index.j + 1)
    elif side == NONNEG:
        if not 0 <= index.k <= 2**index.j - 1:
            raise ValueError(f"{index} lies outside the nonnegative family")
        n_translations = 2**index.j
    else:
        raise ValueError(f"unknown side {side!r}")
    return 2.0 * (math.log(index.j + 1) + _LOG_PI_OVER_SQRT6) + math.log(
        n_translations
    )


def aggregation_weights(idx: IndexSet) -> np.ndarray:
    return np.array([aggregation_weight(ix, idx.side) for ix in idx.indices])


@dataclass(frozen=True)
class TestConfig:
    """Knobs of the aggregated test; B=2000 is the desk-scale override."""

    alpha: float = 0.05
    j0: int = 3
    side: str = TWO_SIDED
    B: int = 20000
    scale: float = 50.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0; 1)")
        if self.B < 2 or self.B % 2:
            raise ValueError("B must be an even integer >= 2")
        if self.scale <= 0:
            raise ValueError("scale must be > 0")


@dataclass(frozen=True)
class NullStatMatrix:
    """B rows of conditional null statistics, one column per index.

    The first B/2 rows are the quantile half, the rest the calibration half.
    """

    stats: np.ndarray
    index_set: IndexSet

    def __post_init__(self):
        if self.stats.ndim != 2 or self.stats.shape[1] != self.index_set.size:
            raise ValueError("stats must be (B, n_indices)")
        if self.stats.shape[0] < 2 or self.stats.shape[0] % 2:
            raise ValueError("row count B must be even and >= 2")
        if np.any(self.stats < 0):
            raise ValueError("null statistics are absolute values, >= 0")

    @property
    def n_rows(self) -> int:
        return self.stats.shape[0]

    @property
    def quantile_half(self) -> np.ndarray:
        return self.stats[: self.n_rows // 2]

    @property
    def calibration_half(self) -> np.ndarray:
        return self.stats[self.n_rows // 2 :]


def _check_parent_window(parents: EventTrain) -> float:
    if parents.window.lo != 0.0:
        raise ValueError("parent train must be observed on [0; T]")
    return parents.window.hi


def simulate_null_stats(
    parents: EventTrain,
    m: int,
    idx: IndexSet,
    B: int,
    obs: Window,
    seed,
) -> NullStatMatrix:
    """Null statistics from B uniform m-samples on the analysis window.

    Each row b holds |beta_hat| computed from (parents, V^b) where V^b is an
    m-sample of uniforms on obs; m = 0 degenerates to all-zero rows.
    """
    if B < 2 or B % 2:
        raise ValueError("B must be an even integer >= 2")
    if m < 0:
        raise ValueError("m must be >= 0")
    if parents.count() == 0:
        raise ValueError("null statistics require at least one parent")
    T = _check_parent_window(parents)
    if m == 0:
        return NullStatMatrix(np.zeros((B, idx.size)), idx)
    rng = as_generator(seed)
    draws = rng.uniform(obs.lo, obs.hi, size=(B, m))
    rows = np.repeat(np.arange(B, dtype=np.int64), m)
    beta = _batch_coefficients(
        parents.times, T, draws.ravel(), rows, B, idx.js, idx.ks, idx.j0
    )
    return NullStatMatrix(np.abs(beta), idx)


def _rank(p: float, n: int) -> int:
    """1-based order-statistic rank for tail probability p; 0 means below-min."""
    return n - int(math.floor(p * n))


def empirical_quantile(column, p: float) -> float:
    """Smallest sample value whose exceedance fraction is <= p.

    column must be sorted ascending. Equals the order statistic of rank
    ceil((1-p) * len(column)); rank 0 (p = 1) returns -inf, a value below
    every observation.
    """
    col = np.asarray(column, dtype=np.float64)
    if col.size == 0:
        raise ValueError("empty sample")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0; 1]")
    r = _rank(p, col.size)
    if r <= 0:
        return -math.inf
    return float(col[r - 1])


def _thresholds(sorted_cols: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Per-column conditional quantiles at per-column tail probabilities."""
    n = sorted_cols.shape[0]
    ranks = n - np.floor(probs * n).astype(np.int64)
    safe = np.clip(ranks - 1, 0, n - 1)
    out = sorted_cols[safe, np.arange(sorted_cols.shape[1])]
    return np.where(ranks <= 0, -np.inf, out)


def calibrate_u_alpha(nulls: NullStatMatrix, weights, alpha: float) -> float:
    """Dichotomy for the aggregation level.

    The quantile half fixes the threshold curves; the calibration half
    estimates the probability that any index exceeds its threshold at level
    u * exp(-w). Bisection on [alpha; 1] for 25 steps returns the largest
    tested u keeping that probability <= alpha; if even u = alpha fails by
    Monte-Carlo noise, alpha itself is returned (the calibrated level never
    drops below alpha).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0; 1)")
    w = np.asarray(weights, dtype=np.float64)
    sorted_q = np.sort(nulls.quantile_half, axis=0)
    calib = nulls.calibration_half
    damping = np.exp(-w)

    def any_reject_prob(u: float) -> float:
        th = _thresholds(sorted_q, u * damping)
        return float(np.mean(np.any(calib > th, axis=1)))

    if any_reject_prob(alpha) > alpha:
        return alpha
    if any_reject_prob(1.0) <= alpha:
        return 1.0
    lo, hi = alpha, 1.0
    for _ in range(25):
        mid = 0.5 * (lo + hi)
        if any_reject_prob(mid) <= alpha:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class TestOutcome:
    """Decision of the aggregated test plus the per-index evidence."""

    reject: bool
    u_alpha: float
    index_set: IndexSet
    beta_hat: np.ndarray
    t_stat: np.ndarray
    thresholds: np.ndarray
    single_reject: np.ndarray
    n_parents: int
    m_children: int
    scale: float
    no_information: bool = False

    @cached_property
    def positions_scaled(self) -> np.ndarray:
        """Detection positions k * 2^-j in scaled time, one per index."""
        return self.index_set.ks * 2.0 ** (-self.index_set.js.astype(np.float64))

    @cached_property
    def ranges_scaled(self) -> np.ndarray:
        """Detection ranges 2^-j in scaled time, one per index."""
        return 2.0 ** (-self.index_set.js.astype(np.float64))

    @property
    def positions_original(self) -> np.ndarray:
        return self.positions_scaled / self.scale

    @property
    def ranges_original(self) -> np.ndarray:
        return self.ranges_scaled / self.scale

    def rejected_positions(self, original: bool = True) -> list[tuple[float, float]]:
        """(position, range) for every rejecting index, in original or scaled time."""
        pos = self.positions_original if original else self.positions_scaled
        rng = self.ranges_original if original else self.ranges_scaled
        return [
            (float(p), float(r))
            for p, r, rej in zip(pos, rng, self.single_reject)
            if rej
        ]


def _no_information_outcome(
    idx: IndexSet, n: int, m: int, scale: float, alpha: float
) -> TestOutcome:
    size = idx.size
    return TestOutcome(
        reject=False,
        u_alpha=alpha,
        index_set=idx,
        beta_hat=np.zeros(size),
        t_stat=np.zeros(size),
        thresholds=np.full(size, np.nan),
        single_reject=np.zeros(size, dtype=bool),
        n_parents=n,
        m_children=m,
        scale=scale,
        no_information=True,
    )


def _scaled_inputs(parents, children, scale):
    """Scale both trains and clip children to the analysis window [-1; Ts+1]."""
    sp = scale_train(parents, scale)
    sc = scale_train(children, scale)
    T_scaled = _check_parent_window(sp)
    analysis = Window(-1.0, T_scaled + 1.0)
    keep = (sc.times >= analysis.lo) & (sc.times <= analysis.hi)
    observed = EventTrain(sc.times[keep], analysis)
    return sp, observed, analysis


def run_multiple_test(
    parents: EventTrain,
    children: EventTrain,
    config: TestConfig = TestConfig(),
    seed=0,
) -> TestOutcome:
    """Aggregated test of the nullity of the reproduction function.

    Scales the data, computes the per-index statistics, simulates the
    conditional null with m = number of children kept by the scaled analysis
    window, calibrates u_alpha, and rejects as soon as one index exceeds its
    threshold (strict inequality). Empty parent or child trains yield an
    accepting outcome with the no-information flag set.
    """
    idx = IndexSet(config.j0, config.side)
    n = parents.count()
    if n == 0:
        return _no_information_outcome(idx, 0, 0, config.scale, config.alpha)
    scaled_parents, observed, analysis = _scaled_inputs(
        parents, children, config.scale
    )
    m = observed.count()
    if m == 0:
        return _no_information_outcome(idx, n, 0, config.scale, config.alpha)

    coef = estimate_coefficients(scaled_parents, observed, idx)
    nulls = simulate_null_stats(scaled_parents, m, idx, config.B, analysis, seed)
    weights = aggregation_weights(idx)
    u_alpha = calibrate_u_alpha(nulls, weights, config.alpha)
    thresholds = _thresholds(
        np.sort(nulls.quantile_half, axis=0), u_alpha * np.exp(-weights)
    )
    single = coef.t_stat > thresholds
    return TestOutcome(
        reject=bool(single.any()),
        u_alpha=u_alpha,
        index_set=idx,
        beta_hat=coef.beta_hat,
        t_stat=coef.t_stat,
        thresholds=thresholds,
        single_reject=single,
        n_parents=n,
        m_children=m,
        scale=config.scale,
    )


def run_single_test(
    index: WaveletIndex,
    parents: EventTrain,
    children: EventTrain,
    config: TestConfig = TestConfig(),
    seed=0,
) -> bool:
    """Single-index test: reject iff the statistic exceeds its alpha-quantile.

    The quantile is taken over all B null rows (no half split is needed
    without aggregation).
    """
    if not index.in_family():
        raise ValueError(f"{index} lies outside the test family")
    n = parents.count()
    if n == 0:
        return False
    scaled_parents, observed, analysis = _scaled_inputs(
        parents, children, config.scale
    )
    m = observed.count()
    if m == 0:
        return False

    js = np.array([index.j], dtype=np.int64)
    ks = np.array([index.k], dtype=np.int64)
    T_scaled = scaled_parents.window.hi
    observed_stat = abs(
        _batch_coefficients(
            scaled_parents.times,
            T_scaled,
            observed.times,
            np.zeros(m, dtype=np.int64),
            1,
            js,
            ks,
            index.j,
        )[0, 0]
    )
    rng = as_generator(seed)
    draws = rng.uniform(analysis.lo, analysis.hi, size=(config.B, m))
    rows = np.repeat(np.arange(config.B, dtype=np.int64), m)
    null_stats = np.abs(
        _batch_coefficients(
            scaled_parents.times,
            T_scaled,
            draws.ravel(),
            rows,
            config.B,
            js,
            ks,
            index.j,
        )[:, 0]
    )
    threshold = empirical_quantile(np.sort(null_stats), config.alpha)
    return bool(observed_stat > threshold)
