"""Samplers for the interaction model and the nine benchmark datasets.

Children are generated through the parent/descendant decomposition: orphans
form a homogeneous Poisson process, and each parent independently spawns a
Poisson number of children placed uniformly on [U+nu; U+b_support]. For this
model the decomposition is exact, so no thinning on the conditional intensity
is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .process import EventTrain, InteractionModel, Window

__all__ = [
    "RngSeed",
    "DatasetId",
    "DATASET_NAMES",
    "as_generator",
    "sim_homogeneous_poisson",
    "sim_child_process",
    "make_dataset",
]

PARENT_RATE = 50.0
ORPHAN_RATE = 20.0
KERNEL_SUPPORT_END = 0.01

# name -> (theta, nu); the "r" variants add the minimal delay nu=0.005
_DATASETS = {
    "Data_0": (0.0, 0.0),
    "Data_10": (10.0, 0.0),
    "Data_30": (30.0, 0.0),
    "Data_50": (50.0, 0.0),
    "Data_80": (80.0, 0.0),
    "Data_10r": (10.0, 0.005),
    "Data_30r": (30.0, 0.005),
    "Data_50r": (50.0, 0.005),
    "Data_80r": (80.0, 0.005),
}

DATASET_NAMES = tuple(_DATASETS)


@dataclass(frozen=True)
class RngSeed:
    """Deterministic seed: (master_seed, stream_id) fixes the generator state."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.master_seed < 0 or self.stream_id < 0:
            raise ValueError("seed components must be nonnegative")

    def sequence(self, *keys: int) -> np.random.SeedSequence:
        return np.random.SeedSequence(
            self.master_seed, spawn_key=(self.stream_id, *keys)
        )

    def generator(self, *keys: int) -> np.random.Generator:
        return np.random.default_rng(self.sequence(*keys))


def as_generator(seed) -> np.random.Generator:
    """Accept an RngSeed, SeedSequence, Generator or int and return a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, RngSeed):
        return seed.generator()
    if isinstance(seed, (int, np.integer, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    raise TypeError(f"cannot build a generator from {type(seed).__name__}")


@dataclass(frozen=True)
class DatasetId:
    """One of the benchmark dataset names (Data_0 ... Data_80r)."""

    name: str

    def __post_init__(self):
        if self.name not in _DATASETS:
            raise ValueError(
                f"unknown dataset {self.name!r}; expected one of {DATASET_NAMES}"
            )

    @property
    def theta(self) -> float:
        return _DATASETS[self.name][0]

    @property
    def nu(self) -> float:
        return _DATASETS[self.name][1]

    def model(self, T: float) -> InteractionModel:
        return InteractionModel(
            mu_p=PARENT_RATE,
            mu_c=ORPHAN_RATE,
            theta=self.theta,
            nu=self.nu,
            T=T,
            b_support=KERNEL_SUPPORT_END,
        )


def sim_homogeneous_poisson(rate: float, w: Window, seed) -> EventTrain:
    """Homogeneous Poisson process on a window.

    Draws N ~ Poisson(rate * |w|), then N i.i.d. uniforms on the window,
    sorted.
    """
    if rate < 0:
        raise ValueError("rate must be >= 0")
    rng = as_generator(seed)
    n = rng.poisson(rate * w.length)
    times = np.sort(rng.uniform(w.lo, w.hi, size=n))
    return EventTrain(times, w)


def sim_child_process(
    parents: EventTrain,
    model: InteractionModel,
    obs: Window | None = None,
    seed=None,
) -> EventTrain:
    """Children of a parent train: orphans plus per-parent descendant clusters.

    Parameters
    ----------
    parents : EventTrain
        Parent events, all inside [0; model.T].
    model : InteractionModel
        Rates and step kernel theta*1_[nu; b_support].
    obs : Window, optional
        Observation window for the children, default [-1; T+1]. Descendants of
        parents in [0; T] fall inside it automatically when b_support <= 1.
    seed
        Anything accepted by :func:`as_generator`.

    Returns
    -------
    EventTrain
        Sorted superposition of orphans and descendants on ``obs``.
    """
    if obs is None:
        obs = Window(-1.0, model.T + 1.0)
    if parents.count() and (parents.times[0] < 0 or parents.times[-1] > model.T):
        raise ValueError("parents must lie in [0; T]")
    rng = as_generator(seed)

    n_orphans = rng.poisson(model.mu_c * obs.length)
    orphans = rng.uniform(obs.lo, obs.hi, size=n_orphans)

    span = model.b_support - model.nu
    counts = rng.poisson(model.theta * span, size=parents.count())
    total = int(counts.sum())
    offsets = rng.uniform(model.nu, model.b_support, size=total)
    descendants = np.repeat(parents.times, counts) + offsets

    return EventTrain(np.sort(np.concatenate([orphans, descendants])), obs)


def make_dataset(dataset: DatasetId, T: float, seed) -> tuple[EventTrain, EventTrain]:
    """Simulate one (parents, children) pair for a benchmark dataset.

    Parents are homogeneous Poisson(50) on [0; T]; children follow the
    dataset's (theta, nu) with orphan rate 20 on [-1; T+1]. Both trains are in
    original (unscaled) time.
    """
    if isinstance(seed, RngSeed):
        seq = seed.sequence()
    elif isinstance(seed, np.random.SeedSequence):
        seq = seed
    else:
        seq = np.random.SeedSequence(seed)
    parent_seq, child_seq = seq.spawn(2)
    parents = sim_homogeneous_poisson(
        PARENT_RATE, Window(0.0, T), np.random.default_rng(parent_seq)
    )
    children = sim_child_process(
        parents, dataset.model(T), seed=np.random.default_rng(child_seq)
    )
    return parents, children
