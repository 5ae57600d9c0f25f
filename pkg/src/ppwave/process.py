"""Event trains, observation windows and the parent/child interaction model.

All trains are immutable: times are stored as a read-only, nondecreasing
float64 array together with the closed window that contains them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Window",
    "EventTrain",
    "InteractionModel",
    "count_in",
    "scale_train",
    "read_events",
    "write_events",
]


@dataclass(frozen=True)
class Window:
    """Closed time interval [lo; hi], lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"window requires lo < hi, got [{self.lo}; {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, t: float) -> bool:
        # Both endpoints count as inside.
        return self.lo <= t <= self.hi

    def scaled(self, factor: float) -> "Window":
        return Window(self.lo * factor, self.hi * factor)


@dataclass(frozen=True, eq=False)
class EventTrain:
    """Sorted event times inside a closed observation window.

    Ties are kept: simulated Poisson samples have none almost surely, but
    file input may contain duplicates.
    """

    times: np.ndarray
    window: Window

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        if times.ndim != 1:
            raise ValueError("times must be one-dimensional")
        if times.size and np.any(np.diff(times) < 0):
            raise ValueError("times must be nondecreasing")
        if times.size and (times[0] < self.window.lo or times[-1] > self.window.hi):
            raise ValueError(
                f"times must lie in [{self.window.lo}; {self.window.hi}]"
            )
        times = times.copy()
        times.setflags(write=False)
        object.__setattr__(self, "times", times)

    def count(self) -> int:
        return int(self.times.size)

    def __len__(self) -> int:
        return self.count()


@dataclass(frozen=True)
class InteractionModel:
    """Parent rate, orphan rate and step reproduction kernel theta*1_[nu; b_support].

    T is the recording length of the parent process; children are observed on
    [-1; T+1] by default.
    """

    mu_p: float
    mu_c: float
    theta: float
    nu: float
    T: float
    b_support: float = 0.01

    def __post_init__(self):
        if self.mu_p <= 0:
            raise ValueError("mu_p must be > 0")
        if self.mu_c < 0:
            raise ValueError("mu_c must be >= 0")
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if not 0 <= self.nu < self.b_support:
            raise ValueError("need 0 <= nu < b_support")
        if self.T <= 0:
            raise ValueError("T must be > 0")


def count_in(train: EventTrain, w: Window) -> int:
    """Number of events t with w.lo <= t <= w.hi (both endpoints inside)."""
    lo = np.searchsorted(train.times, w.lo, side="left")
    hi = np.searchsorted(train.times, w.hi, side="right")
    return int(hi - lo)


def scale_train(train: EventTrain, factor: float) -> EventTrain:
    """Multiply all times and both window endpoints by a positive factor."""
    if factor <= 0:
        raise ValueError("scale factor must be > 0")
    return EventTrain(train.times * factor, train.window.scaled(factor))


def write_events(train: EventTrain, path) -> None:
    """Write a train as plain text: header '# window lo hi', one time per line."""
    with open(path, "w") as fh:
        fh.write(f"# window {float(train.window.lo)!r} {float(train.window.hi)!r}\n")
        for t in train.times:
            fh.write(f"{float(t)!r}\n")


def read_events(path) -> EventTrain:
    """Read a plain-text event file written by :func:`write_events`."""
    window = None
    times = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 3 and parts[0] == "window":
                    window = Window(float(parts[1]), float(parts[2]))
                continue
            times.append(float(line))
    if window is None:
        raise ValueError(f"{path}: missing '# window lo hi' header")
    return EventTrain(np.sort(np.asarray(times, dtype=np.float64)), window)
