"""Primary-user traffic: per-channel busy/idle renewal process.

A channel hosting a primary transmitter alternates busy runs of exactly
``b`` slots with idle runs of ``ceil(Exp(l))`` slots (at least 1).  The idle
run is then geometric with mean ``1 / (1 - exp(-1/l))``, which fixes the
long-run busy fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import seed_words


def discrete_idle_mean(l: float) -> float:
    """E[ceil(X)] for X ~ Exp(mean l)."""
    return 1.0 / -math.expm1(-1.0 / l)


def busy_fraction(b: int, l: float) -> float:
    """Long-run fraction of busy slots of the discretised renewal process."""
    return b / (b + discrete_idle_mean(l))


def idle_mean_for(intensity: float, b: int) -> float:
    """Exponential mean l whose discretised busy fraction equals ``intensity``."""
    if not 0 < intensity < 1:
        raise ValueError("intensity must lie in (0, 1)")
    m = b * (1 - intensity) / intensity   # required mean idle run, in slots
    if m <= 1:
        raise ValueError(
            f"intensity {intensity} needs idle runs shorter than one slot; raise busy_slots"
        )
    return -1.0 / math.log1p(-1.0 / m)


@dataclass(frozen=True)
class PuTrafficConfig:
    transmitters: int = 0
    busy_slots: int = 5
    idle_mean_slots: float = 15.0

    def __post_init__(self):
        if self.transmitters < 0:
            raise ValueError("transmitter count must be >= 0")
        if self.busy_slots < 1:
            raise ValueError("busy period must be >= 1 slot")
        if self.idle_mean_slots <= 0:
            raise ValueError("idle mean must be > 0")

    @classmethod
    def from_intensity(cls, intensity, transmitters: int, busy_slots: int = 5):
        intensity = float(intensity)
        if intensity == 0:
            return cls(0, busy_slots, 1.0)
        return cls(transmitters, busy_slots, idle_mean_for(intensity, busy_slots))

    @property
    def target_intensity(self) -> Fraction:
        """b / (b + l), the nominal intensity from the continuous idle mean."""
        return Fraction(self.busy_slots) / (Fraction(self.busy_slots)
                                            + Fraction(self.idle_mean_slots).limit_denominator(10**6))

    @property
    def intensity(self) -> float:
        """Busy fraction after rounding idle runs up to whole slots."""
        return busy_fraction(self.busy_slots, self.idle_mean_slots) if self.transmitters else 0.0

    def validate(self, n: int):
        if self.transmitters >= n:
            raise ValueError(f"need fewer transmitters ({self.transmitters}) than channels ({n})")


def pu_trace(cfg: PuTrafficConfig, channel: int, horizon: int, seed) -> np.ndarray:
    """Availability (True = no PU signal) of a transmitter-hosting channel.

    The trace starts in the stationary phase of the renewal process: busy
    with probability b / (b + m) at a uniform position in the busy run,
    otherwise partway through an idle run whose remainder is again
    geometric (idle runs are memoryless).  Reproducible from ``(seed, channel)``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    rng = np.random.default_rng([*seed_words(seed), channel])
    b, l = cfg.busy_slots, cfg.idle_mean_slots
    m = discrete_idle_mean(l)

    def idle_runs(k):
        return np.maximum(1, np.ceil(rng.exponential(l, k))).astype(np.int64)

    starts_busy = rng.random() < b / (b + m)
    head = b - int(rng.integers(b)) if starts_busy else int(idle_runs(1)[0])
    total, runs = head, []
    while total < horizon:
        k = int((horizon - total) / (b + m)) + 8
        more = idle_runs(k)
        runs.append(more)
        total += int(more.sum()) + k * b
    idle = np.concatenate(runs) if runs else np.empty(0, dtype=np.int64)
    # after a busy head the cycles open with an idle run, otherwise with a busy one
    lengths = np.empty(2 * idle.size + 1, dtype=np.int64)
    lengths[0] = head
    if starts_busy:
        lengths[1::2], lengths[2::2] = idle, b
    else:
        lengths[1::2], lengths[2::2] = b, idle
    states = np.zeros(lengths.size, dtype=bool)
    states[(0 if not starts_busy else 1)::2] = True
    return np.repeat(states, lengths)[:horizon]


def occupied_channels(cfg: PuTrafficConfig, n: int, seed) -> tuple:
    """The ``cfg.transmitters`` distinct channels hosting a primary user."""
    cfg.validate(n)
    rng = np.random.default_rng([*seed_words(seed), 0xC4A7])
    return tuple(sorted(int(c) for c in rng.choice(np.arange(1, n + 1), cfg.transmitters,
                                                   replace=False)))


class ChannelAvailability:
    """available(c, t) over slots [0, horizon) for channels 1..n."""

    def __init__(self, cfg: PuTrafficConfig, n: int, horizon: int, seed,
                 channels: Optional[tuple] = None):
        self.cfg = cfg
        self.n = n
        self.horizon = horizon
        self.occupied = occupied_channels(cfg, n, seed) if channels is None else tuple(channels)
        self.grid = np.ones((n + 1, horizon), dtype=bool)
        for c in self.occupied:
            self.grid[c] = pu_trace(cfg, c, horizon, seed)

    @classmethod
    def always(cls, n: int, horizon: int):
        return cls(PuTrafficConfig(), n, horizon, 0, channels=())

    def available(self, c: int, t: int) -> bool:
        return bool(self.grid[c, t])

    def __call__(self, channels: np.ndarray, start: int) -> np.ndarray:
        """Vectorised lookup for ``channels`` at slots start, start + 1, ..."""
        t = np.arange(start, start + len(channels))
        out = np.zeros(len(channels), dtype=bool)
        inside = t < self.horizon
        out[inside] = self.grid[channels[inside], t[inside]]
        return out

    def busy_fraction(self) -> float:
        if not self.occupied:
            return 0.0
        return float(1 - self.grid[list(self.occupied)].mean())
