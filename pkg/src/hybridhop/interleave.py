"""Hybrid channel hopping: a base sequence interleaved with random hopping.

In awake slots of the wake-up schedule a node plays the next unused slot of
its base sequence; in asleep slots it hops to a uniformly random channel.
The base protocol runs over a padded channel count N' >= N chosen so that
its period is coprime with the schedule's awake count.  Labels above N are
aliases of real channels.  With ``alias_mode="fixed"`` (default) each alias
stands for one real channel drawn once from a protocol-wide seed, so every
node resolves it the same way; with ``alias_mode="fresh"`` an alias is
replaced by a fresh uniform draw each time it is emitted.
"""

from __future__ import annotations

import math
import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import UNIFORM, ADVERSARIAL, ChSequence, as_count, random_channels, seed_words
from .protocols import ProtocolDescriptor, protocol_period
from .wakeup import WakeUpSchedule, self_discovers

# Largest increase over N tried by the padding search.
PAD_LIMIT = 64

FIXED = "fixed"
FRESH = "fresh"
ALIAS_MODES = (FIXED, FRESH)


class PaddingError(ValueError):
    pass


@dataclass(frozen=True)
class PaddedChannelSet:
    n_original: int
    n_padded: int

    @property
    def aliases(self) -> range:
        return range(self.n_original + 1, self.n_padded + 1)

    def alias_table(self, alias_seed: int = 0) -> np.ndarray:
        """Lookup from padded label (index 0 unused) to real channel."""
        table = np.arange(self.n_padded + 1, dtype=np.int64)
        k = self.n_padded - self.n_original
        if k:
            rng = np.random.default_rng([alias_seed, self.n_original, self.n_padded])
            table[self.n_original + 1:] = rng.integers(1, self.n_original + 1, k)
        return table


def pad_channels(n, proto, x: WakeUpSchedule) -> PaddedChannelSet:
    """Smallest N' >= N whose constructed period is coprime with x's awake count."""
    n = as_count(n)
    name = proto.name if isinstance(proto, ProtocolDescriptor) else str(proto)
    awake = x.awake_count
    if awake < 1:
        raise PaddingError("schedule has no awake slot")
    for m in range(n, n + PAD_LIMIT + 1):
        tau = protocol_period(name, m)
        if tau is None or math.gcd(tau, awake) == 1:
            return PaddedChannelSet(n, m)
    raise PaddingError(
        f"no channel count in [{n}, {n + PAD_LIMIT}] gives a {name} period coprime with {awake}"
    )


def base_index_at(x: WakeUpSchedule, t):
    """Base-sequence slot consumed at local slot t (meaningful on awake slots).

    Equals the number of awake slots strictly before t.
    """
    T, A = x.period, x.awake_count
    prefix = np.concatenate([[0], np.cumsum(x.bits)])
    t = np.asarray(t)
    return (t // T) * A + prefix[t % T]


class HybridSequence(ChSequence):
    """Output of the interleaving algorithm for one node."""

    randomized = True

    def __init__(self, base: ChSequence, schedule: WakeUpSchedule, n: int, seed,
                 alias_mode: str = FIXED, alias_seed: int = 0):
        if base.randomized:
            raise ValueError("the base of a hybrid sequence must be deterministic")
        if alias_mode not in ALIAS_MODES:
            raise ValueError(f"unknown alias mode {alias_mode!r}")
        self.base = base
        self.alias_mode = alias_mode
        self._alias = PaddedChannelSet(as_count(n), max(base.n, as_count(n))).alias_table(alias_seed)
        self.schedule = schedule
        self.n = as_count(n)
        self.seed = seed_words(seed)
        self._awake = schedule.array()
        self._prefix = np.concatenate([[0], np.cumsum(schedule.bits)])
        A, T = schedule.awake_count, schedule.period
        # Deterministic part repeats once both the schedule and the consumed
        # base slots realign.
        if base.period is None:
            self.period = None
        elif A == 0:
            self.period = T
        else:
            self.period = T * base.period // math.gcd(base.period, A)

    def _parts(self, start: int, length: int):
        t = np.arange(start, start + length)
        T, A = self.schedule.period, self.schedule.awake_count
        awake = self._awake[t % T]
        idx = (t // T) * A + self._prefix[t % T]
        base_ch = np.zeros(length, dtype=np.int64)
        if awake.any():
            base_ch[awake] = self.base.at(idx[awake])
        if self.alias_mode == FIXED:
            base_ch = self._alias[base_ch]
            return base_ch, ~awake
        return base_ch, ~awake | (base_ch > self.n)

    def window(self, start: int, length: int) -> np.ndarray:
        base_ch, rand = self._parts(start, length)
        if rand.any():
            draws = random_channels(self.seed, self.n, start, length)
            base_ch = np.where(rand, draws, base_ch)
        return base_ch

    def random_mask(self, start: int, length: int) -> np.ndarray:
        return self._parts(start, length)[1]

    def awake_mask(self, start: int, length: int) -> np.ndarray:
        return self._awake[np.arange(start, start + length) % self.schedule.period]

    def base_consumed(self, start: int, length: int) -> int:
        """Base slots consumed by slots [start, start + length)."""
        return int(self.awake_mask(start, length).sum())

    def __repr__(self):
        return f"HybridSequence({self.base!r}, schedule={self.schedule}, n={self.n})"


@dataclass(frozen=True)
class HybridProtocol:
    """A node's hybrid configuration: base protocol, schedule, padding and seed."""

    base: ProtocolDescriptor
    node: int
    schedule: WakeUpSchedule
    padded: Optional[PaddedChannelSet] = None
    seed: tuple = (0,)
    random_policy: str = UNIFORM
    alias_mode: str = FIXED
    alias_seed: int = 0

    def __post_init__(self):
        if self.random_policy not in (UNIFORM, ADVERSARIAL):
            raise ValueError(f"unknown random policy {self.random_policy!r}")
        if self.alias_mode not in ALIAS_MODES:
            raise ValueError(f"unknown alias mode {self.alias_mode!r}")
        if self.padded is None:
            object.__setattr__(self, "padded", pad_channels(self.base.n, self.base, self.schedule))
        if self.padded.n_original != self.base.n:
            raise ValueError("padding was computed for a different channel count")
        tau = self.tau
        if tau is not None and math.gcd(tau, self.schedule.awake_count) != 1:
            raise ValueError(
                f"base period {tau} shares a factor with awake count {self.schedule.awake_count}"
            )
        object.__setattr__(self, "seed", seed_words(self.seed))

    @classmethod
    def build(cls, base: str, n: int, node: int, schedule: WakeUpSchedule, seed=0,
              **kwargs) -> "HybridProtocol":
        return cls(ProtocolDescriptor(base, n), node, schedule, seed=seed, **kwargs)

    @property
    def padded_base(self) -> ProtocolDescriptor:
        return self.base.with_n(self.padded.n_padded)

    @property
    def tau(self) -> Optional[int]:
        return self.padded_base.period()

    @property
    def bound(self) -> Optional[int]:
        """Guaranteed rendezvous bound tau * T."""
        return None if self.tau is None else self.tau * self.schedule.period

    def base_sequence(self) -> ChSequence:
        return self.padded_base.build(self.node, seed=self.seed)

    def sequence(self) -> ChSequence:
        return hybrid_sequence(self)

    def with_seed(self, seed) -> "HybridProtocol":
        return dataclasses.replace(self, seed=seed_words(seed))


def hybrid_sequence(h: HybridProtocol) -> ChSequence:
    base = h.base_sequence()
    if base.randomized:
        # A random base interleaved with random hopping is random hopping.
        return base
    return HybridSequence(base, h.schedule, h.base.n, h.seed, h.alias_mode, h.alias_seed)


def awake_subsequence_offsets(schedule: WakeUpSchedule, tau: int, k: int) -> list:
    """(slot, base index) pairs at common-awake slots t0 + a*T, a = 0..tau-1.

    ``t0`` ranges over the slots in one schedule period where both the
    schedule and its rotation by ``k`` are awake.  Indices are taken mod tau.
    Raises ValueError if rotation ``k`` has no common awake slot.
    """
    T = schedule.period
    bits = schedule.bits
    witnesses = [t for t in range(T) if bits[t] and bits[(t + k) % T]]
    if not witnesses:
        raise ValueError(f"rotation {k} shares no awake slot with the schedule")
    out = []
    for t0 in witnesses:
        for a in range(tau):
            slot = t0 + a * T
            out.append((slot, int(base_index_at(schedule, slot)) % tau))
    out.sort()
    return out


def hybrid_awake_offsets(h: HybridProtocol, k: int) -> list:
    if not self_discovers(h.schedule):
        raise ValueError("schedule does not self-discover")
    return awake_subsequence_offsets(h.schedule, h.tau, k)
