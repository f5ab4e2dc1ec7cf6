"""Slot/channel domain types, channel-hopping sequences and rendezvous detection.

Channels are labelled 1..N. Time is slotted and slot boundaries of two nodes
are assumed aligned, so a clock drift is an integer number of slots.

A drift ``sigma`` between sequences ``a`` and ``b`` means ``a``'s clock is
``sigma`` slots behind ``b``'s: a rendezvous happens at ``a``'s slot ``t`` when
``a[t] == b[t + sigma]``.  Rendezvous slots are numbered on the clock that is
behind (``a``'s clock when ``sigma > 0``, otherwise ``b``'s), whose slot 0 is
the moment both nodes are hopping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

UNIFORM = "uniform"
ADVERSARIAL = "adversarial"
POLICIES = (UNIFORM, ADVERSARIAL)

# Slots per block of a counter-based random stream.
RANDOM_BLOCK = 4096
# Slots examined per step when scanning for a first rendezvous.
SCAN_CHUNK = 2048


@dataclass(frozen=True, order=True)
class ChannelId:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"channel labels start at 1, got {self.index}")


@dataclass(frozen=True)
class ChannelSet:
    """The sensible channel set {1, ..., n}."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"channel count must be >= 1, got {self.n}")

    def __contains__(self, c) -> bool:
        c = c.index if isinstance(c, ChannelId) else c
        return 1 <= c <= self.n

    def __iter__(self):
        return (ChannelId(c) for c in range(1, self.n + 1))

    def __len__(self):
        return self.n


def as_count(n) -> int:
    """Accept either a ChannelSet or a plain int channel count."""
    n = n.n if isinstance(n, ChannelSet) else int(n)
    if n < 1:
        raise ValueError(f"channel count must be >= 1, got {n}")
    return n


@dataclass(frozen=True)
class SlotIndex:
    t: int

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"slot index must be >= 0, got {self.t}")


@dataclass(frozen=True)
class ClockDrift:
    sigma: int = 0


def _drift(d) -> int:
    return d.sigma if isinstance(d, ClockDrift) else int(d)


def _slot(t) -> int:
    return t.t if isinstance(t, SlotIndex) else int(t)


def random_channels(seed: Sequence[int], n: int, start: int, length: int) -> np.ndarray:
    """Uniform channels in [1, n] for slots [start, start + length) of stream ``seed``.

    The stream is counter based: slot ``t`` lives in block ``t // RANDOM_BLOCK``
    whose generator is keyed by ``(*seed, block)``, so any window can be
    regenerated without replaying history.
    """
    if length <= 0:
        return np.empty(0, dtype=np.int64)
    first, last = start // RANDOM_BLOCK, (start + length - 1) // RANDOM_BLOCK
    blocks = [
        np.random.default_rng([*seed, b]).integers(1, n + 1, RANDOM_BLOCK)
        for b in range(first, last + 1)
    ]
    joined = np.concatenate(blocks) if len(blocks) > 1 else blocks[0]
    off = start - first * RANDOM_BLOCK
    return joined[off:off + length]


def seed_words(seed) -> tuple:
    """Normalise an int or a tuple of ints into a tuple of non-negative ints."""
    if isinstance(seed, (int, np.integer)):
        seed = (int(seed),)
    words = tuple(int(s) for s in seed)
    if any(w < 0 for w in words):
        raise ValueError("seed words must be non-negative")
    return words


class ChSequence:
    """A node's map from slot index to channel.

    Subclasses implement :meth:`window`.  Randomized sequences additionally
    report which slots were drawn at random (:meth:`random_mask`), which the
    adversarial policy uses to rule those slots out as rendezvous.
    """

    n: int
    period: Optional[int] = None
    randomized: bool = False

    def window(self, start: int, length: int) -> np.ndarray:
        raise NotImplementedError

    def random_mask(self, start: int, length: int) -> np.ndarray:
        return np.zeros(length, dtype=bool)

    def at(self, slots) -> np.ndarray:
        """Channels at an arbitrary array of slot indices."""
        slots = np.asarray(slots, dtype=np.int64)
        if slots.size == 0:
            return np.empty(0, dtype=np.int64)
        lo = int(slots.min())
        return self.window(lo, int(slots.max()) - lo + 1)[slots - lo]

    def channel_at(self, t) -> int:
        t = _slot(t)
        if t < 0:
            raise ValueError("slot index must be >= 0")
        return int(self.window(t, 1)[0])

    def __getitem__(self, t) -> int:
        return self.channel_at(t)

    def take(self, length: int) -> list:
        return self.window(0, length).tolist()

    @property
    def kind(self) -> str:
        return "randomized" if self.randomized else "deterministic"


class PeriodicSequence(ChSequence):
    """Deterministic sequence repeating ``table`` forever."""

    def __init__(self, table: Iterable[int], n: int, name: str = "table"):
        self.table = np.asarray(list(table), dtype=np.int64)
        if self.table.size == 0:
            raise ValueError("empty sequence table")
        self.n = as_count(n)
        if self.table.min() < 1 or self.table.max() > self.n:
            raise ValueError(f"channels must lie in [1, {self.n}]")
        self.table.setflags(write=False)
        self.period = int(self.table.size)
        self.name = name

    def window(self, start: int, length: int) -> np.ndarray:
        return self.table[np.arange(start, start + length) % self.period]

    def at(self, slots) -> np.ndarray:
        return self.table[np.asarray(slots, dtype=np.int64) % self.period]

    def __repr__(self):
        return f"PeriodicSequence({self.name}, n={self.n}, period={self.period})"


class RandomSequence(ChSequence):
    """Random channel hopping: every slot i.i.d. uniform on [1, n]."""

    randomized = True

    def __init__(self, n, seed):
        self.n = as_count(n)
        self.seed = seed_words(seed)

    def window(self, start: int, length: int) -> np.ndarray:
        return random_channels(self.seed, self.n, start, length)

    def random_mask(self, start: int, length: int) -> np.ndarray:
        return np.ones(length, dtype=bool)

    def __repr__(self):
        return f"RandomSequence(n={self.n}, seed={self.seed})"


@dataclass(frozen=True)
class RendezvousSlotSet:
    slots: tuple
    channels: frozenset

    def __len__(self):
        return len(self.slots)

    @property
    def first(self) -> Optional[int]:
        return self.slots[0] if self.slots else None


def _aligned(a: ChSequence, b: ChSequence, sigma: int, start: int, length: int):
    """Channel windows of ``a`` and ``b`` on the left-behind clock."""
    if sigma > 0:
        return a.window(start, length), b.window(start + sigma, length), sigma, 0
    return a.window(start - sigma, length), b.window(start, length), 0, -sigma


def match_mask(a: ChSequence, b: ChSequence, sigma: int, start: int, length: int,
               policy: str = UNIFORM, available=None):
    """Boolean rendezvous mask and channel window over ``length`` slots.

    ``available`` optionally maps (channels, start) to a boolean array of
    channels that are free of primary users at those slots.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown random policy {policy!r}")
    ca, cb, off_a, off_b = _aligned(a, b, sigma, start, length)
    hit = ca == cb
    if policy == ADVERSARIAL:
        # Random slots pick a channel different from the peer's, so only
        # slots deterministic on both sides can meet.
        hit &= ~a.random_mask(start + off_a, length)
        hit &= ~b.random_mask(start + off_b, length)
    if available is not None:
        hit &= available(ca, start)
    return hit, ca


def rendezvous_slots(a: ChSequence, b: ChSequence, drift=0, horizon=1,
                     policy: str = UNIFORM, available=None) -> RendezvousSlotSet:
    """Every slot in [0, horizon) where ``a`` and ``b`` meet under ``drift``."""
    sigma, horizon = _drift(drift), _slot(horizon)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    slots, channels = [], set()
    for start in range(0, horizon, SCAN_CHUNK):
        length = min(SCAN_CHUNK, horizon - start)
        hit, ca = match_mask(a, b, sigma, start, length, policy, available)
        idx = np.flatnonzero(hit)
        slots.extend((idx + start).tolist())
        channels.update(ca[idx].tolist())
    return RendezvousSlotSet(tuple(slots), frozenset(channels))


def first_rendezvous(a: ChSequence, b: ChSequence, drift=0, horizon=1,
                     policy: str = UNIFORM, available=None) -> Optional[int]:
    """Smallest rendezvous slot below ``horizon``, or None."""
    sigma, horizon = _drift(drift), _slot(horizon)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    chunk = 64
    start = 0
    while start < horizon:
        length = min(chunk, horizon - start)
        hit, _ = match_mask(a, b, sigma, start, length, policy, available)
        if hit.any():
            return start + int(np.argmax(hit))
        start += length
        chunk = min(chunk * 2, SCAN_CHUNK)
    return None


def joint_period(a: ChSequence, b: ChSequence) -> Optional[int]:
    """lcm of the two periods, None if either sequence is aperiodic."""
    if a.period is None or b.period is None:
        return None
    return math.lcm(a.period, b.period)


# --- sequence dump format -------------------------------------------------

def dump_sequence(seq: ChSequence, slots: int, period="auto") -> str:
    """Text dump: a ``# period=<p|none> n=<N>`` header then ``t<TAB>channel`` lines."""
    if period == "auto":
        period = seq.period
    header = f"# period={'none' if period is None else period} n={seq.n}"
    body = [f"{t}\t{c}" for t, c in enumerate(seq.window(0, slots).tolist())]
    return "\n".join([header, *body]) + "\n"


def parse_sequence_dump(text: str):
    """Inverse of :func:`dump_sequence`; returns (channels, period, n)."""
    period = n = None
    channels = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = dict(f.split("=", 1) for f in line[1:].split() if "=" in f)
            p = fields.get("period", "none")
            period = None if p == "none" else int(p)
            n = int(fields["n"]) if "n" in fields else None
            continue
        t, c = line.split("\t")
        if int(t) != len(channels):
            raise ValueError(f"line {lineno}: expected slot {len(channels)}, got {t}")
        channels.append(int(c))
    return channels, period, n
