"""Wake-up schedules: duty cycle, cyclic rotation and the discovery property.

A schedule is a period-T 0/1 vector; 1 marks an awake slot.  A schedule
*discovers* a peer schedule when every cyclic rotation of the peer shares
at least one awake slot with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

import numpy as np

# Largest period searched exhaustively.
EXHAUSTIVE_LIMIT = 16


class InfeasibleScheduleError(ValueError):
    """No self-discovering schedule with the requested weight was found."""


@dataclass(frozen=True)
class WakeUpSchedule:
    bits: tuple

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("a wake-up schedule needs at least one slot")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("schedule entries must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "WakeUpSchedule":
        """Read the one-line ``11101000`` form."""
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a 0/1 schedule line: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_mask(cls, mask: int, period: int) -> "WakeUpSchedule":
        return cls(tuple((mask >> t) & 1 for t in range(period)))

    def __str__(self):
        return "".join(map(str, self.bits))

    def __len__(self):
        return len(self.bits)

    def __getitem__(self, t):
        return self.bits[t % len(self.bits)]

    @property
    def period(self) -> int:
        return len(self.bits)

    @property
    def awake_count(self) -> int:
        return sum(self.bits)

    @property
    def duty_cycle(self) -> Fraction:
        return duty_cycle(self)

    def array(self) -> np.ndarray:
        return np.array(self.bits, dtype=bool)

    def rotate(self, k: int) -> "WakeUpSchedule":
        return rotate(self, k)


def duty_cycle(x: WakeUpSchedule) -> Fraction:
    return Fraction(x.awake_count, x.period)


def rotate(x: WakeUpSchedule, k: int) -> WakeUpSchedule:
    """Schedule whose slot t is x's slot (t + k) mod T."""
    T = x.period
    return WakeUpSchedule(tuple(x.bits[(t + k) % T] for t in range(T)))


def overlap_count(x: WakeUpSchedule, k: int) -> int:
    """Number of slots in one period where x and rotate(x, k) are both awake."""
    a = x.array()
    return int(np.count_nonzero(a & np.roll(a, -k)))


@dataclass(frozen=True)
class OverlapCertificate:
    """Per-rotation witness slot and overlap count over the joint period."""

    witnesses: tuple
    overlap_counts: tuple

    @property
    def horizon(self) -> int:
        return len(self.witnesses)

    def witness(self, k: int) -> int:
        return self.witnesses[k % self.horizon]

    def overlap(self, k: int) -> int:
        return self.overlap_counts[k % self.horizon]


def verify_discovery(x: WakeUpSchedule, y: WakeUpSchedule) -> Optional[OverlapCertificate]:
    """Check every rotation k of ``y`` against ``x`` over lcm(Tx, Ty) slots.

    Returns a certificate holding, for each k, the first slot t with
    ``x[t] == rotate(y, k)[t] == 1`` and the number of such slots; None if
    some rotation never overlaps.
    """
    L = math.lcm(x.period, y.period)
    t = np.arange(L)
    xa = x.array()[t % x.period]
    ya = y.array()
    witnesses, counts = [], []
    for k in range(L):
        both = xa & ya[(t + k) % y.period]
        if not both.any():
            return None
        witnesses.append(int(np.argmax(both)))
        counts.append(int(np.count_nonzero(both)))
    return OverlapCertificate(tuple(witnesses), tuple(counts))


def self_discovers(x: WakeUpSchedule) -> bool:
    return verify_discovery(x, x) is not None


def _rotl(masks: np.ndarray, k: int, T: int) -> np.ndarray:
    full = (1 << T) - 1
    return ((masks >> k) | (masks << (T - k))) & full


def discovering_masks(T: int, weight: int) -> np.ndarray:
    """All weight-``weight`` bitmasks of length T that self-discover, ascending.

    Bit t of a mask is slot t.  Exhaustive, for T <= EXHAUSTIVE_LIMIT.
    """
    if T > EXHAUSTIVE_LIMIT:
        raise ValueError(f"exhaustive search limited to T <= {EXHAUSTIVE_LIMIT}")
    masks = np.array(
        [sum(1 << p for p in c) for c in combinations(range(T), weight)], dtype=np.int64
    )
    ok = masks != 0
    for k in range(1, T):
        ok &= (masks & _rotl(masks, k, T)) != 0
    return np.sort(masks[ok])


def _lex_key(mask: int, T: int) -> str:
    return "".join(str((mask >> t) & 1) for t in range(T))


def _comb_schedule(T: int, weight: int) -> Optional[list]:
    """A run of c awake slots plus a comb of spacing c; every rotation of the
    run covers a comb tooth, so the pair self-discovers.  Returns the bits or
    None when even the lightest such layout exceeds ``weight``."""
    for c in range(1, T + 1):
        bits = [0] * T
        for t in range(c):
            bits[t] = 1
        for t in range(c - 1, T, c):
            bits[t] = 1
        # wrap-around gap from the last tooth back to the run must be <= c
        last = max(t for t in range(T) if bits[t])
        if T - last > c:
            bits[T - 1] = 1
        if sum(bits) <= weight:
            return bits
    return None


def _repair(bits: list, weight: int, rng: np.random.Generator, steps: int = 20000):
    """Local search: move awake slots to reduce the number of missed rotations."""
    T = len(bits)

    def misses(b):
        a = np.array(b, dtype=bool)
        return sum(1 for k in range(T) if not (a & np.roll(a, -k)).any())

    cur = misses(bits)
    for _ in range(steps):
        if cur == 0:
            return bits
        ones = [t for t in range(T) if bits[t]]
        zeros = [t for t in range(T) if not bits[t]]
        i, j = rng.choice(ones), rng.choice(zeros)
        bits[i], bits[j] = 0, 1
        new = misses(bits)
        if new <= cur:
            cur = new
        else:
            bits[i], bits[j] = 1, 0
    return bits if cur == 0 else None


def generate_schedule(T: int, target_duty) -> WakeUpSchedule:
    """A self-discovering schedule of period T with exactly T * duty awake slots.

    For T <= 16 the search is exhaustive and returns the lexicographically
    smallest passing bit string.  Longer periods start from a run-plus-comb
    layout, pad it with awake slots up to the weight, then fall back to a
    seeded local search.  Raises InfeasibleScheduleError rather than changing
    the weight.
    """
    duty = Fraction(target_duty)
    if T < 1:
        raise ValueError("period must be >= 1")
    if not 0 < duty <= 1:
        raise ValueError(f"duty cycle must lie in (0, 1], got {duty}")
    weight = duty * T
    if weight.denominator != 1:
        raise ValueError(f"T * duty = {weight} is not an integer")
    weight = int(weight)

    if T <= EXHAUSTIVE_LIMIT:
        masks = discovering_masks(T, weight)
        if masks.size == 0:
            raise InfeasibleScheduleError(
                f"no weight-{weight} schedule of period {T} self-discovers "
                f"(minimal feasible weight {minimal_weight(T)})"
            )
        best = min(masks.tolist(), key=lambda m: _lex_key(m, T))
        return WakeUpSchedule.from_mask(best, T)

    bits = _comb_schedule(T, weight)
    if bits is not None:
        for t in range(T):
            if sum(bits) == weight:
                break
            bits[t] = 1
    else:
        bits = [1] * weight + [0] * (T - weight)
        bits = _repair(bits, weight, np.random.default_rng([T, weight]))
    if bits is None:
        raise InfeasibleScheduleError(
            f"no self-discovering weight-{weight} schedule of period {T} found by local search"
        )
    x = WakeUpSchedule(tuple(bits))
    if not self_discovers(x):  # pragma: no cover - construction guarantees it
        raise InfeasibleScheduleError(f"construction failed for T={T}, weight={weight}")
    return x


def minimal_weight(T: int) -> int:
    """Fewest awake slots a self-discovering period-T schedule can have."""
    for w in range(1, T + 1):
        if T <= EXHAUSTIVE_LIMIT:
            if discovering_masks(T, w).size:
                return w
        elif _comb_schedule(T, w) is not None:
            return w
    return T
