"""Base channel-hopping protocols.

Each protocol maps a node ID and a channel count to a sequence.  The
sequence-based ones are built over P, the smallest prime >= N; any channel
label above N is folded back with ``((c - 1) % N) + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import ChSequence, PeriodicSequence, RandomSequence, as_count

PROTOCOLS = ("random", "crseq", "jumpstay", "modular")


@dataclass(frozen=True, order=True)
class NodeId:
    id: int

    def __post_init__(self):
        if self.id < 1:
            raise ValueError(f"node IDs are positive, got {self.id}")


def _node(node) -> int:
    return node.id if isinstance(node, NodeId) else int(node)


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    return all(m % d for d in range(3, math.isqrt(m) + 1, 2))


def next_prime(n: int) -> int:
    """Smallest prime >= n (2 for n <= 2)."""
    m = max(n, 2)
    while not is_prime(m):
        m += 1
    return m


def _fold(channels: np.ndarray, n: int) -> np.ndarray:
    return (channels - 1) % n + 1



def random_ch(n, seed) -> RandomSequence:
    """Random CH: no period, every slot uniform over the channels."""
    return RandomSequence(as_count(n), seed)


def jumpstay(n, node) -> PeriodicSequence:
    """Jump-stay hopping with period 3P.

    A round is 2P "jump" slots walking the channels with a node-specific step
    from a node-specific start, followed by P "stay" slots parked on the step
    value.
    """
    n, i = as_count(n), _node(node)
    if n == 1:
        return PeriodicSequence([1], 1, name="jumpstay")
    p = next_prime(n)
    step = (i - 1) % p + 1
    start = (i * 31) % p + 1
    u = np.arange(2 * p)
    jump = (start - 1 + u * step) % p + 1
    stay = np.full(p, step)
    return PeriodicSequence(_fold(np.concatenate([jump, stay]), n), n, name=f"jumpstay[{i}]")


def crseq(n, node=1) -> PeriodicSequence:
    """CRSEQ-style sequence with period P(3P - 1).

    Subsequence j (j = 0..P-1) sweeps 2P-1 channels starting at the j-th
    triangle number, then stays P slots on channel j + 1.  The sequence does
    not depend on the node ID.
    """
    n = as_count(n)
    _node(node)
    if n == 1:
        return PeriodicSequence([1], 1, name="crseq")
    p = next_prime(n)
    parts = []
    u = np.arange(2 * p - 1)
    for j in range(p):
        tri = j * (j + 1) // 2
        parts.append((tri + u) % p + 1)
        parts.append(np.full(p, j % p + 1))
    return PeriodicSequence(_fold(np.concatenate(parts), n), n, name="crseq")


def modular_baseline(n, node) -> PeriodicSequence:
    """Slot t hops to ((t // P) * t + id) mod P, plus one; period P^2."""
    n, i = as_count(n), _node(node)
    if n == 1:
        return PeriodicSequence([1], 1, name="modular")
    p = next_prime(n)
    t = np.arange(p * p)
    return PeriodicSequence(_fold(((t // p) * t + i) % p + 1, n), n, name=f"modular[{i}]")


_BUILDERS = {"jumpstay": jumpstay, "crseq": crseq, "modular": modular_baseline}


def nominal_period(name: str, n: int) -> Optional[int]:
    """Period the construction repeats with (not necessarily minimal)."""
    if name == "random":
        return None
    if n == 1:
        return 1
    p = next_prime(n)
    return {"jumpstay": 3 * p, "crseq": p * (3 * p - 1), "modular": p * p}[name]


def shortest_period(values) -> int:
    """Shortest p with values[t] == values[t + p] wherever both exist.

    The last entry of the prefix function gives it in linear time.
    """
    s = list(values)
    if not s:
        raise ValueError("empty sample")
    pi = [0] * len(s)
    k = 0
    for i in range(1, len(s)):
        c = s[i]
        while k and s[k] != c:
            k = pi[k - 1]
        if s[k] == c:
            k += 1
        pi[i] = k
    return len(s) - pi[-1]


def detect_period(seq: ChSequence, max_period: int) -> Optional[int]:
    """Smallest tau <= max_period that repeats over the first 3 * max_period slots."""
    if seq.randomized:
        raise ValueError("period detection needs a deterministic sequence")
    if max_period < 1:
        raise ValueError("max_period must be >= 1")
    tau = shortest_period(seq.window(0, 3 * max_period).tolist())
    return tau if tau <= max_period else None


@dataclass(frozen=True)
class ProtocolDescriptor:
    """A named protocol bound to a channel count."""

    name: str
    n: int

    def __post_init__(self):
        if self.name not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.name!r}; choose from {PROTOCOLS}")
        as_count(self.n)

    def with_n(self, n: int) -> "ProtocolDescriptor":
        return ProtocolDescriptor(self.name, n)

    def build(self, node, seed=0) -> ChSequence:
        if self.name == "random":
            return random_ch(self.n, seed)
        return _BUILDERS[self.name](self.n, node)

    def period(self) -> Optional[int]:
        """Period shared by every node's sequence, by construction."""
        return protocol_period(self.name, self.n)

    def period_fn(self, n: int) -> Optional[int]:
        return protocol_period(self.name, n)


@lru_cache(maxsize=None)
def protocol_period(name: str, n: int) -> Optional[int]:
    """lcm of the detected periods over every distinct node sequence.

    Node sequences depend on the ID only through ``id mod P`` so IDs 1..P
    cover all of them.
    """
    nominal = nominal_period(name, n)
    if nominal is None:
        return None
    ids = [1] if name == "crseq" else range(1, next_prime(n) + 1)
    tau = 1
    for i in ids:
        tau = math.lcm(tau, detect_period(_BUILDERS[name](n, i), nominal))
    return tau
