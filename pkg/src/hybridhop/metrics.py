"""Time-to-rendezvous metrics: MTTR, ATTR and rendezvous channel diversity.

TTR is the 0-based index of the first rendezvous slot (``ttr0``).  The
1-based count ``ttr1 = ttr0 + 1`` is what "the average TTR of random
hopping is N" refers to, so reports carry both.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

import numpy as np

from .core import UNIFORM, ChSequence, first_rendezvous, joint_period, rendezvous_slots
from .interleave import base_index_at
from .wakeup import WakeUpSchedule, overlap_count

INF = math.inf


def _domain(drift_domain) -> list:
    drifts = list(drift_domain)
    if not drifts:
        raise ValueError("drift domain is empty")
    return drifts


def full_drift_domain(a: ChSequence, b: ChSequence) -> range:
    """Drifts (-L, L) for joint period L; enough for any pair of periodic sequences.

    Within one sign a drift only matters mod L, but slots are counted on the
    clock that is behind, so sigma and sigma - L count the same meetings
    from different origins and both signs are needed for a worst case.
    """
    L = joint_period(a, b)
    if L is None:
        raise ValueError("both sequences need a period to enumerate drifts")
    return range(1 - L, L)


def per_drift(a, b, drift_domain, horizon, policy=UNIFORM) -> dict:
    """drift -> (first rendezvous or None, frozenset of rendezvous channels)."""
    out = {}
    for d in _domain(drift_domain):
        r = rendezvous_slots(a, b, d, horizon, policy)
        out[d] = (r.first, r.channels)
    return out


def mttr(a, b, drift_domain, horizon, policy=UNIFORM):
    """Worst first-rendezvous slot over the drifts; ``inf`` if any drift never meets."""
    worst = 0
    for d in _domain(drift_domain):
        f = first_rendezvous(a, b, d, horizon, policy)
        if f is None:
            return INF
        worst = max(worst, f)
    return worst


def diversity_rate(a, b, drift_domain, horizon, n: Optional[int] = None,
                   policy=UNIFORM) -> Fraction:
    """min over drifts of (#distinct rendezvous channels) / n."""
    n = a.n if n is None else n
    counts = [len(rendezvous_slots(a, b, d, horizon, policy).channels)
              for d in _domain(drift_domain)]
    return Fraction(min(counts), n)


@dataclass(frozen=True)
class AttrEstimate:
    mean: float          # ttr0 sample mean over uncensored trials
    ci95: float
    trials: int
    censored: int
    samples: tuple = field(default=(), repr=False)

    @property
    def mean_ttr1(self) -> float:
        return self.mean + 1

    @property
    def censored_fraction(self) -> float:
        return self.censored / self.trials

    @property
    def max(self):
        if self.censored:
            return INF
        return max(self.samples) if self.samples else INF


def _ci95(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(1.96 * values.std(ddof=1) / math.sqrt(values.size))


def attr(make_a: Callable, make_b: Callable, drift_domain, trials: int, horizon: int,
         seed: int = 0, policy=UNIFORM) -> AttrEstimate:
    """Monte Carlo ATTR with a uniformly drawn drift and fresh seeds per trial.

    ``make_a`` / ``make_b`` take a seed tuple and return a sequence.  Trial
    ``i`` uses seeds ``(seed, i, 0)`` and ``(seed, i, 1)`` and draws its drift
    from ``default_rng([seed, i])``, so any trial can be replayed alone.
    Censored trials (no rendezvous within ``horizon``) are excluded from the
    mean and counted separately.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    drifts = _domain(drift_domain)
    values, censored = [], 0
    for i in range(trials):
        d = drifts[int(np.random.default_rng([seed, i]).integers(len(drifts)))]
        f = first_rendezvous(make_a((seed, i, 0)), make_b((seed, i, 1)), d, horizon, policy)
        if f is None:
            censored += 1
        else:
            values.append(f)
    if censored:
        warnings.warn(f"{censored}/{trials} trials found no rendezvous within {horizon} slots")
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean()) if arr.size else INF
    return AttrEstimate(mean, _ci95(arr), trials, censored, tuple(values))


def predict_hybrid_attr(base_attr: float, overlap: int, period: int, n: int) -> float:
    """Mixture estimate of hybrid ATTR: (B/T) * base + (1 - B/T) * N."""
    if not 0 <= overlap <= period:
        raise ValueError("overlap count must lie in [0, T]")
    share = Fraction(overlap, period)
    return float(share * Fraction(base_attr) + (1 - share) * n)


def effective_base_drifts(schedule: WakeUpSchedule, k: int, tau: int) -> list:
    """Base-sequence drift seen at each common awake slot of rotation ``k``.

    With the peer ``k`` slots ahead, the two nodes play base slots
    ``c1 = idx(t0)`` and ``c2 = idx(t0 + k)`` at a common awake slot t0; the
    base pair then behaves as if drifted by ``c2 - c1`` (mod tau).
    """
    T = schedule.period
    bits = schedule.bits
    out = []
    for t0 in range(T):
        if bits[t0] and bits[(t0 + k) % T]:
            c1 = int(base_index_at(schedule, t0))
            c2 = int(base_index_at(schedule, t0 + k))
            out.append((c2 - c1) % tau)
    return out


def base_expected_ttr(base_a: ChSequence, base_b: ChSequence, schedule: WakeUpSchedule,
                      k: int, ttr1: bool = True) -> float:
    """Base-pair TTR averaged over the effective drifts of hybrid drift ``k``."""
    L = joint_period(base_a, base_b)
    drifts = effective_base_drifts(schedule, k, L)
    if not drifts:
        raise ValueError(f"rotation {k} shares no awake slot")
    ttrs = []
    for d in drifts:
        f = first_rendezvous(base_a, base_b, d, L)
        if f is None:
            raise ValueError(f"base pair never meets at drift {d}")
        ttrs.append(f + (1 if ttr1 else 0))
    return float(np.mean(ttrs))


@dataclass
class MetricReport:
    mttr: float
    attr_ttr0: float
    ci95: float
    diversity_rate: Fraction
    censored_fraction: float = 0.0
    trials: int = 0
    per_drift: dict = field(default_factory=dict)

    @property
    def attr_ttr1(self) -> float:
        return self.attr_ttr0 + 1

    def to_dict(self) -> dict:
        return {
            "mttr": None if self.mttr == INF else self.mttr,
            "mttr_infinite": self.mttr == INF,
            "attr_ttr0": self.attr_ttr0,
            "attr_ttr1": self.attr_ttr1,
            "ci95": self.ci95,
            "diversity_rate": str(self.diversity_rate),
            "diversity_rate_float": float(self.diversity_rate),
            "censored_fraction": self.censored_fraction,
            "trials": self.trials,
            "per_drift": [
                {"drift": d, "first_rendezvous": f, "channels": sorted(c)}
                for d, (f, c) in sorted(self.per_drift.items())
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def evaluate_pair(a: ChSequence, b: ChSequence, drift_domain: Optional[Iterable] = None,
                  horizon: Optional[int] = None, n: Optional[int] = None,
                  policy=UNIFORM) -> MetricReport:
    """Exhaustive metrics over a drift domain (both signs of one joint period by default).

    ATTR here is the mean first-rendezvous slot over the enumerated drifts,
    each weighted equally; drifts that never meet make ATTR undefined.
    """
    if drift_domain is None:
        drift_domain = full_drift_domain(a, b)
    if horizon is None:
        horizon = joint_period(a, b)
    table = per_drift(a, b, drift_domain, horizon, policy)
    firsts = [f for f, _ in table.values()]
    met = np.array([f for f in firsts if f is not None], dtype=float)
    censored = len(firsts) - met.size
    n = a.n if n is None else n
    return MetricReport(
        mttr=INF if censored else int(met.max()),
        attr_ttr0=float(met.mean()) if met.size else INF,
        ci95=0.0,
        diversity_rate=Fraction(min(len(c) for _, c in table.values()), n),
        censored_fraction=censored / len(firsts),
        trials=len(firsts),
        per_drift=table,
    )


__all__ = [
    "AttrEstimate", "MetricReport", "attr", "base_expected_ttr", "diversity_rate",
    "effective_base_drifts", "evaluate_pair", "full_drift_domain", "mttr", "overlap_count",
    "per_drift", "predict_hybrid_attr",
]
