"""Pairwise rendezvous experiments under primary-user traffic.

A cell of an experiment fixes the base protocol, the wake-up schedule (or
none, meaning the plain base protocol) and the PU traffic.  Each of
``n_pairs`` node pairs runs ``trials_per_pair`` trials; a trial draws a clock
drift uniformly over one joint period, fresh random-hopping seeds and a fresh
PU realisation, then records the first slot where both nodes sit on the same
PU-free channel.

Trial randomness is keyed by ``(seed, pair, trial)`` only, so every cell of
a sweep sees the same drift stream and PU draws (common random numbers).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import first_rendezvous, joint_period, match_mask
from .interleave import FIXED, HybridProtocol, PaddingError
from .metrics import INF
from .protocols import ProtocolDescriptor
from .pumodel import ChannelAvailability, PuTrafficConfig
from .wakeup import InfeasibleScheduleError, WakeUpSchedule, generate_schedule

PAPER_DUTY_CYCLES = (Fraction(5, 14), Fraction(7, 14), Fraction(9, 14), Fraction(13, 14),
                     Fraction(1))
PAPER_INTENSITIES = (0.25, 0.5)
# Search horizon as a multiple of the cell's guaranteed bound.
HORIZON_FACTOR = 8


@dataclass(frozen=True)
class ExperimentConfig:
    n_channels: int = 11
    n_pairs: int = 20
    base: str = "crseq"
    duty: Fraction = Fraction(1)
    schedule_period: int = 14
    schedule: Optional[WakeUpSchedule] = None
    pu: PuTrafficConfig = field(default_factory=PuTrafficConfig)
    trials_per_pair: int = 100
    horizon: Optional[int] = None
    seed: int = 0
    slot_ms: float = 10.0
    alias_mode: str = FIXED

    def __post_init__(self):
        object.__setattr__(self, "duty", Fraction(self.duty))
        if self.n_pairs < 1 or self.trials_per_pair < 1:
            raise ValueError("need at least one pair and one trial")
        self.pu.validate(self.n_channels)
        ProtocolDescriptor(self.base, self.n_channels)

    @property
    def pure_base(self) -> bool:
        return self.schedule is None and self.duty == 1

    def nodes(self, pair_id: int) -> tuple:
        return 2 * pair_id + 1, 2 * pair_id + 2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["duty"] = str(self.duty)
        d["schedule"] = None if self.schedule is None else str(self.schedule)
        return d


class Cell:
    """Resolved setup of one configuration: schedule, padding and node sequences."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        if cfg.pure_base:
            self.schedule = None
        elif cfg.schedule is not None:
            self.schedule = cfg.schedule
        else:
            self.schedule = generate_schedule(cfg.schedule_period, cfg.duty)
        desc = ProtocolDescriptor(cfg.base, cfg.n_channels)
        if self.schedule is None:
            self.n_padded = cfg.n_channels
            self.tau = desc.period()
            self.T = 1
        else:
            # raises PaddingError when no padded count works
            h = HybridProtocol(desc, 1, self.schedule, alias_mode=cfg.alias_mode)
            self.n_padded = h.padded.n_padded
            self.tau = h.tau
            self.T = self.schedule.period
            self._padded = h.padded
        self._desc = desc

    @property
    def bound(self) -> Optional[int]:
        return None if self.tau is None else self.tau * self.T

    @property
    def horizon(self) -> int:
        if self.cfg.horizon is not None:
            return self.cfg.horizon
        return HORIZON_FACTOR * (self.bound or 64 * self.cfg.n_channels)

    def sequences(self, pair_id: int, trial_id: int):
        cfg = self.cfg
        out = []
        for side, node in enumerate(cfg.nodes(pair_id)):
            seed = (cfg.seed, pair_id, trial_id, side)
            if self.schedule is None:
                out.append(self._desc.build(node, seed=seed))
            else:
                h = HybridProtocol(self._desc, node, self.schedule, self._padded, seed,
                                   alias_mode=cfg.alias_mode)
                out.append(h.sequence())
        return out


@dataclass(frozen=True)
class TrialOutcome:
    pair: int
    trial: int
    drift: int
    ttr0: Optional[int]
    channels: frozenset

    @property
    def censored(self) -> bool:
        return self.ttr0 is None


def run_pair(cfg: ExperimentConfig, pair_id: int, trial_id: int,
             cell: Optional[Cell] = None) -> TrialOutcome:
    """One trial: first PU-free rendezvous slot (None when censored).

    ``channels`` collects the PU-free rendezvous channels within the cell's
    guaranteed bound (one base period for the plain protocol), used for the
    diversity rate.
    """
    cell = cell or Cell(cfg)
    a, b = cell.sequences(pair_id, trial_id)
    rng = np.random.default_rng([cfg.seed, pair_id, trial_id, 0xD1F7])
    window = joint_period(a, b)
    drift = int(rng.integers(window)) if window else 0
    horizon = cell.horizon
    avail = None
    if cfg.pu.transmitters:
        avail = ChannelAvailability(cfg.pu, cfg.n_channels, horizon,
                                    (cfg.seed, pair_id, trial_id))
    ttr = first_rendezvous(a, b, drift, horizon, available=avail)
    span = min(cell.bound or horizon, horizon)
    hit, ca = match_mask(a, b, drift, 0, span, available=avail)
    return TrialOutcome(pair_id, trial_id, drift, ttr, frozenset(ca[hit].tolist()))


@dataclass
class CellSummary:
    duty: Fraction
    intensity: float
    schedule: Optional[str]
    n_padded: int
    bound: Optional[int]
    trials: int
    censored: int
    attr_ttr0: float
    ci95: float
    mttr: float
    diversity_rate: Fraction
    diversity_mean: float
    busy_fraction: float
    per_pair: list = field(default_factory=list)
    skipped: Optional[str] = None
    n_channels: int = 0
    ttr_samples: np.ndarray = field(default=None, repr=False)
    diversity_samples: np.ndarray = field(default=None, repr=False)

    def interval(self, metric: str, reps: int = 2000, seed: int = 0) -> tuple:
        """95% interval for 'attr' (normal), 'mttr' or 'diversity' (percentile bootstrap)."""
        if metric == "attr":
            return self.attr_ttr1 - self.ci95, self.attr_ttr1 + self.ci95
        if metric == "mttr":
            if self.censored:
                return INF, INF
            return bootstrap_interval(self.ttr_samples, np.max, reps, seed)
        if metric == "diversity":
            lo, hi = bootstrap_interval(self.diversity_samples, np.min, reps, seed)
            return lo / self.n_channels, hi / self.n_channels
        raise ValueError(f"unknown metric {metric!r}")

    def value(self, metric: str) -> float:
        return {"attr": self.attr_ttr1, "mttr": self.mttr,
                "diversity": float(self.diversity_rate)}[metric]

    @property
    def attr_ttr1(self) -> float:
        return self.attr_ttr0 + 1

    def row(self) -> dict:
        def num(v, digits=6):
            if v is None:
                return ""
            if isinstance(v, float) and math.isinf(v):
                return "inf"
            return f"{v:.{digits}f}" if isinstance(v, float) else str(v)

        return {
            "duty_cycle": str(self.duty),
            "pu_intensity": num(self.intensity, 4),
            "schedule": self.schedule or "",
            "n_padded": self.n_padded,
            "bound": num(self.bound),
            "trials": self.trials,
            "censored": self.censored,
            "mttr": num(self.mttr),
            "attr_ttr0": num(self.attr_ttr0),
            "attr_ttr1": num(self.attr_ttr1),
            "ci95": num(self.ci95),
            "diversity_rate": str(self.diversity_rate),
            "diversity_mean": num(self.diversity_mean),
            "busy_fraction": num(self.busy_fraction, 4),
            "skipped": self.skipped or "",
        }


def run_cell(cfg: ExperimentConfig, intensity: float = 0.0) -> CellSummary:
    """Aggregate every (pair, trial) of one configuration."""
    try:
        cell = Cell(cfg)
    except (InfeasibleScheduleError, PaddingError) as exc:
        nan = float("nan")
        return CellSummary(cfg.duty, intensity, None, cfg.n_channels, None, 0, 0, nan, nan,
                           nan, Fraction(0), nan, 0.0, skipped=str(exc),
                           n_channels=cfg.n_channels)
    outcomes = [run_pair(cfg, p, t, cell)
                for p in range(cfg.n_pairs) for t in range(cfg.trials_per_pair)]
    ttrs = np.array([o.ttr0 for o in outcomes if o.ttr0 is not None], dtype=float)
    censored = len(outcomes) - ttrs.size
    div = [len(o.channels) for o in outcomes]
    per_pair = []
    for p in range(cfg.n_pairs):
        mine = [o for o in outcomes if o.pair == p]
        met = [o.ttr0 for o in mine if o.ttr0 is not None]
        per_pair.append({
            "pair": p,
            "nodes": list(cfg.nodes(p)),
            "attr_ttr0": float(np.mean(met)) if met else None,
            "mttr": max(met) if len(met) == len(mine) else None,
            "diversity_rate": str(Fraction(min(len(o.channels) for o in mine), cfg.n_channels)),
        })
    busy = _busy_estimate(cfg, cell)
    return CellSummary(
        duty=cfg.duty,
        intensity=intensity,
        schedule=None if cell.schedule is None else str(cell.schedule),
        n_padded=cell.n_padded,
        bound=cell.bound,
        trials=len(outcomes),
        censored=censored,
        attr_ttr0=float(ttrs.mean()) if ttrs.size else INF,
        ci95=float(1.96 * ttrs.std(ddof=1) / math.sqrt(ttrs.size)) if ttrs.size > 1 else 0.0,
        mttr=INF if censored else float(ttrs.max()),
        diversity_rate=Fraction(min(div), cfg.n_channels),
        diversity_mean=float(np.mean(div)) / cfg.n_channels,
        busy_fraction=busy,
        per_pair=per_pair,
        n_channels=cfg.n_channels,
        ttr_samples=ttrs,
        diversity_samples=np.asarray(div),
    )


def bootstrap_interval(values, stat, reps: int = 2000, seed: int = 0) -> tuple:
    """Percentile bootstrap 95% interval of ``stat`` over ``values``."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return math.nan, math.nan
    rng = np.random.default_rng([seed, values.size])
    draws = np.empty(reps)
    for i in range(reps):
        draws[i] = stat(values[rng.integers(values.size, size=values.size)])
    lo, hi = np.quantile(draws, [0.025, 0.975])
    return float(lo), float(hi)


def _overlap(a: tuple, b: tuple) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


@dataclass(frozen=True)
class TrendCheck:
    metric: str
    intensity: float
    values: tuple
    inversions: tuple       # indices i where cells i, i + 1 break the trend
    tolerated: bool
    ok: bool

    def describe(self) -> str:
        vals = ", ".join(f"{v:.4g}" for v in self.values)
        return (f"{self.metric} @ {self.intensity:.0%}: [{vals}] "
                f"inversions={list(self.inversions)} -> {'ok' if self.ok else 'FAIL'}")


def check_trend(cells: list, metric: str) -> TrendCheck:
    """Ordinal trend along increasing duty cycle within one intensity.

    'attr' must be non-decreasing, 'diversity' non-increasing, and 'mttr'
    maximal at the last cell (duty cycle 1).  One adjacent-pair inversion is
    tolerated when the two cells' 95% intervals overlap; for 'mttr' the only
    adjacent pair that can be inverted is (second to last, last), and any
    other cell beating the last one is a failure.
    """
    cells = sorted((c for c in cells if not c.skipped), key=lambda c: c.duty)
    if len(cells) < 2:
        raise ValueError("need at least two cells for a trend")
    vals = [c.value(metric) for c in cells]
    if metric == "attr":
        bad = [i for i in range(len(vals) - 1) if vals[i] > vals[i + 1]]
    elif metric == "diversity":
        bad = [i for i in range(len(vals) - 1) if vals[i] < vals[i + 1]]
    elif metric == "mttr":
        last = len(vals) - 1
        bad = [i for i in range(last) if vals[i] > vals[last]]
        if any(i != last - 1 for i in bad):
            return TrendCheck(metric, cells[0].intensity, tuple(vals), tuple(bad), False, False)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    tolerated = len(bad) <= 1 and all(
        _overlap(cells[i].interval(metric), cells[i + 1].interval(metric)) for i in bad)
    return TrendCheck(metric, cells[0].intensity, tuple(vals), tuple(bad),
                      bool(bad) and tolerated, not bad or tolerated)


def _busy_estimate(cfg: ExperimentConfig, cell: Cell) -> float:
    """Empirical PU occupancy over the first pair's first trial horizon."""
    if not cfg.pu.transmitters:
        return 0.0
    return ChannelAvailability(cfg.pu, cfg.n_channels, cell.horizon, (cfg.seed, 0, 0)).busy_fraction()


@dataclass
class ExperimentResult:
    base_config: dict
    cells: list

    def rows(self) -> list:
        return [c.row() for c in self.cells]

    def to_csv(self) -> str:
        buf = io.StringIO()
        rows = self.rows()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "config": self.base_config,
            "cells": [dict(c.row(), per_pair=c.per_pair) for c in self.cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def config_hash(self) -> str:
        blob = json.dumps(self.base_config, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    def write(self, outdir) -> tuple:
        """Write ``sweep-<hash>.csv`` and ``sweep-<hash>.json``; returns both paths."""
        from pathlib import Path

        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        stem = f"sweep-{self.config_hash()}"
        csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
        csv_path.write_text(self.to_csv())
        json_path.write_text(self.to_json() + "\n")
        return csv_path, json_path


def sweep(cfg: ExperimentConfig, duty_cycles=PAPER_DUTY_CYCLES,
          intensities=PAPER_INTENSITIES, transmitters: Optional[int] = None,
          busy_slots: Optional[int] = None) -> ExperimentResult:
    """Run every (intensity, duty cycle) cell, intensity-major.

    ``cfg.pu`` provides the transmitter count and busy-run length unless
    overridden; its idle mean is replaced per intensity.
    """
    duty_cycles = [Fraction(d) for d in duty_cycles]
    intensities = [float(i) for i in intensities]
    if not duty_cycles or not intensities:
        raise ValueError("sweep grid is empty")
    X = cfg.pu.transmitters if transmitters is None else transmitters
    b = cfg.pu.busy_slots if busy_slots is None else busy_slots
    cells = []
    for q in intensities:
        pu = PuTrafficConfig.from_intensity(q, X, b)
        for d in duty_cycles:
            cells.append(run_cell(replace(cfg, duty=d, schedule=None, pu=pu), q))
    meta = cfg.to_dict()
    meta.update(duty_cycles=[str(d) for d in duty_cycles], intensities=intensities,
                transmitters=X, busy_slots=b)
    meta["pu_idle_means"] = {
        str(q): PuTrafficConfig.from_intensity(q, X, b).idle_mean_slots for q in intensities
    }
    return ExperimentResult(meta, cells)
