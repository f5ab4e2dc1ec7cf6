import math

import numpy as np
import pytest

from hybridhop.pumodel import (ChannelAvailability, PuTrafficConfig, busy_fraction,
                               discrete_idle_mean, idle_mean_for, occupied_channels, pu_trace)


def runs(trace):
    """(state, length) pairs of a boolean trace."""
    edges = np.flatnonzero(np.diff(trace.astype(np.int8))) + 1
    bounds = np.concatenate([[0], edges, [trace.size]])
    return [(bool(trace[s]), int(e - s)) for s, e in zip(bounds[:-1], bounds[1:])]


def summed_idle_mean(l, terms=100_000):
    # E[ceil(X)] = sum_k k * P(k - 1 < X <= k), summed directly
    k = np.arange(1, terms + 1)
    return float((k * (np.exp(-(k - 1) / l) - np.exp(-k / l))).sum())


def test_no_transmitters_means_always_available():
    av = ChannelAvailability(PuTrafficConfig(0), 11, 500, seed=1)
    assert av.grid[1:].all() and av.busy_fraction() == 0.0
    assert ChannelAvailability.always(5, 10).occupied == ()


def test_long_run_busy_fraction():
    cfg = PuTrafficConfig(1, 5, 15.0)
    trace = pu_trace(cfg, 3, 1_000_000, seed=4)
    oracle = 5 / (5 + summed_idle_mean(15.0))
    assert abs((1 - trace.mean()) - oracle) < 0.02 * oracle
    assert abs(busy_fraction(5, 15.0) - oracle) < 1e-9


def test_heavier_traffic_point():
    trace = pu_trace(PuTrafficConfig(1, 5, 5.0), 1, 200_000, seed=2)
    assert abs((1 - trace.mean()) - 0.5) < 0.03


def test_run_structure():
    cfg = PuTrafficConfig(1, 4, 6.0)
    trace = pu_trace(cfg, 2, 50_000, seed=8)
    r = runs(trace)
    inner = r[1:-1]   # the first and last runs may be cut by the window
    assert {n for busy, n in inner if not busy} == {4}
    assert all(r[i][0] != r[i + 1][0] for i in range(len(r) - 1))
    idle = [n for busy, n in inner if busy]
    assert min(idle) >= 1
    assert abs(np.mean(idle) - discrete_idle_mean(6.0)) < 0.15
    assert np.array_equal(trace, pu_trace(cfg, 2, 50_000, seed=8))
    assert not np.array_equal(trace, pu_trace(cfg, 3, 50_000, seed=8))
    for s in range(300):
        head = runs(pu_trace(cfg, 1, 40, seed=s))
        if not head[0][0] and len(head) > 1:
            assert head[0][1] <= 4


def test_initial_phase_is_spread():
    cfg = PuTrafficConfig(1, 5, 15.0)
    starts = [pu_trace(cfg, 1, 1, seed=s)[0] for s in range(2000)]
    busy_share = 1 - np.mean(starts)
    assert abs(busy_share - busy_fraction(5, 15.0)) < 0.05


@pytest.mark.parametrize("q", [0.1, 0.25, 0.5, 0.7])
def test_intensity_calibration(q):
    l = idle_mean_for(q, 5)
    assert abs(busy_fraction(5, l) - q) < 0.01 * q
    cfg = PuTrafficConfig.from_intensity(q, 10)
    assert abs(cfg.intensity - q) < 1e-9
    assert float(cfg.target_intensity) == pytest.approx(5 / (5 + l), rel=1e-6)


def test_calibration_errors():
    with pytest.raises(ValueError):
        idle_mean_for(0.9, 1)    # would need idle runs below one slot
    with pytest.raises(ValueError):
        idle_mean_for(1.0, 5)
    assert PuTrafficConfig.from_intensity(0, 10).transmitters == 0


def test_config_validation():
    for kw in ({"transmitters": -1}, {"busy_slots": 0}, {"idle_mean_slots": 0}):
        with pytest.raises(ValueError):
            PuTrafficConfig(**kw)
    with pytest.raises(ValueError):
        PuTrafficConfig(11).validate(11)
    with pytest.raises(ValueError):
        pu_trace(PuTrafficConfig(1), 1, 0, seed=0)


def test_occupied_channels_and_lookup():
    cfg = PuTrafficConfig(4, 5, 15.0)
    occ = occupied_channels(cfg, 11, seed=3)
    assert len(set(occ)) == 4 and all(1 <= c <= 11 for c in occ)
    av = ChannelAvailability(cfg, 11, 1000, seed=3)
    assert av.occupied == occ
    free = [c for c in range(1, 12) if c not in occ]
    assert av.grid[free].all()
    ch = np.array([occ[0]] * 5)
    assert list(av(ch, 998)) == [av.available(occ[0], 998), av.available(occ[0], 999),
                                 False, False, False]
    assert math.isclose(av.busy_fraction(), 1 - av.grid[list(occ)].mean())
