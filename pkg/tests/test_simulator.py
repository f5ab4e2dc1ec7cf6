from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from hybridhop import simulator
from hybridhop.core import first_rendezvous, joint_period
from hybridhop.protocols import jumpstay
from hybridhop.pumodel import PuTrafficConfig
from hybridhop.simulator import (Cell, CellSummary, ExperimentConfig, bootstrap_interval,
                                 check_trend, run_cell, run_pair, sweep)


def small(**kw):
    base = dict(n_channels=5, n_pairs=2, base="jumpstay", trials_per_pair=10, seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_defaults_and_validation():
    cfg = ExperimentConfig()
    assert (cfg.n_channels, cfg.n_pairs, cfg.slot_ms, cfg.base) == (11, 20, 10.0, "crseq")
    assert cfg.nodes(0) == (1, 2) and cfg.nodes(3) == (7, 8)
    with pytest.raises(ValueError):
        ExperimentConfig(n_pairs=0)
    with pytest.raises(ValueError):
        ExperimentConfig(pu=PuTrafficConfig(11))
    with pytest.raises(ValueError):
        ExperimentConfig(base="etch")


def test_no_pu_matches_first_rendezvous():
    cfg = small(duty=Fraction(2, 3), schedule_period=3)
    cell = Cell(cfg)
    for trial in range(5):
        out = run_pair(cfg, 1, trial, cell)
        a, b = cell.sequences(1, trial)
        assert out.ttr0 == first_rendezvous(a, b, out.drift, cell.horizon)
        assert 0 <= out.drift < joint_period(a, b)


def test_fully_blocked_channels_censor(monkeypatch):
    class Blocked:
        def __init__(self, cfg, n, horizon, seed):
            pass

        def __call__(self, channels, start):
            return np.zeros(len(channels), dtype=bool)

    monkeypatch.setattr(simulator, "ChannelAvailability", Blocked)
    cfg = small(pu=PuTrafficConfig(1, 1, 3.0))
    out = run_pair(cfg, 0, 0)
    assert out.censored and out.channels == frozenset()


def test_pu_traffic_only_delays():
    cfg_free = small(duty=Fraction(2, 3), schedule_period=3, trials_per_pair=500)
    cfg_pu = replace(cfg_free, pu=PuTrafficConfig(1, 1, 3.0))
    cell_free, cell_pu = Cell(cfg_free), Cell(cfg_pu)
    free, blocked = [], []
    for p in range(cfg_free.n_pairs):
        for t in range(cfg_free.trials_per_pair):
            f = run_pair(cfg_free, p, t, cell_free).ttr0
            g = run_pair(cfg_pu, p, t, cell_pu).ttr0
            assert g is None or g >= f    # shared randomness: blocking never helps
            free.append(f)
            blocked.append(g)
    assert np.mean([g for g in blocked if g is not None]) >= np.mean(free)


def test_duty_one_cell_is_the_base_protocol():
    cfg = small(trials_per_pair=20)
    cell = Cell(cfg)
    assert cell.schedule is None and cell.bound == 15
    summary = run_cell(cfg)
    direct = []
    for p in range(cfg.n_pairs):
        i, j = cfg.nodes(p)
        for t in range(cfg.trials_per_pair):
            drift = run_pair(cfg, p, t, cell).drift
            direct.append(first_rendezvous(jumpstay(5, i), jumpstay(5, j), drift, 15))
    assert summary.attr_ttr0 == pytest.approx(np.mean(direct))
    assert summary.mttr == max(direct) and summary.censored == 0


def test_infeasible_and_unpaddable_cells_are_skipped():
    s = run_cell(small(duty=Fraction(1, 7), schedule_period=14))
    assert s.skipped and "self-discovers" in s.skipped and s.trials == 0
    s = run_cell(small(duty=Fraction(9, 14), schedule_period=14))
    assert s.skipped and "coprime" in s.skipped
    assert s.row()["skipped"]


def test_sweep_rows_and_reproducibility(tmp_path):
    cfg = small(pu=PuTrafficConfig(2), schedule_period=8)
    grid = [Fraction(5, 8), Fraction(1)]
    r1 = sweep(cfg, grid, [0.25, 0.5])
    r2 = sweep(cfg, grid, [0.25, 0.5])
    assert r1.to_csv() == r2.to_csv()
    lines = r1.to_csv().splitlines()
    assert len(lines) == 5 and lines[0].startswith("duty_cycle,pu_intensity,schedule")
    assert [c.duty for c in r1.cells] == grid * 2
    assert r1.cells[0].schedule == "00011111"
    csv_path, json_path = r1.write(tmp_path)
    assert csv_path.name == f"sweep-{r1.config_hash()}.csv" and json_path.exists()
    assert csv_path.read_text() == r1.to_csv()
    assert sweep(replace(cfg, seed=4), grid, [0.25]).config_hash() != r1.config_hash()
    with pytest.raises(ValueError):
        sweep(cfg, [], [0.25])


def test_sweep_identity_cell():
    cfg = small()
    r = sweep(cfg, [1], [0.0])
    assert r.cells[0].row() == run_cell(cfg).row()


def test_bootstrap_interval():
    vals = np.arange(100.0)
    lo, hi = bootstrap_interval(vals, np.mean, 500, seed=1)
    assert lo < 49.5 < hi
    assert bootstrap_interval(vals, np.max, 200) == bootstrap_interval(vals, np.max, 200)
    lo, hi = bootstrap_interval(np.full(10, 3.0), np.max)
    assert lo == hi == 3.0


def fake(duty, attr, ci, mttr, div):
    ttr = np.array([mttr] + [attr - 1] * 9, dtype=float)
    return CellSummary(Fraction(duty), 0.25, None, 11, None, 10, 0, attr - 1, ci, mttr,
                       Fraction(div, 11), div / 11, 0.0, n_channels=11,
                       ttr_samples=ttr, diversity_samples=np.full(10, div))


def test_check_trend():
    cells = [fake(Fraction(1, 2), 10, 1, 50, 11), fake(Fraction(3, 4), 12, 1, 60, 11),
             fake(1, 14, 1, 70, 5)]
    assert all(check_trend(cells, m).ok for m in ("attr", "mttr", "diversity"))
    # one inversion with overlapping intervals is tolerated
    cells[1] = fake(Fraction(3, 4), 9.5, 1, 60, 11)
    tc = check_trend(cells, "attr")
    assert tc.ok and tc.tolerated and tc.inversions == (0,)
    # separated intervals are not
    cells[1] = fake(Fraction(3, 4), 5, 1, 60, 11)
    assert not check_trend(cells, "attr").ok
    # an MTTR peak away from the last cell is never tolerated
    cells = [fake(Fraction(1, 2), 10, 1, 90, 11), fake(Fraction(3, 4), 12, 1, 60, 11),
             fake(1, 14, 1, 70, 5)]
    assert not check_trend(cells, "mttr").ok
    assert "FAIL" in check_trend(cells, "mttr").describe()
    with pytest.raises(ValueError):
        check_trend(cells[:1], "attr")
