import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hybridhop.core import ADVERSARIAL, PeriodicSequence, RandomSequence, first_rendezvous
from hybridhop.interleave import HybridProtocol
from hybridhop.metrics import (INF, attr, base_expected_ttr, diversity_rate,
                               effective_base_drifts, evaluate_pair, full_drift_domain, mttr,
                               predict_hybrid_attr)
from hybridhop.protocols import crseq, jumpstay
from hybridhop.wakeup import WakeUpSchedule

from oracles import js_channel, naive_first, naive_hybrid_deterministic


def test_mttr_examples():
    s = jumpstay(5, 1)
    assert mttr(s, s, [0], 15) == 0
    r1, r2 = RandomSequence(11, 1), RandomSequence(11, 2)
    assert mttr(r1, r2, range(5), 10_000, policy=ADVERSARIAL) == INF
    with pytest.raises(ValueError):
        mttr(s, s, [], 15)


def test_hybrid_jumpstay_mttr_within_bound():
    x = WakeUpSchedule.parse("1111")
    a = HybridProtocol.build("jumpstay", 5, 1, x, seed=1).sequence()
    b = HybridProtocol.build("jumpstay", 5, 2, x, seed=2).sequence()
    m = mttr(a, b, range(60), 60, policy=ADVERSARIAL)
    assert m < 60
    ref = max(naive_first(lambda t: js_channel(5, 1, t), lambda t: js_channel(5, 2, t), d, 60)
              for d in range(60))
    assert m == ref


def test_hybrid_mttr_against_replayed_oracle():
    # adversarial: only awake-awake slots count, computed by replaying the counter
    x = WakeUpSchedule.parse("110")
    a = HybridProtocol.build("jumpstay", 5, 1, x).sequence()
    b = HybridProtocol.build("jumpstay", 5, 3, x).sequence()
    ja, jb = jumpstay(5, 1), jumpstay(5, 3)

    def det(seq, bits):
        return lambda t: naive_hybrid_deterministic(seq.__getitem__, bits, t)

    fa, fb = det(ja, x.bits), det(jb, x.bits)
    for d in range(0, 45, 4):
        ref = None
        for t in range(45):
            ta, tb = (t, t + d)
            ca, cb = fa(ta), fb(tb)
            if ca is not None and ca == cb:
                ref = t
                break
        assert first_rendezvous(a, b, d, 45, policy=ADVERSARIAL) == ref


def test_attr_examples():
    s = jumpstay(5, 2)
    est = attr(lambda _: s, lambda _: s, [0], 50, 10)
    assert est.mean == 0 and est.ci95 == 0 and est.censored == 0
    assert est.mean_ttr1 == 1
    with pytest.raises(ValueError):
        attr(lambda _: s, lambda _: s, [0], 0, 10)


def test_random_attr_near_n():
    est = attr(lambda sd: RandomSequence(11, sd), lambda sd: RandomSequence(11, sd),
               [0], 20_000, 2000, seed=3)
    assert abs(est.mean_ttr1 - 11) < 3 * est.ci95 + 0.05


def test_attr_reports_censoring():
    one, two = PeriodicSequence([1], 2), PeriodicSequence([2], 2)
    with pytest.warns(UserWarning, match="no rendezvous"):
        est = attr(lambda _: one, lambda _: two, [0, 1], 10, 20)
    assert est.censored == 10 and est.censored_fraction == 1 and est.max == INF
    assert math.isinf(est.mean)


def test_attr_is_replayable_per_trial():
    make = lambda sd: RandomSequence(7, sd)
    a = attr(make, make, range(10), 30, 500, seed=9)
    b = attr(make, make, range(10), 30, 500, seed=9)
    assert a.samples == b.samples


def test_diversity_examples():
    sweep = PeriodicSequence(range(1, 6), 5)
    assert diversity_rate(sweep, sweep, [0], 5) == 1
    c = PeriodicSequence([3], 5)
    assert diversity_rate(c, c, [0, 1, 2], 5) == Fraction(1, 5)
    one, two = PeriodicSequence([1], 2), PeriodicSequence([2], 2)
    assert diversity_rate(one, two, [0], 4) == 0


def test_predict_hybrid_attr():
    assert predict_hybrid_attr(7.5, 14, 14, 11) == 7.5
    assert predict_hybrid_attr(7.5, 0, 14, 11) == 11
    vals = [predict_hybrid_attr(4.0, B, 10, 11) for B in range(11)]
    slopes = {round(vals[i + 1] - vals[i], 12) for i in range(10)}
    assert slopes == {round((4.0 - 11) / 10, 12)}
    assert abs(predict_hybrid_attr(4.0, 1, 100, 11) - 11) < 0.1
    with pytest.raises(ValueError):
        predict_hybrid_attr(4.0, 11, 10, 11)


table = st.lists(st.integers(1, 3), min_size=1, max_size=6)


@settings(max_examples=80, deadline=None)
@given(table, table)
def test_one_joint_period_of_drifts_is_enough(ta, tb):
    a, b = PeriodicSequence(ta, 3), PeriodicSequence(tb, 3)
    dom = full_drift_domain(a, b)
    L = dom.stop
    wide = range(-3 * L, 3 * L)
    assert mttr(a, b, dom, L) == mttr(a, b, wide, L)
    assert diversity_rate(a, b, dom, L) == diversity_rate(a, b, wide, L)
    # within one sign only sigma mod L matters
    for s in range(L):
        assert first_rendezvous(a, b, s, L) == first_rendezvous(a, b, s + 2 * L, L)
        assert first_rendezvous(a, b, s - L, L) == first_rendezvous(a, b, s - 3 * L, L)
    # monotone in domain inclusion
    assert mttr(a, b, range(L // 2 + 1), L) <= mttr(a, b, dom, L)


def test_sign_of_drift_matters_for_slot_numbering():
    a, b = PeriodicSequence([2, 1], 3), PeriodicSequence([2], 3)
    assert first_rendezvous(a, b, 1, 2) == 0    # counted on a's clock
    assert first_rendezvous(a, b, -1, 2) == 1   # same drift mod 2, counted on b's clock


@settings(max_examples=80, deadline=None)
@given(table, table)
def test_report_invariants(ta, tb):
    a, b = PeriodicSequence(ta, 3), PeriodicSequence(tb, 3)
    rep = evaluate_pair(a, b)
    assert 0 <= rep.diversity_rate <= 1
    never = any(f is None for f, _ in rep.per_drift.values())
    assert (rep.diversity_rate == 0) == never
    if rep.mttr != INF:
        assert rep.attr_ttr0 <= rep.mttr


def test_report_json_fields():
    rep = evaluate_pair(jumpstay(5, 1), jumpstay(5, 2))
    d = json.loads(rep.to_json())
    assert {"mttr", "attr_ttr0", "attr_ttr1", "ci95", "diversity_rate", "censored_fraction",
            "per_drift"} <= set(d)
    assert d["attr_ttr1"] == d["attr_ttr0"] + 1 and len(d["per_drift"]) == 29


def test_effective_drifts():
    ones = WakeUpSchedule.parse("1111")
    assert effective_base_drifts(ones, 3, 15) == [3] * 4
    x = WakeUpSchedule.parse("11101000")
    for k in range(8):
        ref = []
        for t0 in range(8):
            if x[t0] and x[t0 + k]:
                c1 = sum(x.bits[:t0])
                c2 = (t0 + k) // 8 * 4 + sum(x.bits[:(t0 + k) % 8])
                ref.append((c2 - c1) % 70)
        assert effective_base_drifts(x, k, 70) == ref


def test_base_expected_ttr():
    s = crseq(5)
    ones = WakeUpSchedule.parse("1")
    assert base_expected_ttr(s, s, ones, 0) == 1.0
    assert base_expected_ttr(s, s, ones, 0, ttr1=False) == 0.0
    with pytest.raises(ValueError):
        base_expected_ttr(s, s, WakeUpSchedule.parse("1000"), 2)
