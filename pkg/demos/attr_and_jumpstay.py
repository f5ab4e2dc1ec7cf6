"""Two things the averages do not show directly.

1. The mixture prediction for hybrid ATTR, checked drift by drift.
2. Jump-stay as the sweep's base protocol: its ATTR without duty cycling is
   already below N, so interleaving random slots cannot push it lower and the
   paper's ATTR trend does not appear.  Its 9/14 cell cannot be padded at all.
"""

from dataclasses import replace
from fractions import Fraction

from hybridhop.interleave import HybridProtocol
from hybridhop.metrics import attr, base_expected_ttr, predict_hybrid_attr
from hybridhop.pumodel import PuTrafficConfig
from hybridhop.simulator import ExperimentConfig, check_trend, sweep
from hybridhop.wakeup import generate_schedule, overlap_count

N, TRIALS = 11, 500

print("crseq N=11: predicted vs empirical first-meeting time per drift k")
for w in (5, 13):
    x = generate_schedule(14, Fraction(w, 14))
    h = HybridProtocol.build("crseq", N, 1, x)
    make = lambda s, x=x: HybridProtocol.build("crseq", N, 1, x, seed=s).sequence()
    print(" schedule", x)
    for k in range(x.period):
        e_k = base_expected_ttr(h.base_sequence(), h.base_sequence(), x, k)
        pred = predict_hybrid_attr(e_k, overlap_count(x, k), x.period, N)
        est = attr(make, make, [k], TRIALS, 8 * h.bound, seed=k)
        err = (est.mean_ttr1 - pred) / pred
        print(f"  k={k:2d} B={overlap_count(x, k):2d} predicted {pred:6.2f} "
              f"empirical {est.mean_ttr1:6.2f} ({err:+.0%})")

print("\njump-stay sweep, 25% and 50% PU intensity")
cfg = ExperimentConfig(n_channels=N, n_pairs=5, base="jumpstay", trials_per_pair=40,
                       seed=1, pu=PuTrafficConfig(10))
result = sweep(cfg)
for c in result.cells:
    if c.skipped:
        print(f"  {c.duty} {c.intensity:.0%} skipped: {c.skipped}")
for q in (0.25, 0.5):
    cells = [c for c in result.cells if c.intensity == q]
    for metric in ("attr", "mttr", "diversity"):
        print(" ", check_trend(cells, metric).describe())

base_only = sweep(replace(cfg, pu=PuTrafficConfig(0)), [1], [0.0]).cells[0]
print(f"  jump-stay alone, no PU: ATTR {base_only.attr_ttr1:.2f} (random hopping: {N})")
