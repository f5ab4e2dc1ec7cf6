"""Build two hybrid nodes and measure how fast they meet.

Run with ``python demos/quickstart.py``.
"""

from fractions import Fraction

import numpy as np

from hybridhop.core import ADVERSARIAL
from hybridhop.interleave import HybridProtocol
from hybridhop.metrics import attr, evaluate_pair
from hybridhop.protocols import crseq
from hybridhop.wakeup import duty_cycle, generate_schedule, overlap_count

# a 14-slot wake-up schedule with 9 awake slots; any two rotations overlap
x = generate_schedule(14, Fraction(9, 14))
print("schedule", x, "duty", duty_cycle(x))
print("overlaps per rotation", [overlap_count(x, k) for k in range(x.period)])

# the base protocol alone, N = 11 channels
base = crseq(11)
rep = evaluate_pair(base, base, n=11)
print(f"crseq alone: MTTR {rep.mttr}, mean first meeting {rep.attr_ttr1:.2f}, "
      f"diversity {rep.diversity_rate}")

# hybrid nodes: base channels on awake slots, random channels elsewhere
a = HybridProtocol.build("crseq", 11, 1, x, seed=1)
b = HybridProtocol.build("crseq", 11, 1, x, seed=2)
print("padded channel count", a.padded.n_padded, "guaranteed bound", a.bound)
print("first 28 slots of node a:", a.sequence().take(28))

# worst case pretends random slots never meet, so only the bound protects us
worst = evaluate_pair(a.sequence(), b.sequence(), range(a.bound), a.bound, n=11,
                      policy=ADVERSARIAL)
print("adversarial MTTR", worst.mttr, "<= bound", a.bound)

# the average case with fresh random streams per trial
make = lambda s: a.with_seed(s).sequence()
est = attr(make, make, range(a.bound), 2000, 8 * a.bound, seed=3)
print(f"ATTR {est.mean_ttr1:.2f} +/- {est.ci95:.2f} slots over 2000 trials")

samples = np.array(est.samples)
print("ttr quartiles", np.percentile(samples + 1, [25, 50, 75]))
