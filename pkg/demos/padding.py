"""Why channel counts get padded, and when padding is impossible.

The hybrid bound needs the base period to be coprime with the number of
awake slots.  When it is not, extra alias channels are added until it is.
"""

from math import gcd

from hybridhop.interleave import PaddingError, pad_channels
from hybridhop.protocols import protocol_period
from hybridhop.wakeup import WakeUpSchedule

for name in ("jumpstay", "crseq", "modular"):
    print(name, "periods for N = 2..12:", [protocol_period(name, n) for n in range(2, 13)])

# N = 11: five awake slots need no padding, eleven share the factor 11 with
# every period at P = 11 and force N' = 12, six cannot be fixed for two bases
for awake in (5, 11, 6):
    x = WakeUpSchedule((1,) * awake + (0,) * (14 - awake))
    for name in ("jumpstay", "crseq", "modular"):
        try:
            p = pad_channels(11, name, x)
            tau = protocol_period(name, p.n_padded)
            print(f"A={awake} {name:8s} N'={p.n_padded} aliases={list(p.aliases)} "
                  f"tau={tau} gcd={gcd(tau, awake)}")
        except PaddingError as exc:
            print(f"A={awake} {name:8s} cannot pad: {exc}")

# jump-stay periods are 3P, so any awake count divisible by 3 is hopeless;
# crseq periods P(3P-1) are even for odd P, so even awake counts are hopeless
x = WakeUpSchedule.parse("11111111100000")
try:
    pad_channels(11, "jumpstay", x)
except PaddingError as exc:
    print("9/14 with jump-stay:", exc)

# padded labels above N are folded back onto real channels by a fixed table
p = pad_channels(4, "modular", WakeUpSchedule.parse("1111100"))
print("modular N=4, A=5 ->", p, "alias table", p.alias_table()[1:])
