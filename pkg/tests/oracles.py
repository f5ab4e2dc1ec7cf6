"""Independent brute-force oracles.

Everything here is plain Python written straight from the definitions,
sharing no code with the package, so tests compare two implementations.
"""

from math import gcd


def prime_at_least(n):
    p = max(n, 2)
    while any(p % d == 0 for d in range(2, p)):
        p += 1
    return p


def fold(c, n):
    while c > n:
        c -= n
    return c


def js_channel(n, node, t):
    if n == 1:
        return 1
    p = prime_at_least(n)
    r = (node - 1) % p + 1
    i0 = (31 * node) % p + 1
    u = t % (3 * p)
    if u < 2 * p:
        c = (i0 - 1 + u * r) % p + 1
    else:
        c = r
    return fold(c, n)


def crseq_channel(n, t):
    if n == 1:
        return 1
    p = prime_at_least(n)
    t %= p * (3 * p - 1)
    j, u = divmod(t, 3 * p - 1)
    if u < 2 * p - 1:
        c = (j * (j + 1) // 2 + u) % p + 1
    else:
        c = j % p + 1
    return fold(c, n)


def modular_channel(n, node, t):
    if n == 1:
        return 1
    p = prime_at_least(n)
    t %= p * p
    return fold(((t // p) * t + node) % p + 1, n)


def channel(name, n, node, t):
    if name == "jumpstay":
        return js_channel(n, node, t)
    if name == "crseq":
        return crseq_channel(n, t)
    if name == "modular":
        return modular_channel(n, node, t)
    raise ValueError(name)


def naive_period(values):
    """Smallest p with values[t] == values[t + p] wherever both exist."""
    L = len(values)
    for p in range(1, L + 1):
        if all(values[t] == values[t + p] for t in range(L - p)):
            return p
    return L


def naive_protocol_period(name, n):
    """lcm over node IDs 1..P of each sequence's minimal period."""
    if n == 1:
        return 1
    p = prime_at_least(n)
    length = {"jumpstay": 3 * p, "crseq": p * (3 * p - 1), "modular": p * p}[name]
    tau = 1
    nodes = [1] if name == "crseq" else range(1, p + 1)   # crseq ignores the ID
    for node in nodes:
        seq = [channel(name, n, node, t) for t in range(2 * length)]
        q = naive_period(seq)
        tau = tau * q // gcd(tau, q)
    return tau


def naive_pad(name, n, awake, limit=64):
    """Smallest m in [n, n + limit] with gcd(period(m), awake) == 1, else None."""
    for m in range(n, n + limit + 1):
        if gcd(naive_protocol_period(name, m), awake) == 1:
            return m
    return None


def naive_first(fa, fb, sigma, horizon):
    """Double loop straight from the rendezvous equation; fa/fb map slot -> channel."""
    for t in range(horizon):
        ta, tb = (t, t + sigma) if sigma > 0 else (t - sigma, t)
        if fa(ta) == fb(tb):
            return t
    return None


def naive_hybrid_deterministic(base, bits, t):
    """Channel of the awake branch at slot t, or None on a sleep slot.

    Replays the consumption counter from slot 0, one slot at a time.
    """
    used = 0
    for s in range(t + 1):
        awake = bits[s % len(bits)]
        if s == t:
            return base(used) if awake else None
        used += awake


def overlaps(bits, k):
    T = len(bits)
    return [t for t in range(T) if bits[t] and bits[(t + k) % T]]
