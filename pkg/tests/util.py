"""Shared helpers for the test suite: deterministic random seed generators."""

from fractions import Fraction
from math import lcm

from xcluster.seeds import Seed


def random_seed(rng, max_n=6, allow_frozen=True, allow_half_frozen=True):
    """A random valid seed with at most max_n vertices.

    Multipliers are drawn from {1, 2, 3}; off-diagonal data is built through
    the skew matrix (eps_hat[i][j] = m * lcm(d_i, d_j)) so that eps is
    automatically integral in both directions, with optional half-integral
    entries on frozen-frozen pairs.  At least one vertex is left unfrozen so
    mutation tests always have a target.
    """
    n = rng.randint(2, max_n)
    vertices = [f"v{i}" for i in range(n)]
    d = [rng.choice([1, 2, 3]) for _ in range(n)]
    frozen = set(v for v in vertices if allow_frozen and rng.random() < 0.35)
    if len(frozen) == n:
        frozen.discard(vertices[rng.randrange(n)])
    eps = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m = rng.choice([-2, -1, -1, 0, 0, 0, 1, 1, 2])
            hat = Fraction(m * lcm(d[i], d[j]))
            both_frozen = vertices[i] in frozen and vertices[j] in frozen
            if (
                allow_half_frozen
                and both_frozen
                and m != 0
                and rng.random() < 0.5
            ):
                hat /= 2
            eps[i][j] = hat / d[j]
            eps[j][i] = -hat / d[i]
    return Seed.build(vertices, frozen, eps, d)


def rank2_in_ambient(rng, e_ij, e_ji, d_i, d_j):
    """A 4-vertex seed whose first two vertices i, j carry the prescribed
    exchange data and multipliers, with two extra generically coupled
    vertices.  Used for the periodicity identities, which are claimed for the
    given 2 x 2 block inside an arbitrary ambient seed."""
    vertices = ["i", "j", "u", "w"]
    d = [d_i, d_j, rng.choice([1, 2, 3]), rng.choice([1, 2, 3])]
    eps = [[Fraction(0)] * 4 for _ in range(4)]
    eps[0][1] = Fraction(e_ij)
    eps[1][0] = Fraction(e_ji)
    for a in range(4):
        for b in range(a + 1, 4):
            if a == 0 and b == 1:
                continue
            m = rng.choice([-2, -1, 0, 1, 2])
            hat = Fraction(m * lcm(d[a], d[b]))
            eps[a][b] = hat / d[b]
            eps[b][a] = -hat / d[a]
    return Seed.build(vertices, frozenset(), eps, d)
