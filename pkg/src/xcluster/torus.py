"""Coordinate tori and the birational maps between them.

A ``ClusterMap`` f from the torus of seed A to the torus of seed B is stored
by its pullback: a dict sending each vertex label of B (a coordinate on the
target) to a rational function in the vertex labels of A.  Composition is
substitution, so ``compose(f, g)`` for f: A -> B, g: B -> C gives A -> C with
pullback ``g`` composed into ``f``.

``mutation_map`` is the one-step coordinate mutation (frozen coordinates
transform too -- only the *mutated* vertex must be unfrozen), and
``mutation_sequence_map`` composes a whole sequence while keeping every
coordinate as a factored product, so no gcd runs until the final conversion.

``check_poisson`` verifies that a map intertwines the log-constant Poisson
brackets written in the two seeds' skew tensors; ``equals_up_to_permutation``
finds a relabelling of one target that identifies two maps with the same
source, which is how the longer periodicity identities are stated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ratfun import FactorProduct, RationalFunction, equals
from .seeds import Seed, mutate_seed, poisson_tensor

__all__ = [
    "ClusterMap",
    "identity_map",
    "relabel_map",
    "mutation_map",
    "mutation_sequence_map",
    "mutation_sequence_at",
    "compose",
    "evaluate_at",
    "equals_up_to_permutation",
    "check_poisson",
    "is_positive",
]


@dataclass(frozen=True)
class ClusterMap:
    source: Seed
    target: Seed
    pullback: dict  # target vertex label -> RationalFunction in source labels

    def __post_init__(self):
        if set(self.pullback) != set(self.target.vertices):
            raise ValueError("pullback must cover exactly the target vertices")

    def __str__(self):
        rows = "\n".join(
            f"  {v} <- {self.pullback[v]}" for v in self.target.vertices
        )
        return f"ClusterMap {len(self.source.vertices)} -> {len(self.target.vertices)} vars:\n{rows}"


def identity_map(seed):
    return ClusterMap(
        seed, seed, {v: RationalFunction.var(v) for v in seed.vertices}
    )


def relabel_map(source, target, sigma):
    """The isomorphism of tori induced by a vertex bijection sigma
    (source label -> target label): the pullback of x_{sigma(v)} is x_v."""
    pullback = {sigma[v]: RationalFunction.var(v) for v in source.vertices}
    return ClusterMap(source, target, pullback)


def mutation_map(seed, k):
    """The coordinate mutation at unfrozen k, as a map from seed's torus to
    the mutated seed's torus."""
    target = mutate_seed(seed, k)  # validates k
    ki = seed.index(k)
    xk = RationalFunction.var(k)
    plus = 1 + xk
    plus_inv_form = 1 + xk.inv()
    pullback = {}
    for i, v in enumerate(seed.vertices):
        if v == k:
            pullback[v] = xk.inv()
            continue
        e = seed.eps[i][ki]
        if e.denominator != 1:
            raise ValueError(f"non-integral exponent eps[{v}][{k}] = {e}")
        e = int(e)
        xi = RationalFunction.var(v)
        if e > 0:
            pullback[v] = xi * plus**e
        elif e < 0:
            pullback[v] = xi * plus_inv_form**e
        else:
            pullback[v] = xi
    return ClusterMap(seed, target, pullback)


def _walk_sequence(seed, ks, cur):
    """Shared engine for mutation sequences: transform the FactorProduct
    assignment ``cur`` step by step, returning (final_seed, assignment)."""
    s = seed
    for k in ks:
        if k in s.frozen:
            raise ValueError(f"cannot mutate at frozen vertex {k!r}")
        ki = s.index(k)
        # Canonicalise the coordinate being mutated: the factors of every
        # later product then stay reduced, which keeps repeated mutations at
        # the same few vertices from compounding unreduced degree.
        fk_rf = cur[k].to_rf()
        fk = FactorProduct.from_rf(fk_rf)
        fk1 = FactorProduct.from_rf(fk_rf + 1)
        new = dict(cur)
        new[k] = fk.inv()
        for i, v in enumerate(s.vertices):
            if v == k:
                continue
            e = s.eps[i][ki]
            if e.denominator != 1:
                raise ValueError(f"non-integral exponent eps[{v}][{k}] = {e}")
            e = int(e)
            if e > 0:
                new[v] = cur[v] * fk1**e
            elif e < 0:
                new[v] = cur[v] * (fk * fk1.inv()) ** (-e)
        cur = new
        s = mutate_seed(s, k)
    return s, cur


def mutation_sequence_map(seed, ks):
    """The composite of mutations at ks (applied left to right), all indices
    named in the original labels.  Coordinates are carried as factored
    products; conversion to canonical rational functions happens once."""
    cur = {v: FactorProduct.from_var(v) for v in seed.vertices}
    s, cur = _walk_sequence(seed, ks, cur)
    return ClusterMap(seed, s, {v: cur[v].to_rf() for v in s.vertices})


def mutation_sequence_at(seed, ks, point):
    """Track a mutation sequence on coordinate VALUES instead of building the
    symbolic map: `point` assigns each vertex a rational function (or an
    int/Fraction/string), and each step transforms the values by the same
    rule mutation_sequence_map applies to coordinates.

    Returns (final_seed, values) with values on the final seed's labels.
    This is how long sequences are checked on partially specialised points
    (e.g. boundary coordinates pinned to 1) when the full symbolic composite
    is too large to carry."""
    def as_rf(x):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, str):
            from .ratfun import parse

            return parse(x)
        return RationalFunction.from_fraction(Fraction(x))

    cur = {v: FactorProduct.from_rf(as_rf(point[v])) for v in seed.vertices}
    s, cur = _walk_sequence(seed, ks, cur)
    return s, {v: cur[v].to_rf() for v in s.vertices}


def compose(f, g):
    """g after f: for f: A -> B and g: B -> C, the map A -> C."""
    if f.target != g.source:
        raise ValueError("compose: f.target must equal g.source")
    pullback = {
        v: g.pullback[v].substitute(f.pullback) for v in g.target.vertices
    }
    return ClusterMap(f.source, g.target, pullback)


def evaluate_at(f, point):
    """Exact image of a point (dict source label -> Fraction)."""
    point = {v: Fraction(x) for v, x in point.items()}
    return {v: f.pullback[v].evaluate(point) for v in f.target.vertices}


def equals_up_to_permutation(f, g):
    """A bijection sigma from g.target labels to f.target labels with
    f.pullback[sigma(v)] == g.pullback[v] for all v, carrying g.target's seed
    to f.target's (frozen set, multipliers and exchange matrix all
    transported).  Returns the dict sigma, or None.

    Exact equality of maps corresponds to sigma being the identity."""
    if f.source != g.source:
        return None
    ft, gt = f.target, g.target
    if len(ft.vertices) != len(gt.vertices):
        return None

    def profile(seed, v, rf):
        return (v in seed.frozen, seed.d_of(v), rf)

    candidates = {}
    for v in gt.vertices:
        p = profile(gt, v, g.pullback[v])
        cands = [w for w in ft.vertices if profile(ft, w, f.pullback[w]) == p]
        if not cands:
            return None
        candidates[v] = cands

    order = sorted(gt.vertices, key=lambda v: len(candidates[v]))
    sigma = {}
    used = set()

    def extend(i):
        if i == len(order):
            return True
        v = order[i]
        for w in candidates[v]:
            if w in used:
                continue
            ok = True
            for u, wu in sigma.items():
                if (
                    ft.eps_at(w, wu) != gt.eps_at(v, u)
                    or ft.eps_at(wu, w) != gt.eps_at(u, v)
                ):
                    ok = False
                    break
            if ok:
                sigma[v] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del sigma[v]
                used.remove(w)
        return False

    if not extend(0):
        return None
    return dict(sigma)


def check_poisson(f):
    """None if f intertwines the two log-constant brackets; otherwise a
    counterexample tuple (a, b, lhs, rhs) of target labels and the two sides.

    The requirement, coordinate by coordinate on the target: summing the
    source tensor against logarithmic derivatives of the pullbacks of x_a and
    x_b must reproduce the target tensor entry times x_a x_b pulled back.
    """
    src, tgt = f.source, f.target
    shat = poisson_tensor(src)
    that = poisson_tensor(tgt)
    n = len(src.vertices)
    pairs = [
        (i, j) for i in range(n) for j in range(n) if shat[i][j]
    ]
    logs = {}

    def log_diff(a, i):
        key = (a, i)
        if key not in logs:
            logs[key] = f.pullback[a].partial_log_derivative(src.vertices[i])
        return logs[key]

    m = len(tgt.vertices)
    for ai in range(m):
        for bi in range(ai + 1, m):
            a, b = tgt.vertices[ai], tgt.vertices[bi]
            lhs = RationalFunction.zero()
            for i, j in pairs:
                term = log_diff(a, i) * log_diff(b, j)
                if not term.is_zero():
                    lhs = lhs + shat[i][j] * term
            rhs = that[ai][bi] * f.pullback[a] * f.pullback[b]
            if not equals(lhs, rhs):
                return (a, b, lhs, rhs)
    return None


def is_positive(f):
    """True if every pullback component is a ratio of polynomials with
    positive coefficients (a subtraction-free certificate of positivity)."""
    return all(f.pullback[v].is_positive_form() for v in f.target.vertices)
