"""Amalgamation: gluing seeds along frozen vertices.

A ``GluingData`` holds factor seeds, an ordered target vertex list and one
injective map per factor from its vertices into the target.  Vertices of
different factors (never of the same factor) may share a target; any shared
target requires all its preimages frozen with equal multipliers.  The glued
seed sums the factor exchange matrices; a target vertex is frozen when every
preimage is (so glued vertices always are).

``amalgamation_map`` is the induced monomial map from the product of the
factor tori -- represented as one block-diagonal seed on prefixed labels --
onto the glued torus: each glued coordinate pulls back to the product of its
preimage coordinates.  ``defrost`` shrinks the frozen set afterwards, subject
to the integrality the seed axioms need.  Both commute with mutation at any
unfrozen vertex, which ``check_amalgamation_mutation_commutes`` verifies
symbolically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .ratfun import RationalFunction, equals as rf_equals
from .seeds import Seed, from_json as seed_from_json, mutate_seed, to_json as seed_to_json, validate
from .torus import ClusterMap, check_poisson, compose, mutation_map

__all__ = [
    "GluingData",
    "amalgamate",
    "defrost",
    "product_seed",
    "amalgamation_map",
    "check_amalgamation_mutation_commutes",
    "two_seed_gluing",
    "gluing_to_json",
    "gluing_from_json",
]


@dataclass(frozen=True)
class GluingData:
    factors: tuple  # tuple of Seeds
    target_vertices: tuple  # ordered target labels
    injections: tuple  # per factor, dict factor label -> target label

    @classmethod
    def build(cls, factors, target_vertices, injections):
        g = cls(
            tuple(factors),
            tuple(str(v) for v in target_vertices),
            tuple(dict(m) for m in injections),
        )
        problems = validate_gluing(g)
        if problems:
            raise ValueError("invalid gluing: " + "; ".join(problems))
        return g

    def preimages(self, k):
        """All (factor index, factor vertex) mapping to target vertex k."""
        return [
            (s, v)
            for s, inj in enumerate(self.injections)
            for v, w in inj.items()
            if w == k
        ]


def validate_gluing(g):
    problems = []
    if len(g.factors) != len(g.injections):
        return ["one injection per factor required"]
    if len(set(g.target_vertices)) != len(g.target_vertices):
        problems.append("duplicate target labels")
    targets = set(g.target_vertices)
    seen = {}
    for s, (seed, inj) in enumerate(zip(g.factors, g.injections)):
        bad = validate(seed)
        if bad:
            problems.append(f"factor {s} is not a valid seed: {bad[0]}")
            continue
        if set(inj) != set(seed.vertices):
            problems.append(f"injection {s} must be defined exactly on factor {s}'s vertices")
            continue
        if len(set(inj.values())) != len(inj):
            problems.append(f"injection {s} is not injective")
        for v, w in inj.items():
            if w not in targets:
                problems.append(f"injection {s} hits unknown target {w!r}")
            seen.setdefault(w, []).append((s, v))
    if problems:
        return problems
    uncovered = targets - set(seen)
    if uncovered:
        problems.append(f"targets not covered: {sorted(uncovered)}")
    for w, pre in seen.items():
        if len(pre) > 1:
            for s, v in pre:
                if not g.factors[s].is_frozen(v):
                    problems.append(
                        f"target {w!r} glues non-frozen vertex {v!r} of factor {s}"
                    )
            ds = {g.factors[s].d_of(v) for s, v in pre}
            if len(ds) > 1:
                problems.append(
                    f"target {w!r} glues vertices with different multipliers {sorted(ds)}"
                )
    return problems


def amalgamate(g):
    """The glued seed of a GluingData."""
    index = {k: t for t, k in enumerate(g.target_vertices)}
    n = len(g.target_vertices)
    eps = [[Fraction(0)] * n for _ in range(n)]
    d = [None] * n
    frozen = set(g.target_vertices)
    for seed, inj in zip(g.factors, g.injections):
        for i, v in enumerate(seed.vertices):
            ti = index[inj[v]]
            d[ti] = seed.d[i]
            if v not in seed.frozen:
                frozen.discard(inj[v])
            for j, w in enumerate(seed.vertices):
                if seed.eps[i][j]:
                    eps[ti][index[inj[w]]] += seed.eps[i][j]
    out = Seed(
        g.target_vertices,
        frozenset(frozen),
        tuple(tuple(row) for row in eps),
        tuple(d),
    )
    problems = validate(out)
    if problems:  # cannot happen for valid gluing data; guard anyway
        raise ValueError("amalgamation produced an invalid seed: " + problems[0])
    return out


def defrost(seed, unfreeze):
    """The same seed with the vertices in ``unfreeze`` no longer frozen.

    Every entry in a row or column of a defrosted vertex must be integral,
    otherwise the result would violate the seed axioms; offending pairs are
    reported in the error."""
    unfreeze = set(unfreeze)
    missing = unfreeze - seed.frozen
    if missing:
        raise ValueError(f"cannot defrost non-frozen vertices: {sorted(missing)}")
    new_frozen = seed.frozen - unfreeze
    bad = []
    n = len(seed.vertices)
    for i in range(n):
        for j in range(n):
            vi, vj = seed.vertices[i], seed.vertices[j]
            if (vi in unfreeze or vj in unfreeze) and seed.eps[i][j].denominator != 1:
                bad.append(f"eps[{vi}][{vj}] = {seed.eps[i][j]}")
    if bad:
        raise ValueError(
            "defrosting needs integral entries; non-integral: " + ", ".join(bad)
        )
    return Seed(seed.vertices, frozenset(new_frozen), seed.eps, seed.d)


def _prefixed(s, v):
    return f"f{s}_{v}"


def product_seed(g):
    """The disjoint union of the factors as one block-diagonal seed, factor s's
    vertex v appearing as ``fs_v``."""
    vertices = []
    frozen = []
    d = []
    for s, seed in enumerate(g.factors):
        for i, v in enumerate(seed.vertices):
            vertices.append(_prefixed(s, v))
            d.append(seed.d[i])
            if v in seed.frozen:
                frozen.append(_prefixed(s, v))
    n = len(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    eps = [[Fraction(0)] * n for _ in range(n)]
    for s, seed in enumerate(g.factors):
        for i, v in enumerate(seed.vertices):
            for j, w in enumerate(seed.vertices):
                eps[index[_prefixed(s, v)]][index[_prefixed(s, w)]] = seed.eps[i][j]
    return Seed(tuple(vertices), frozenset(frozen), tuple(tuple(r) for r in eps), tuple(d))


def amalgamation_map(g):
    """The monomial map from the product torus onto the glued torus: the
    pullback of each glued coordinate is the product of its preimages."""
    source = product_seed(g)
    target = amalgamate(g)
    pullback = {}
    for k in target.vertices:
        f = None
        for s, v in g.preimages(k):
            term = RationalFunction.var(_prefixed(s, v))
            f = term if f is None else f * term
        pullback[k] = f
    return ClusterMap(source, target, pullback)


def check_amalgamation_mutation_commutes(g, k):
    """None if mutation at the unfrozen glued vertex k commutes with
    amalgamation at both the seed and the torus level; otherwise a string
    describing the first discrepancy.

    k must have a single, unfrozen preimage (the gluing axioms guarantee
    uniqueness for unfrozen targets)."""
    target = amalgamate(g)
    if k in target.frozen:
        return f"{k!r} is frozen in the amalgamated seed"
    pre = g.preimages(k)
    if len(pre) != 1:
        return f"{k!r} has {len(pre)} preimages"
    s, v = pre[0]

    mutated_factors = list(g.factors)
    mutated_factors[s] = mutate_seed(g.factors[s], v)
    g2 = GluingData(tuple(mutated_factors), g.target_vertices, g.injections)
    if amalgamate(g2) != mutate_seed(target, k):
        return f"seed-level squares differ at {k!r}"

    m_before = amalgamation_map(g)
    bad = check_poisson(m_before)
    if bad is not None:
        return f"amalgamation map is not Poisson: {bad}"
    m_after = amalgamation_map(g2)
    route_a = compose(m_before, mutation_map(target, k))
    route_b = compose(mutation_map(m_before.source, _prefixed(s, v)), m_after)
    for w in target.vertices:
        if not rf_equals(route_a.pullback[w], route_b.pullback[w]):
            return f"torus-level squares differ at coordinate {w!r}"
    return None


def two_seed_gluing(left, right, pairs, rename=None):
    """Gluing data for two factors, identifying left vertex a with right
    vertex b for each (a, b) in pairs.

    Unglued vertices keep their labels (after the optional ``rename`` map,
    {('L'|'R', label): new label}, used to disambiguate collisions); a glued
    pair keeps the left label.  Target order: left vertices first, then the
    remaining right vertices."""
    rename = rename or {}
    pair_of = dict((b, a) for a, b in pairs)
    if len(pair_of) != len(pairs):
        raise ValueError("pairs glue some right vertex twice")
    if len({a for a, _ in pairs}) != len(pairs):
        raise ValueError("pairs glue some left vertex twice")
    left_name = {v: str(rename.get(("L", v), v)) for v in left.vertices}
    inj_left = dict(left_name)
    inj_right = {}
    targets = [left_name[v] for v in left.vertices]
    for v in right.vertices:
        if v in pair_of:
            inj_right[v] = left_name[pair_of[v]]
        else:
            w = str(rename.get(("R", v), v))
            inj_right[v] = w
            targets.append(w)
    return GluingData.build((left, right), targets, (inj_left, inj_right))


def gluing_to_json(g):
    data = {
        "factors": [json.loads(seed_to_json(s)) for s in g.factors],
        "target_vertices": list(g.target_vertices),
        "injections": [dict(m) for m in g.injections],
    }
    return json.dumps(data, indent=2, sort_keys=True)


def gluing_from_json(text):
    data = json.loads(text) if isinstance(text, str) else text
    return GluingData.build(
        tuple(seed_from_json(s) for s in data["factors"]),
        data["target_vertices"],
        data["injections"],
    )
