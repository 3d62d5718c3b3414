"""Seeds: labelled exchange matrices with multipliers and a frozen subset.

A seed is a finite labelled set of vertices, a distinguished subset of
*frozen* vertices, a rational exchange matrix ``eps`` and positive integer
multipliers ``d``, subject to two axioms:

* ``eps[i][j]`` is an integer unless i and j are both frozen;
* ``eps_hat[i][j] := eps[i][j] * d[j]`` is skew-symmetric.

Vertex labels double as coordinate-variable names downstream, so they must be
identifiers.  Seeds are immutable and hashable; the vertex tuple order is part
of the structure (two seeds that differ only by vertex order compare unequal
-- use ``reorder`` or ``find_isomorphism`` when that matters).

Mutation at an unfrozen vertex k flips the k-th row and column and corrects
the remaining entries by the sign rule; it is an involution, which the test
suite checks both here and at the level of coordinate maps.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

__all__ = [
    "Seed",
    "validate",
    "mutate_seed",
    "mutation_class_size_hint",
    "apply_symmetry",
    "reorder",
    "subseed",
    "poisson_tensor",
    "find_isomorphism",
    "canonical_form",
    "to_json",
    "from_json",
    "to_dot",
]

_LABEL = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Seed:
    vertices: tuple
    frozen: frozenset
    eps: tuple  # tuple of tuples of Fraction, aligned with vertices
    d: tuple  # tuple of positive ints, aligned with vertices

    @classmethod
    def build(cls, vertices, frozen, eps, d):
        """Normalising constructor.

        eps may be a full matrix (rows of numbers) or a dict
        {(i_label, j_label): value} with omitted entries zero; d may be a
        sequence aligned with vertices or a dict {label: int}.
        """
        vertices = tuple(str(v) for v in vertices)
        index = {v: i for i, v in enumerate(vertices)}
        n = len(vertices)
        if isinstance(eps, dict):
            rows = [[Fraction(0)] * n for _ in range(n)]
            for (a, b), val in eps.items():
                rows[index[a]][index[b]] = Fraction(val)
        else:
            rows = [[Fraction(x) for x in row] for row in eps]
        if isinstance(d, dict):
            dd = tuple(int(d[v]) for v in vertices)
        else:
            dd = tuple(int(x) for x in d)
        return cls(
            vertices=vertices,
            frozen=frozenset(str(v) for v in frozen),
            eps=tuple(tuple(row) for row in rows),
            d=dd,
        )

    # -- queries -------------------------------------------------------------

    def index(self, v):
        return self.vertices.index(v)

    def eps_at(self, i, j):
        return self.eps[self.index(i)][self.index(j)]

    def d_of(self, v):
        return self.d[self.index(v)]

    def is_frozen(self, v):
        return v in self.frozen

    def unfrozen(self):
        return tuple(v for v in self.vertices if v not in self.frozen)

    def __str__(self):
        rows = "\n".join(
            "  " + " ".join(f"{x!s:>6}" for x in row) for row in self.eps
        )
        return (
            f"Seed({', '.join(self.vertices)}; frozen={sorted(self.frozen)}; "
            f"d={list(self.d)})\n{rows}"
        )


def validate(seed):
    """Return a list of axiom violations (empty list = valid seed)."""
    problems = []
    n = len(seed.vertices)
    if len(set(seed.vertices)) != n:
        problems.append("duplicate vertex labels")
    for v in seed.vertices:
        if not _LABEL.fullmatch(v):
            problems.append(f"label {v!r} is not an identifier")
    if not seed.frozen <= set(seed.vertices):
        problems.append("frozen set contains unknown labels")
    if len(seed.eps) != n or any(len(row) != n for row in seed.eps):
        problems.append("eps is not a square matrix aligned with the vertices")
        return problems
    if len(seed.d) != n:
        problems.append("d is not aligned with the vertices")
        return problems
    for i, di in enumerate(seed.d):
        if not isinstance(di, int) or di <= 0:
            problems.append(f"multiplier d[{seed.vertices[i]}] = {di} is not a positive integer")
    for i in range(n):
        for j in range(n):
            val = seed.eps[i][j]
            both_frozen = (
                seed.vertices[i] in seed.frozen and seed.vertices[j] in seed.frozen
            )
            if not both_frozen and Fraction(val).denominator != 1:
                problems.append(
                    f"eps[{seed.vertices[i]}][{seed.vertices[j]}] = {val} "
                    "must be an integer (pair not both frozen)"
                )
    for i in range(n):
        for j in range(n):
            if seed.eps[i][j] * seed.d[j] != -seed.eps[j][i] * seed.d[i]:
                problems.append(
                    f"eps_hat not skew at ({seed.vertices[i]}, {seed.vertices[j]})"
                )
                return problems
    return problems


def mutate_seed(seed, k):
    """Mutation at the unfrozen vertex labelled k (identity relabelling)."""
    if k not in seed.vertices:
        raise KeyError(f"no vertex {k!r}")
    if k in seed.frozen:
        raise ValueError(f"cannot mutate at frozen vertex {k!r}")
    ki = seed.index(k)
    n = len(seed.vertices)
    old = seed.eps
    new = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == ki or j == ki:
                row.append(-old[i][j])
            elif old[i][ki] >= 0:
                row.append(old[i][j] + old[i][ki] * max(0, old[ki][j]))
            else:
                row.append(old[i][j] + old[i][ki] * max(0, -old[ki][j]))
        new.append(tuple(row))
    return Seed(seed.vertices, seed.frozen, tuple(new), seed.d)


def apply_symmetry(seed, sigma):
    """Relabel vertices in place by the bijection sigma (old -> new label).

    Positions are kept, so eps and d are untouched; only names change."""
    if set(sigma) != set(seed.vertices):
        raise ValueError("sigma must be defined exactly on the vertices")
    new_vertices = tuple(sigma[v] for v in seed.vertices)
    if len(set(new_vertices)) != len(new_vertices):
        raise ValueError("sigma is not injective")
    return Seed(
        new_vertices,
        frozenset(sigma[v] for v in seed.frozen),
        seed.eps,
        seed.d,
    )


def reorder(seed, new_order):
    """Same seed with its vertex tuple permuted to new_order."""
    if sorted(new_order) != sorted(seed.vertices):
        raise ValueError("new_order must be a permutation of the vertices")
    idx = [seed.index(v) for v in new_order]
    eps = tuple(tuple(seed.eps[i][j] for j in idx) for i in idx)
    return Seed(tuple(new_order), seed.frozen, eps, tuple(seed.d[i] for i in idx))


def subseed(seed, keep, frozen=None):
    """Restriction to a subset of vertices (entries copied, others dropped).

    frozen defaults to the inherited frozen subset; pass an iterable to
    override (e.g. to declare every kept vertex unfrozen)."""
    keep = [v for v in seed.vertices if v in set(keep)]
    idx = [seed.index(v) for v in keep]
    eps = tuple(tuple(seed.eps[i][j] for j in idx) for i in idx)
    if frozen is None:
        fr = frozenset(v for v in keep if v in seed.frozen)
    else:
        fr = frozenset(frozen)
    return Seed(tuple(keep), fr, eps, tuple(seed.d[i] for i in idx))


def poisson_tensor(seed):
    """The skew matrix eps_hat[i][j] = eps[i][j] * d[j] (rows follow the
    vertex order)."""
    n = len(seed.vertices)
    return tuple(
        tuple(seed.eps[i][j] * seed.d[j] for j in range(n)) for i in range(n)
    )


def mutation_class_size_hint(seed, cap=10000):
    """Number of distinct seeds reachable by mutation, up to isomorphism,
    stopping at cap (used by the explorer; exposed for convenience)."""
    from .explorer import explore  # local import to avoid a cycle

    return len(explore(seed, max_seeds=cap).nodes)


# -- isomorphism and canonical form -------------------------------------------


def _refine_colors(seed):
    """Isomorphism-invariant vertex colouring by iterated refinement."""
    n = len(seed.vertices)
    colors = [
        (seed.vertices[i] in seed.frozen, seed.d[i]) for i in range(n)
    ]
    for _ in range(n):
        new = []
        for i in range(n):
            nbhd = sorted(
                (seed.eps[i][j], seed.eps[j][i], colors[j])
                for j in range(n)
                if j != i
            )
            new.append((colors[i], tuple(nbhd)))
        if len(set(new)) == len(set(colors)):
            # Partition stable (refinement never merges classes).
            colors = new
            break
        colors = new
    return colors


def canonical_form(seed, cap=500000):
    """(canonical seed, mapping old label -> canonical label).

    Isomorphic seeds give structurally equal canonical seeds.  Vertices are
    renamed v0, v1, ...; among all orderings compatible with the invariant
    colouring the one minimising (d, frozen flags, eps) is chosen.
    """
    n = len(seed.vertices)
    colors = _refine_colors(seed)
    classes = {}
    for i, c in enumerate(colors):
        classes.setdefault(c, []).append(i)
    ordered_classes = [classes[c] for c in sorted(classes)]
    work = 1
    for cl in ordered_classes:
        for m in range(2, len(cl) + 1):
            work *= m
        if work > cap:
            raise RuntimeError(
                f"canonical_form: too many candidate orderings (> {cap})"
            )

    best_key = None
    best_perm = None
    for parts in _product_permutations(ordered_classes):
        perm = [i for part in parts for i in part]
        key = (
            tuple(seed.d[i] for i in perm),
            tuple(seed.vertices[i] in seed.frozen for i in perm),
            tuple(seed.eps[i][j] for i in perm for j in perm),
        )
        if best_key is None or key < best_key:
            best_key = key
            best_perm = perm
    mapping = {seed.vertices[i]: f"v{pos}" for pos, i in enumerate(best_perm)}
    canon = Seed(
        tuple(f"v{pos}" for pos in range(n)),
        frozenset(mapping[v] for v in seed.frozen),
        tuple(
            tuple(seed.eps[i][j] for j in best_perm) for i in best_perm
        ),
        tuple(seed.d[i] for i in best_perm),
    )
    return canon, mapping


def _product_permutations(classes):
    if not classes:
        yield []
        return
    head, *tail = classes
    for rest in _product_permutations(tail):
        for p in permutations(head):
            yield [list(p)] + rest


def find_isomorphism(s1, s2):
    """A label bijection carrying s1 to s2 (frozen set, d and eps all
    transported), or None."""
    if len(s1.vertices) != len(s2.vertices):
        return None
    c1, m1 = canonical_form(s1)
    c2, m2 = canonical_form(s2)
    if c1 != c2:
        return None
    inv2 = {w: v for v, w in m2.items()}
    return {v: inv2[m1[v]] for v in s1.vertices}


# -- serialisation -------------------------------------------------------------


def to_json(seed):
    """Stable JSON text for a seed; eps entries are [numerator, denominator]."""
    data = {
        "vertices": list(seed.vertices),
        "frozen": sorted(seed.frozen),
        "eps": [
            [[x.numerator, x.denominator] for x in row] for row in seed.eps
        ],
        "d": list(seed.d),
    }
    return json.dumps(data, indent=2, sort_keys=True)


def from_json(text):
    """Parse a seed from JSON text or an already-loaded dict.

    eps entries may be numbers, [num, den] pairs, or strings like "-3/2"."""
    data = json.loads(text) if isinstance(text, str) else text
    rows = []
    for row in data["eps"]:
        out = []
        for x in row:
            if isinstance(x, list):
                out.append(Fraction(x[0], x[1]))
            else:
                out.append(Fraction(str(x)))
        rows.append(out)
    seed = Seed.build(data["vertices"], data["frozen"], rows, data["d"])
    problems = validate(seed)
    if problems:
        raise ValueError("invalid seed: " + "; ".join(problems))
    return seed


def to_dot(seed):
    """Graphviz digraph: an arrow i -> j for eps[i][j] > 0, frozen vertices
    double-circled, multiplier shown when not 1."""
    lines = ["digraph seed {"]
    for i, v in enumerate(seed.vertices):
        shape = "doublecircle" if v in seed.frozen else "circle"
        extra = f" d={seed.d[i]}" if seed.d[i] != 1 else ""
        lines.append(f'  "{v}" [shape={shape}, label="{v}{extra}"];')
    n = len(seed.vertices)
    for i in range(n):
        for j in range(n):
            val = seed.eps[i][j]
            if val > 0:
                label = "" if val == 1 else f' [label="{val}"]'
                lines.append(
                    f'  "{seed.vertices[i]}" -> "{seed.vertices[j]}"{label};'
                )
    lines.append("}")
    return "\n".join(lines)
