"""Evaluation of signed root words into matrix groups.

A signed word over a type-A chain root datum evaluates to a square matrix
with exact rational-function entries: every unbarred letter contributes an
elementary upper-triangular generator, every barred letter the transposed
lower-triangular one, and each seed coordinate rides on a diagonal
cocharacter factor threaded between the letters of its root.  The natural
target group is projective, so matrices are compared entrywise up to a
common scalar factor, and Poisson statements are made for *ratios* of
entries -- the honest functions on the projective group; raw entries of a
particular diagonal lift are not themselves well defined there, and their
brackets genuinely depend on the lift.

The quadratic bracket on matrix entries used by :func:`r_matrix_bracket` is

    {g[i][j], g[k][l]} = 1/2 * (sign(j-l) + sign(i-k)) * g[i][l] * g[k][j]

i.e. the bracket induced by the skew part of the standard classical
r-matrix of the special linear group.  Both the global sign and the 1/2
normalisation are conventions (the customary naming of the left/right
invariant extensions is notoriously self-contradictory); the ones chosen
here are pinned by the requirement that evaluation of a word seed be a
Poisson map, which :func:`verify_ev_poisson` checks symbolically.
"""

from fractions import Fraction
from itertools import permutations

from .ratfun import RationalFunction, equals as rf_equals, parse as rf_parse
from .rootdata import normalize_word, word_seed_direct, word_to_string
from .seeds import poisson_tensor

__all__ = [
    "matrix",
    "identity_matrix",
    "mat_mul",
    "transpose",
    "determinant",
    "matrix_equal",
    "projective_equal",
    "generator_e",
    "generator_f",
    "generator_h",
    "generators",
    "chain_size",
    "group_word_tokens",
    "validate_group_word",
    "ev",
    "ev_tokens",
    "verify_relation",
    "r_matrix_bracket",
    "ratio_bracket",
    "chart_bracket",
    "verify_ev_poisson",
]


def _rf(x):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, str):
        return rf_parse(x)
    if isinstance(x, Fraction):
        return RationalFunction.from_fraction(x)
    return RationalFunction(x)


# -- matrices over the field of rational functions ---------------------------


def matrix(rows):
    """A square matrix as a tuple of tuples of rational functions; entries
    may be given as ints, Fractions, strings or RationalFunctions."""
    m = tuple(tuple(_rf(e) for e in row) for row in rows)
    if any(len(row) != len(m) for row in m):
        raise ValueError("matrix rows must all have length equal to the size")
    return m


def identity_matrix(n):
    one = RationalFunction.one()
    zero = RationalFunction.zero()
    return tuple(
        tuple(one if i == j else zero for j in range(n)) for i in range(n)
    )


def mat_mul(*factors):
    """Product of one or more square matrices, exactly."""
    if not factors:
        raise ValueError("mat_mul needs at least one factor")
    out = factors[0]
    zero = RationalFunction.zero()
    for nxt in factors[1:]:
        n = len(out)
        if len(nxt) != n:
            raise ValueError("matrix sizes differ")
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = zero
                for k in range(n):
                    a = out[i][k]
                    if a.is_zero():
                        continue
                    b = nxt[k][j]
                    if b.is_zero():
                        continue
                    acc = acc + a * b
                row.append(acc)
            rows.append(tuple(row))
        out = tuple(rows)
    return out


def transpose(m):
    return tuple(tuple(row) for row in zip(*m))


def determinant(m):
    """Exact determinant (expansion over permutations; fine at small sizes)."""
    n = len(m)
    total = RationalFunction.zero()
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = RationalFunction.one() * sign
        for i in range(n):
            term = term * m[i][perm[i]]
            if term.is_zero():
                break
        total = total + term
    return total


def matrix_equal(a, b):
    """Exact entrywise equality."""
    if len(a) != len(b):
        return False
    return all(
        rf_equals(a[i][j], b[i][j])
        for i in range(len(a))
        for j in range(len(a))
    )


def _first_nonzero(m):
    for i, row in enumerate(m):
        for j, e in enumerate(row):
            if not e.is_zero():
                return (i, j)
    return None


def _projective_diff(a, b):
    """None if a and b agree up to a common scalar, else a failing position."""
    if len(a) != len(b) or any(
        len(ra) != len(rb) for ra, rb in zip(a, b)
    ):
        raise ValueError("matrices have different shapes")
    pivot = _first_nonzero(a)
    if pivot is None or _first_nonzero(b) is None:
        raise ValueError("projective comparison with an identically zero matrix")
    k, l = pivot
    for i in range(len(a)):
        for j in range(len(a)):
            if not rf_equals(a[i][j] * b[k][l], b[i][j] * a[k][l]):
                return (i, j)
    return None


def projective_equal(a, b):
    """Entrywise equality up to one common scalar rational function."""
    return _projective_diff(a, b) is None


# -- elementary generators ----------------------------------------------------


def generator_e(n, i):
    """Identity plus a unit in slot (i, i+1), 1 <= i <= n-1."""
    if not 1 <= i <= n - 1:
        raise ValueError(f"elementary index {i} out of range for size {n}")
    one = RationalFunction.one()
    rows = [list(row) for row in identity_matrix(n)]
    rows[i - 1][i] = one
    return tuple(tuple(row) for row in rows)


def generator_f(n, i):
    """Transpose of :func:`generator_e`."""
    return transpose(generator_e(n, i))


def generator_h(n, j, t):
    """Diagonal cocharacter: t in the first j slots, 1 in the rest."""
    if not 1 <= j <= n - 1:
        raise ValueError(f"diagonal index {j} out of range for size {n}")
    t = _rf(t)
    one = RationalFunction.one()
    zero = RationalFunction.zero()
    return tuple(
        tuple(
            (t if i < j else one) if i == k else zero for k in range(n)
        )
        for i in range(n)
    )


def generators(n):
    """All elementary generators for size n, plus the diagonal factory."""
    return {
        "E": tuple(generator_e(n, i) for i in range(1, n)),
        "F": tuple(generator_f(n, i) for i in range(1, n)),
        "H": lambda j, t: generator_h(n, j, t),
    }


# -- evaluation of signed words ------------------------------------------------


def chain_size(rd):
    """Matrix size rank+1 for a type-A chain root datum; raises otherwise.

    The roots must be listed in chain order: consecutive roots joined by a
    single bond, all multipliers 1.
    """
    r = rd.rank
    for i in range(r):
        if rd.d[i] != 1:
            raise ValueError("matrix evaluation needs all multipliers equal to 1")
        for j in range(r):
            want = 2 if i == j else (-1 if abs(i - j) == 1 else 0)
            if rd.cartan[i][j] != want:
                raise ValueError(
                    "matrix evaluation needs a type-A chain root datum "
                    f"(bad Cartan entry at {rd.roots[i]!r},{rd.roots[j]!r})"
                )
    return r + 1


def group_word_tokens(rd, word):
    """Canonical generator sequence for a signed word.

    Tokens are ("E", root), ("F", root) and ("H", root, label) where label
    names the seed coordinate carried by that diagonal factor.  One leading
    diagonal factor per root (its index-0 coordinate), then each letter is
    followed immediately by the next diagonal factor of its root.  Diagonal
    factors commute with the letters of every other root, so any placement
    respecting the letter walls gives the same product.
    """
    letters = normalize_word(rd, word)
    counts = {root: 0 for root in rd.roots}
    tokens = [("H", root, f"{root}0") for root in rd.roots]
    for root, sign in letters:
        counts[root] += 1
        tokens.append(("E" if sign > 0 else "F", root))
        tokens.append(("H", root, f"{root}{counts[root]}"))
    return tuple(tokens)


def validate_group_word(rd, word, tokens):
    """None if tokens is a valid generator sequence for the word, else a
    description of the first problem found.

    Checks: the letter subsequence reproduces the word; per root there is
    exactly one more diagonal factor than letters; two diagonal factors of
    the same root are separated by at least one letter of that root; and
    every diagonal factor carries its own coordinate label.
    """
    letters = list(normalize_word(rd, word))
    ef = [
        (t[1], 1 if t[0] == "E" else -1)
        for t in tokens
        if t[0] in ("E", "F")
    ]
    if ef != letters:
        return (
            f"letter sequence mismatch: tokens spell {word_to_string(ef)!r}, "
            f"word is {word_to_string(letters)!r}"
        )
    h_count = {root: 0 for root in rd.roots}
    ef_count = {root: 0 for root in rd.roots}
    pending = {root: False for root in rd.roots}
    labels = []
    for t in tokens:
        if t[0] == "H":
            root = t[1]
            if root not in pending:
                return f"unknown root {root!r} in diagonal factor"
            if pending[root]:
                return (
                    f"two diagonal factors for root {root!r} with no letter "
                    "of that root between them"
                )
            pending[root] = True
            h_count[root] += 1
            labels.append(t[2])
        elif t[0] in ("E", "F"):
            root = t[1]
            if root not in pending:
                return f"unknown root {root!r} in letter"
            pending[root] = False
            ef_count[root] += 1
        else:
            return f"unknown token kind {t[0]!r}"
    for root in rd.roots:
        if h_count[root] != ef_count[root] + 1:
            return (
                f"root {root!r} has {h_count[root]} diagonal factors for "
                f"{ef_count[root]} letters (need letters+1)"
            )
    if len(set(labels)) != len(labels):
        return "diagonal factors must carry distinct coordinate labels"
    return None


def ev_tokens(rd, tokens, coords=None):
    """Multiply out a generator token sequence over the chain datum."""
    n = chain_size(rd)
    coords = coords or {}
    node = {root: rd.index(root) + 1 for root in rd.roots}
    out = identity_matrix(n)
    for t in tokens:
        if t[0] == "E":
            out = mat_mul(out, generator_e(n, node[t[1]]))
        elif t[0] == "F":
            out = mat_mul(out, generator_f(n, node[t[1]]))
        elif t[0] == "H":
            label = t[2]
            value = coords.get(label)
            value = RationalFunction.var(label) if value is None else _rf(value)
            out = mat_mul(out, generator_h(n, node[t[1]], value))
        else:
            raise ValueError(f"unknown token kind {t[0]!r}")
    return out


def ev(rd, word, coords=None):
    """Evaluate a signed word to a matrix over the seed coordinate field.

    Coordinates default to symbolic variables named like the word-seed
    vertices (e.g. ``a0``, ``a1``, ``b0``); `coords` may override any of
    them by label with numbers, strings or rational functions.
    """
    return ev_tokens(rd, group_word_tokens(rd, word), coords)


def verify_relation(rd, lhs, rhs, cmap):
    """Check that evaluation intertwines a coordinate map between two words.

    `cmap` must be a torus map from the seed of `lhs` to the seed of `rhs`:
    its pullback writes every `rhs` coordinate as a rational function of the
    `lhs` coordinates.  Returns None when evaluating `rhs` and substituting
    the pullback reproduces the evaluation of `lhs` projectively, else a
    description of the mismatch.
    """
    lhs_labels = set(word_seed_direct(rd, lhs).vertices)
    rhs_labels = set(word_seed_direct(rd, rhs).vertices)
    if set(cmap.target.vertices) != rhs_labels:
        return (
            "map target does not match the right word seed: "
            f"{sorted(cmap.target.vertices)} vs {sorted(rhs_labels)}"
        )
    if set(cmap.source.vertices) != lhs_labels:
        return (
            "map source does not match the left word seed: "
            f"{sorted(cmap.source.vertices)} vs {sorted(lhs_labels)}"
        )
    left = ev(rd, lhs)
    right = ev(rd, rhs)
    mapped = tuple(
        tuple(e.substitute(cmap.pullback) for e in row) for row in right
    )
    where = _projective_diff(left, mapped)
    if where is None:
        return None
    return (
        f"evaluations differ projectively at entry {where} after "
        "substituting the coordinate map"
    )


# -- r-matrix brackets ---------------------------------------------------------


def _sign(x):
    return (x > 0) - (x < 0)


def r_matrix_bracket(g, ij, kl):
    """Quadratic r-matrix bracket of two matrix entries.

    For the skew part of the standard classical r-matrix (sum over positive
    roots of the wedge of the root vector pair, each root vector a matrix
    unit) the bracket of entry functions collapses to

        {g[i][j], g[k][l]} = 1/2 (sign(j-l) + sign(i-k)) g[i][l] g[k][j].

    Indices are 0-based.  The overall sign and the 1/2 are pinned so that
    word evaluation is a Poisson map for the word-seed tensors; see
    :func:`verify_ev_poisson`.
    """
    i, j = ij
    k, l = kl
    s = _sign(j - l) + _sign(i - k)
    if s == 0:
        return RationalFunction.zero()
    return g[i][l] * g[k][j] * Fraction(s, 2)


def ratio_bracket(g, ij, kl, ref):
    """Bracket of the entry ratios g[ij]/g[ref] and g[kl]/g[ref].

    Derived from :func:`r_matrix_bracket` by the Leibniz rule; ratios of
    entries are the functions that descend to the projective group, so this
    is the bracket that evaluation must match.
    """
    a = g[ij[0]][ij[1]]
    b = g[kl[0]][kl[1]]
    c = g[ref[0]][ref[1]]
    if c.is_zero():
        raise ValueError("reference entry is identically zero")
    ab = r_matrix_bracket(g, ij, kl)
    ac = r_matrix_bracket(g, ij, ref)
    bc = r_matrix_bracket(g, kl, ref)
    c2 = c * c
    c3 = c2 * c
    return ab / c2 - b * ac / c3 + a * bc / c3


def chart_bracket(seed, f, h):
    """Poisson bracket of two rational functions of the seed coordinates,
    for the log-canonical structure of the seed tensor."""
    hat = poisson_tensor(seed)
    verts = seed.vertices
    total = RationalFunction.zero()
    df = {}
    dh = {}
    for i, v in enumerate(verts):
        for j, w in enumerate(verts):
            if hat[i][j] == 0:
                continue
            if v not in df:
                df[v] = f.partial_log_derivative(v)
            if df[v].is_zero():
                continue
            if w not in dh:
                dh[w] = h.partial_log_derivative(w)
            if dh[w].is_zero():
                continue
            total = total + df[v] * dh[w] * hat[i][j]
    return total


def pushforward_bracket(g, placeholders, u, v, ref=(0, 0)):
    """r-matrix bracket of two functions of entry ratios.

    `placeholders` maps variable names to entry positions (i, j); `u` and
    `v` are rational functions written in those variables.  Each variable
    stands for the ratio g[i][j]/g[ref], and the bracket is extended from
    :func:`ratio_bracket` by the chain rule.  This is how chart coordinates
    recovered from an evaluated matrix inherit a bracket from the group.
    """
    values = {
        name: g[p[0]][p[1]] / g[ref[0]][ref[1]]
        for name, p in placeholders.items()
    }
    names = sorted(placeholders)
    total = RationalFunction.zero()
    for a in names:
        du = u.partial_log_derivative(a)
        if du.is_zero():
            continue
        du = du.substitute(values) / values[a]
        for b in names:
            if a == b:
                continue
            dv = v.partial_log_derivative(b)
            if dv.is_zero():
                continue
            dv = dv.substitute(values) / values[b]
            br = ratio_bracket(g, placeholders[a], placeholders[b], ref)
            if br.is_zero():
                continue
            total = total + du * dv * br
    return total


def verify_ev_poisson(rd, word):
    """None if word evaluation is a Poisson map, else the first mismatch.

    Both sides are computed for all ratios of matrix entries against a fixed
    reference entry (the top-left one, which never vanishes identically on
    these products): the seed tensor pushed through the evaluation on one
    side, the quadratic r-matrix bracket of entries extended to ratios by
    the Leibniz rule on the other.
    """
    seed = word_seed_direct(rd, word)
    g = ev(rd, word)
    n = len(g)
    ref = (0, 0)
    if g[0][0].is_zero():  # pragma: no cover - never happens for these lifts
        ref = _first_nonzero(g)
        if ref is None:
            raise ValueError("evaluation produced the zero matrix")
    c = g[ref[0]][ref[1]]
    positions = [
        (i, j) for i in range(n) for j in range(n) if (i, j) != ref
    ]
    ratios = {p: g[p[0]][p[1]] / c for p in positions}
    hat = poisson_tensor(seed)
    verts = seed.vertices
    ders = {
        p: tuple(ratios[p].partial_log_derivative(v) for v in verts)
        for p in positions
    }
    couplings = [
        (i, j)
        for i in range(len(verts))
        for j in range(len(verts))
        if hat[i][j] != 0
    ]
    for a in range(len(positions)):
        for b in range(a + 1, len(positions)):
            p, q = positions[a], positions[b]
            chart = RationalFunction.zero()
            for i, j in couplings:
                dfi = ders[p][i]
                if dfi.is_zero():
                    continue
                dhj = ders[q][j]
                if dhj.is_zero():
                    continue
                chart = chart + dfi * dhj * hat[i][j]
            rmx = ratio_bracket(g, p, q, ref)
            if not rf_equals(chart, rmx):
                return (
                    f"bracket mismatch for entry ratios {p} and {q} of the "
                    f"evaluated word {word_to_string(normalize_word(rd, word))!r}"
                )
    return None
