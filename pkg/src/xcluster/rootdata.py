"""Root data, words in their reflections, and the seeds words generate.

A ``RootDatum`` is an ordered set of simple roots with an integer Cartan
matrix (2 on the diagonal, non-positive off it) and positive multipliers
making ``d[a] * C[a][b]`` symmetric.  Finite-type presets are provided by
name (A1-A4, B2/C2, B3, D4, G2).

A word is a sequence of letters, each a simple root taken either plainly or
barred; it names a pair of elements in the doubled Hecke-type monoid and,
independently, a seed.  Two constructions of that seed are implemented: a
direct one, writing the exchange matrix down letter by letter, and a glued
one, amalgamating one elementary seed per letter along matching frozen
vertices and then defrosting everything except the per-root extremes.  They
agree as labelled seeds, which ``check_equivalence`` verifies.

Vertices of a word seed are labelled ``<root><i>`` where ``i`` counts the
occurrences of that root read so far, e.g. ``a0 a1 ... ``; every root
contributes its index-0 vertex even when unused.  The per-root extremes are
frozen, everything between them is not.

``weyl_group`` enumerates the reflection group when finite (erroring with the
growth bound otherwise); ``hecke_image`` pushes a word to its pair of group
elements, one Demazure-type step per letter; ``reduced_representative``
rewrites a word as the lexicographically least reduced form of that pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .amalgam import amalgamate, defrost, two_seed_gluing
from .seeds import Seed, reorder, validate

__all__ = [
    "RootDatum",
    "validate_root_datum",
    "root_datum",
    "PRESET_NAMES",
    "parse_word",
    "word_to_string",
    "normalize_word",
    "elementary_seed",
    "word_seed_direct",
    "word_seed_amalgamated",
    "word_seed",
    "word_seed_concatenated",
    "check_equivalence",
    "WeylGroup",
    "WeylElement",
    "weyl_group",
    "hecke_image",
    "reduced_representative",
]


@dataclass(frozen=True)
class RootDatum:
    roots: tuple  # ordered root labels
    cartan: tuple  # tuple of tuples of ints, rows/columns ordered like roots
    d: tuple  # positive integer multipliers, ordered like roots

    @classmethod
    def build(cls, roots, cartan, d):
        rd = cls(
            tuple(str(r) for r in roots),
            tuple(tuple(int(x) for x in row) for row in cartan),
            tuple(int(x) for x in d),
        )
        problems = validate_root_datum(rd)
        if problems:
            raise ValueError("invalid root datum: " + "; ".join(problems))
        return rd

    def index(self, root):
        try:
            return self.roots.index(root)
        except ValueError:
            raise KeyError(f"unknown root {root!r}") from None

    def C(self, a, b):
        return self.cartan[self.index(a)][self.index(b)]

    def d_of(self, a):
        return self.d[self.index(a)]

    def chat(self, a, b):
        """The symmetrized pairing d[a] * C[a][b]."""
        return self.d_of(a) * self.C(a, b)

    @property
    def rank(self):
        return len(self.roots)


def validate_root_datum(rd):
    problems = []
    n = len(rd.roots)
    if n == 0:
        problems.append("no roots")
    if len(set(rd.roots)) != n:
        problems.append("duplicate root labels")
    for r in rd.roots:
        if not r or not r[0].isalpha() or not r.replace("_", "").isalnum():
            problems.append(f"root label {r!r} is not an identifier")
        elif r[-1].isdigit():
            problems.append(f"root label {r!r} ends in a digit (indexed vertex labels would collide)")
    if len(rd.cartan) != n or any(len(row) != n for row in rd.cartan):
        problems.append("cartan matrix shape does not match the roots")
        return problems
    if len(rd.d) != n:
        problems.append("multiplier count does not match the roots")
        return problems
    for i in range(n):
        if rd.cartan[i][i] != 2:
            problems.append(f"cartan[{rd.roots[i]}][{rd.roots[i]}] must be 2")
        if rd.d[i] <= 0:
            problems.append(f"multiplier of {rd.roots[i]} must be positive")
        for j in range(n):
            if i != j and rd.cartan[i][j] > 0:
                problems.append(
                    f"cartan[{rd.roots[i]}][{rd.roots[j]}] must be non-positive"
                )
    for i in range(n):
        for j in range(i + 1, n):
            if rd.d[i] * rd.cartan[i][j] != rd.d[j] * rd.cartan[j][i]:
                problems.append(
                    f"d[{rd.roots[i]}]*C[{rd.roots[i]}][{rd.roots[j]}] != "
                    f"d[{rd.roots[j]}]*C[{rd.roots[j]}][{rd.roots[i]}]"
                )
    for i in range(n):
        for j in range(n):
            if i != j and (rd.cartan[i][j] == 0) != (rd.cartan[j][i] == 0):
                problems.append(
                    f"cartan[{rd.roots[i]}][{rd.roots[j]}] zero but its mirror is not"
                )
    return problems


def _chain(labels):
    n = len(labels)
    c = [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]
    return labels, c, [1] * n


_PRESETS = {
    "A1": _chain(("a",)),
    "A2": _chain(("a", "b")),
    "A3": _chain(("a", "b", "c")),
    "A4": _chain(("a", "b", "c", "d")),
    # first root short, second long
    "B2": (("a", "b"), ((2, -2), (-1, 2)), (1, 2)),
    # same datum with the long root first
    "C2": (("a", "b"), ((2, -1), (-2, 2)), (2, 1)),
    "B3": (("a", "b", "c"), ((2, -1, 0), (-1, 2, -2), (0, -1, 2)), (1, 1, 2)),
    # three outer roots g, h, r attached to the central root c
    "D4": (
        ("g", "h", "r", "c"),
        ((2, 0, 0, -1), (0, 2, 0, -1), (0, 0, 2, -1), (-1, -1, -1, 2)),
        (1, 1, 1, 1),
    ),
    "G2": (("a", "b"), ((2, -3), (-1, 2)), (1, 3)),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def root_datum(name):
    """A named finite-type preset (A1-A4, B2, C2, B3, D4, G2)."""
    key = str(name).upper()
    if key not in _PRESETS:
        raise KeyError(f"unknown root datum {name!r}; presets: {', '.join(PRESET_NAMES)}")
    return RootDatum.build(*_PRESETS[key])


# ---------------------------------------------------------------------------
# Words


def parse_word(rd, text):
    """Parse a whitespace/comma separated word.

    A letter is a root label, barred when written with a trailing ``-``, a
    leading ``~``, or (for single-letter lowercase roots) in uppercase:
    ``"a b- a- a- b"``, ``"a ~b"`` and ``"a B"`` all bar the second letter."""
    letters = []
    for tok in str(text).replace(",", " ").split():
        sign = 1
        if tok.endswith("-"):
            sign, tok = -1, tok[:-1]
        elif tok.startswith("~"):
            sign, tok = -1, tok[1:]
        elif tok not in rd.roots and tok.lower() in rd.roots:
            sign, tok = -1, tok.lower()
        if tok not in rd.roots:
            raise ValueError(f"unknown letter {tok!r}; roots are {', '.join(rd.roots)}")
        letters.append((tok, sign))
    return tuple(letters)


def word_to_string(word):
    return " ".join(r if s > 0 else f"{r}-" for r, s in word)


def normalize_word(rd, word):
    """Accept a string, a single letter, or a sequence of (root, sign)."""
    if isinstance(word, str):
        return parse_word(rd, word)
    word = tuple(word)
    if len(word) == 2 and isinstance(word[0], str) and word[1] in (1, -1):
        word = (word,)
    out = []
    for letter in word:
        r, s = letter
        if r not in rd.roots:
            raise KeyError(f"unknown root {r!r}")
        if s not in (1, -1):
            raise ValueError(f"letter sign must be +1 or -1, got {s!r}")
        out.append((r, s))
    return tuple(out)


# ---------------------------------------------------------------------------
# Word seeds


def _word_counts(rd, letters):
    total = {r: 0 for r in rd.roots}
    for m, _ in letters:
        total[m] += 1
    return total


def _vertex_labels(rd, total):
    labels = [f"{r}{i}" for r in rd.roots for i in range(total[r] + 1)]
    if len(set(labels)) != len(labels):
        raise ValueError("indexed vertex labels collide; rename the roots")
    return labels


def word_seed_direct(rd, word):
    """The seed of a word, written down letter by letter.

    Vertices are ``<root><i>``, one more per root than its letter count (so a
    single ``<root>0`` for unused roots); the per-root extremes are frozen.
    Each letter contributes couplings between the current vertex on every
    root it pairs with and the two vertices it separates on its own root; a
    bar flips the letter's signs."""
    letters = normalize_word(rd, word)
    total = _word_counts(rd, letters)
    labels = _vertex_labels(rd, total)
    idx = {lab: t for t, lab in enumerate(labels)}
    n = len(labels)
    eps_hat = [[Fraction(0)] * n for _ in range(n)]
    count = {r: 0 for r in rd.roots}
    for m, s in letters:
        count[m] += 1
        for a in rd.roots:
            ch = rd.chat(m, a)
            if ch == 0:
                continue
            t = Fraction(-s * ch, 2)
            src = idx[f"{a}{count[a]}"]
            for dst_label, orient in ((f"{m}{count[m] - 1}", 1), (f"{m}{count[m]}", -1)):
                dst = idx[dst_label]
                if src == dst:
                    continue
                eps_hat[src][dst] += orient * t
                eps_hat[dst][src] -= orient * t
    d = [rd.d_of(r) for r in rd.roots for _ in range(total[r] + 1)]
    eps = [[eps_hat[i][j] / d[j] for j in range(n)] for i in range(n)]
    frozen = {f"{r}0" for r in rd.roots} | {f"{r}{total[r]}" for r in rd.roots}
    seed = Seed.build(labels, frozen, eps, d)
    problems = validate(seed)
    if problems:  # guard; the construction keeps the axioms by design
        raise ValueError("word seed violates the seed axioms: " + problems[0])
    return seed


def elementary_seed(rd, letter):
    """The all-frozen seed of a single letter: two vertices on the letter's
    root, one on every other root."""
    letters = normalize_word(rd, letter)
    if len(letters) != 1:
        raise ValueError(f"expected one letter, got {len(letters)}")
    return word_seed_direct(rd, letters)


def word_seed_amalgamated(rd, word):
    """The seed of a word built by gluing: one elementary seed per letter,
    consecutive factors identified along each root's extreme vertices, then
    everything except the per-root extremes defrosted.  Agrees with
    ``word_seed_direct`` as a labelled seed."""
    letters = normalize_word(rd, word)
    if not letters:
        return word_seed_direct(rd, letters)
    count = {r: 0 for r in rd.roots}
    first_root = letters[0][0]
    acc = elementary_seed(rd, letters[0])
    count[first_root] = 1
    for m, s in letters[1:]:
        nxt = elementary_seed(rd, (m, s))
        pairs = [(f"{r}{count[r]}", f"{r}0") for r in rd.roots]
        rename = {("R", f"{m}1"): f"{m}{count[m] + 1}"}
        acc = amalgamate(two_seed_gluing(acc, nxt, pairs, rename))
        count[m] += 1
    interior = {f"{r}{i}" for r in rd.roots for i in range(1, count[r])}
    acc = defrost(acc, interior)
    return reorder(acc, _vertex_labels(rd, count))


def word_seed(rd, word, method="direct"):
    if method == "direct":
        return word_seed_direct(rd, word)
    if method in ("amalgamated", "glued"):
        return word_seed_amalgamated(rd, word)
    raise ValueError(f"unknown method {method!r}")


def check_equivalence(rd, word):
    """None if the direct and glued constructions return identical labelled
    seeds for this word, else a description of the first difference."""
    a = word_seed_direct(rd, word)
    b = word_seed_amalgamated(rd, word)
    if a.vertices != b.vertices:
        return f"vertex lists differ: {a.vertices} vs {b.vertices}"
    if a.frozen != b.frozen:
        return (
            "frozen sets differ: "
            f"{sorted(a.frozen)} vs {sorted(b.frozen)}"
        )
    if a.d != b.d:
        return f"multipliers differ: {a.d} vs {b.d}"
    for i, v in enumerate(a.vertices):
        for j, w in enumerate(a.vertices):
            if a.eps[i][j] != b.eps[i][j]:
                return (
                    f"exchange matrices differ at ({v}, {w}): "
                    f"{a.eps[i][j]} vs {b.eps[i][j]}"
                )
    return None


def word_seed_concatenated(rd, left_word, right_word):
    """The seed of the concatenation, built from the two factor word seeds:
    glue each root's last vertex of the left seed to its first vertex of the
    right seed, defrost the identified vertices that are now interior, and
    relabel the right seed's vertices by shifted indices.  Equals
    ``word_seed_direct`` of the concatenated word."""
    lw = normalize_word(rd, left_word)
    rw = normalize_word(rd, right_word)
    ls = word_seed_direct(rd, lw)
    rs = word_seed_direct(rd, rw)
    lt = _word_counts(rd, lw)
    rt = _word_counts(rd, rw)
    pairs = [(f"{r}{lt[r]}", f"{r}0") for r in rd.roots]
    rename = {
        ("R", f"{r}{i}"): f"{r}{lt[r] + i}"
        for r in rd.roots
        for i in range(1, rt[r] + 1)
    }
    glued = amalgamate(two_seed_gluing(ls, rs, pairs, rename))
    now_interior = {f"{r}{lt[r]}" for r in rd.roots if lt[r] > 0 and rt[r] > 0}
    glued = defrost(glued, now_interior)
    total = {r: lt[r] + rt[r] for r in rd.roots}
    return reorder(glued, _vertex_labels(rd, total))


# ---------------------------------------------------------------------------
# Weyl group and Hecke-type image


@dataclass(frozen=True)
class WeylElement:
    matrix: tuple  # action on the root lattice in the simple-root basis
    length: int
    word: tuple  # lexicographically least reduced word (root labels)


class WeylGroup:
    """The reflection group of a root datum, fully enumerated.

    ``elements`` maps each element's matrix to a WeylElement carrying its
    length and lexicographically least reduced word."""

    def __init__(self, rd, elements, identity):
        self.rd = rd
        self.elements = elements
        self.identity = identity
        self.order = len(elements)
        longest = max(elements.values(), key=lambda e: e.length)
        ties = [e for e in elements.values() if e.length == longest.length]
        self.longest = longest if len(ties) == 1 else None

    def __len__(self):
        return self.order

    def element(self, matrix):
        return self.elements[matrix]

    def simple_reflection(self, root):
        return _reflection_matrix(self.rd, root)


def _reflection_matrix(rd, root):
    r = rd.index(root)
    n = rd.rank
    return tuple(
        tuple((1 if i == j else 0) - (rd.cartan[r][j] if i == r else 0) for j in range(n))
        for i in range(n)
    )


def _mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


_WEYL_CACHE = {}


def weyl_group(rd, max_size=100000):
    """Enumerate the reflection group if finite.

    Raises if any rank-2 pair already generates an infinite dihedral group
    (C[a][b] * C[b][a] >= 4) or if the enumeration exceeds ``max_size``."""
    if rd in _WEYL_CACHE:
        return _WEYL_CACHE[rd]
    for i in range(rd.rank):
        for j in range(i + 1, rd.rank):
            prod = rd.cartan[i][j] * rd.cartan[j][i]
            if prod >= 4:
                raise ValueError(
                    f"roots {rd.roots[i]!r}, {rd.roots[j]!r} generate an infinite "
                    f"group (C[a][b]*C[b][a] = {prod} >= 4)"
                )
    n = rd.rank
    identity = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    gens = [(r, _reflection_matrix(rd, r)) for r in rd.roots]
    elements = {identity: WeylElement(identity, 0, ())}
    queue = [identity]
    while queue:
        next_queue = []
        for m in queue:
            base = elements[m]
            for r, s in gens:
                m2 = _mat_mul(m, s)
                if m2 not in elements:
                    elements[m2] = WeylElement(m2, base.length + 1, base.word + (r,))
                    next_queue.append(m2)
                    if len(elements) > max_size:
                        raise ValueError(
                            f"reflection group exceeds {max_size} elements; "
                            "not of finite type (or raise max_size)"
                        )
        queue = next_queue
    group = WeylGroup(rd, elements, identity)
    _WEYL_CACHE[rd] = group
    return group


def hecke_image(rd, word):
    """The pair of group elements a word maps to: plain letters act on the
    first component, barred letters on the second, each by one saturation
    step (multiply by the reflection when that lengthens, else stay)."""
    letters = normalize_word(rd, word)
    group = weyl_group(rd)
    plus = minus = group.identity
    for r, s in letters:
        refl = group.simple_reflection(r)
        if s > 0:
            cand = _mat_mul(plus, refl)
            if group.element(cand).length > group.element(plus).length:
                plus = cand
        else:
            cand = _mat_mul(minus, refl)
            if group.element(cand).length > group.element(minus).length:
                minus = cand
    return group.element(plus), group.element(minus)


def reduced_representative(rd, word):
    """The canonical word of a word's image pair: the lexicographically least
    reduced word of the plain component, then of the barred one (barred)."""
    plus, minus = hecke_image(rd, word)
    return tuple((r, 1) for r in plus.word) + tuple((r, -1) for r in minus.word)
