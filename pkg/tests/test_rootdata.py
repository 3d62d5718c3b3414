import itertools
import random
from fractions import Fraction

import pytest

from xcluster.rootdata import (
    PRESET_NAMES,
    RootDatum,
    check_equivalence,
    elementary_seed,
    hecke_image,
    normalize_word,
    parse_word,
    reduced_representative,
    root_datum,
    validate_root_datum,
    weyl_group,
    word_seed,
    word_seed_amalgamated,
    word_seed_concatenated,
    word_seed_direct,
    word_to_string,
)
from xcluster.seeds import poisson_tensor, validate


# A rank-3 datum with three distinct pairings, to exercise every coupling
# pattern of the constructions (d*C = [[2,-2,-3],[-2,4,-6],[-3,-6,6]]).
RANK3 = RootDatum.build(
    ("x", "y", "z"), ((2, -2, -3), (-1, 2, -3), (-1, -2, 2)), (1, 2, 3)
)


def hat(seed):
    t = poisson_tensor(seed)
    idx = {v: i for i, v in enumerate(seed.vertices)}
    return lambda a, b: t[idx[a]][idx[b]]


# ---------------------------------------------------------------------------
# Root data


def test_presets_are_valid_and_symmetrizable():
    assert PRESET_NAMES == ("A1", "A2", "A3", "A4", "B2", "B3", "C2", "D4", "G2")
    for name in PRESET_NAMES:
        rd = root_datum(name)
        assert validate_root_datum(rd) == []
        for a in rd.roots:
            for b in rd.roots:
                assert rd.chat(a, b) == rd.chat(b, a)


def test_preset_lookup_is_case_insensitive_and_rejects_unknown():
    assert root_datum("g2") == root_datum("G2")
    with pytest.raises(KeyError, match="unknown root datum"):
        root_datum("E8")


def test_b2_and_g2_multipliers():
    b2 = root_datum("B2")
    assert b2.d == (1, 2) and b2.C("a", "b") == -2 and b2.C("b", "a") == -1
    g2 = root_datum("G2")
    assert g2.d == (1, 3) and g2.C("a", "b") == -3
    c2 = root_datum("C2")
    assert c2.d == (2, 1) and c2.C("a", "b") == -1


def test_root_datum_validation_errors():
    cases = [
        ((("a", "a"), ((2, -1), (-1, 2)), (1, 1)), "duplicate"),
        ((("a", "b"), ((2, -1), (-1, 3)), (1, 1)), "must be 2"),
        ((("a", "b"), ((2, 1), (1, 2)), (1, 1)), "non-positive"),
        ((("a", "b"), ((2, -2), (-1, 2)), (1, 1)), "!="),
        ((("a", "b"), ((2, -1), (-1, 2)), (1, 0)), "positive"),
        ((("a", "b"), ((2, 0), (-1, 2)), (1, 1)), "mirror"),
        ((("a", "b1"), ((2, -1), (-1, 2)), (1, 1)), "ends in a digit"),
        ((("a", "-b"), ((2, -1), (-1, 2)), (1, 1)), "identifier"),
    ]
    for (roots, c, d), needle in cases:
        problems = validate_root_datum(RootDatum(roots, c, d))
        assert any(needle in p for p in problems), (roots, c, d, problems)
        with pytest.raises(ValueError):
            RootDatum.build(roots, c, d)


# ---------------------------------------------------------------------------
# Words


def test_parse_word_accepts_three_bar_spellings():
    rd = root_datum("A2")
    for text in ("a b- a- a- b", "a ~b ~a ~a b", "a B A A b", "a,B,A,A,b"):
        assert parse_word(rd, text) == (
            ("a", 1), ("b", -1), ("a", -1), ("a", -1), ("b", 1)
        )
    assert word_to_string(parse_word(rd, "a B b")) == "a b- b"
    with pytest.raises(ValueError, match="unknown letter 'c'"):
        parse_word(rd, "a c")


def test_normalize_word_forms():
    rd = root_datum("A2")
    assert normalize_word(rd, ("a", 1)) == (("a", 1),)
    assert normalize_word(rd, [("a", 1), ("b", -1)]) == (("a", 1), ("b", -1))
    assert normalize_word(rd, "") == ()
    with pytest.raises(KeyError):
        normalize_word(rd, [("q", 1)])
    with pytest.raises(ValueError, match="sign"):
        normalize_word(rd, [("a", 2)])


# ---------------------------------------------------------------------------
# Elementary and word seeds


def test_elementary_seed_values_simply_laced():
    rd = root_datum("A2")
    s = elementary_seed(rd, "a")
    assert s.vertices == ("a0", "a1", "b0")
    assert s.frozen == frozenset(s.vertices)
    assert s.eps_at("a0", "a1") == 1  # sign convention under test
    assert s.eps_at("a0", "b0") == Fraction(-1, 2)
    assert s.eps_at("a1", "b0") == Fraction(1, 2)
    sbar = elementary_seed(rd, "a-")
    for v in s.vertices:
        for w in s.vertices:
            assert sbar.eps_at(v, w) == -s.eps_at(v, w)


def test_elementary_seed_values_multi_laced():
    b2 = root_datum("B2")
    s = elementary_seed(b2, "b")
    h = hat(s)
    assert h("b0", "b1") == 2  # d_b * C_bb / 2
    assert h("b0", "a0") == -1  # d_b * C_ba / 2
    assert h("b1", "a0") == 1
    assert s.eps_at("b0", "b1") == 1
    assert s.eps_at("b0", "a0") == -1
    assert s.eps_at("a0", "b0") == Fraction(1, 2)
    with pytest.raises(ValueError, match="one letter"):
        elementary_seed(b2, "a b")


def test_rank1_two_letter_word_signs():
    s = word_seed_direct(root_datum("A1"), "a- a")
    assert [[str(x) for x in row] for row in s.eps] == [
        ["0", "-1", "0"],
        ["1", "0", "1"],
        ["0", "-1", "0"],
    ]
    assert s.frozen == frozenset({"a0", "a2"})


def test_word_seed_shape_and_frozen_set():
    s = word_seed_direct(RANK3, "x y- x- x- y")
    assert s.vertices == ("x0", "x1", "x2", "x3", "y0", "y1", "y2", "z0")
    assert s.frozen == frozenset({"x0", "x3", "y0", "y2", "z0"})
    assert s.d == (1, 1, 1, 1, 2, 2, 2, 3)
    assert validate(s) == []


def test_word_seed_coupling_values():
    s = word_seed_direct(RANK3, "x y- x- x- y")
    h = hat(s)
    # within the first root's strip (d*C/2 = 1)
    assert h("x0", "x1") == 1
    assert h("x1", "x2") == -1
    assert h("x2", "x3") == -1
    # within the second root's strip (d*C/2 = 2)
    assert h("y0", "y1") == -2
    assert h("y1", "y2") == 2
    # cross couplings, boundary (d*C/2 = -1) and interior (-d*C)
    assert h("x0", "y0") == -1
    assert h("x3", "y2") == -1
    assert h("x1", "y1") == 2
    assert h("x1", "y0") == 0
    assert h("x2", "y1") == 0
    # couplings to the unused root (d*C/2: -3/2 with x, -3 with y)
    assert h("x0", "z0") == Fraction(-3, 2)
    assert h("x1", "z0") == 3
    assert h("x2", "z0") == 0
    assert h("x3", "z0") == Fraction(-3, 2)
    assert h("y0", "z0") == 3
    assert h("y1", "z0") == -6
    assert h("y2", "z0") == 3
    # nothing couples beyond these strips
    assert h("x0", "x2") == 0
    assert h("x0", "y1") == 0


def test_word_seed_empty_word():
    rd = root_datum("A2")
    s = word_seed_direct(rd, "")
    assert s.vertices == ("a0", "b0")
    assert s.frozen == frozenset({"a0", "b0"})
    assert word_seed_amalgamated(rd, "") == s


def test_word_seed_dispatcher():
    rd = root_datum("A2")
    assert word_seed(rd, "a b") == word_seed_direct(rd, "a b")
    assert word_seed(rd, "a b", method="glued") == word_seed_amalgamated(rd, "a b")
    with pytest.raises(ValueError, match="unknown method"):
        word_seed(rd, "a", method="nope")


def test_both_constructions_agree_exhaustively_short_words():
    rd = root_datum("A2")
    letters = ["a", "b", "a-", "b-"]
    for n in (1, 2, 3):
        for combo in itertools.product(letters, repeat=n):
            assert check_equivalence(rd, " ".join(combo)) is None


def test_both_constructions_agree_on_multi_laced_samples():
    for name, word in [
        ("B2", "a b a b"),
        ("B2", "b- a b- a-"),
        ("G2", "a b a b"),
        ("G2", "b a- a b-"),
    ]:
        assert check_equivalence(root_datum(name), word) is None
    assert check_equivalence(RANK3, "x y- x- x- y") is None


def test_check_equivalence_reports_differences():
    # different words give different seeds; diff text is exercised via the
    # direct comparison helpers on purposely mismatched data
    rd = root_datum("A2")
    a = word_seed_direct(rd, "a b")
    b = word_seed_direct(rd, "b a")
    assert a != b


def test_concatenation_matches_direct_construction():
    cases = [
        (root_datum("B2"), "a b", "a b"),
        (root_datum("B2"), "", "a b a b"),
        (root_datum("A3"), "a c", "b b-"),
        (root_datum("G2"), "a b-", "b a"),
        (RANK3, "x y-", "x- x- y"),
    ]
    for rd, lw, rw in cases:
        combined = (lw + " " + rw).strip()
        assert word_seed_concatenated(rd, lw, rw) == word_seed_direct(rd, combined)


# ---------------------------------------------------------------------------
# Reflection group and word images


def test_weyl_group_orders_and_longest():
    expected = {
        "A1": (2, 1),
        "A2": (6, 3),
        "B2": (8, 4),
        "G2": (12, 6),
        "A3": (24, 6),
        "B3": (48, 9),
        "A4": (120, 10),
        "D4": (192, 12),
    }
    for name, (order, longest) in expected.items():
        w = weyl_group(root_datum(name))
        assert w.order == order, name
        assert w.longest is not None and w.longest.length == longest, name


def test_weyl_longest_words_are_lex_least():
    assert weyl_group(root_datum("A2")).longest.word == ("a", "b", "a")
    assert weyl_group(root_datum("G2")).longest.word == ("a", "b", "a", "b", "a", "b")


def test_weyl_group_rejects_infinite_type():
    rd = RootDatum.build(("a", "b"), ((2, -2), (-2, 2)), (1, 1))
    with pytest.raises(ValueError, match="infinite"):
        weyl_group(rd)
    # affine rank 3: every pair is finite but the group is not
    aff = RootDatum.build(
        ("a", "b", "c"), ((2, -1, -1), (-1, 2, -1), (-1, -1, 2)), (1, 1, 1)
    )
    with pytest.raises(ValueError, match="exceeds 500"):
        weyl_group(aff, max_size=500)


def test_hecke_image_saturates_and_splits_by_sign():
    rd = root_datum("A2")
    plus, minus = hecke_image(rd, "a a")
    assert plus.word == ("a",) and minus.length == 0
    plus, minus = hecke_image(rd, "a b a b a b")
    assert plus.word == ("a", "b", "a")  # already longest after three letters
    plus, minus = hecke_image(rd, "a b- a-")
    assert plus.word == ("a",)
    assert minus.word == ("b", "a")
    assert reduced_representative(rd, "a b- a-") == (
        ("a", 1), ("b", -1), ("a", -1)
    )


def test_hecke_image_invariant_under_braid_moves_and_interleaving():
    rd = root_datum("A2")
    assert hecke_image(rd, "a b a") == hecke_image(rd, "b a b")
    assert hecke_image(rd, "a- b- a-") == hecke_image(rd, "b- a- b-")
    # plain and barred letters act on different components, so any shuffle
    # preserving the relative order within each sign class is neutral
    assert hecke_image(rd, "a b- a b") == hecke_image(rd, "a a b b-")
    b2 = root_datum("B2")
    assert hecke_image(b2, "a b a b") == hecke_image(b2, "b a b a")
    g2 = root_datum("G2")
    assert hecke_image(g2, "a b a b a b") == hecke_image(g2, "b a b a b a")


def test_hecke_image_randomized_braid_invariance():
    rng = random.Random(991)
    rd = root_datum("B2")
    letters = ["a", "b", "a-", "b-"]
    for _ in range(20):
        word = [rng.choice(letters) for _ in range(rng.randrange(3, 9))]
        base = hecke_image(rd, " ".join(word))
        # duplicate a random letter in place: images are unchanged
        i = rng.randrange(len(word))
        doubled = word[:i] + [word[i]] + word[i:]
        assert hecke_image(rd, " ".join(doubled)) == base


def test_g2_longest_pair_has_twelve_letter_representative():
    g2 = root_datum("G2")
    word = "a b a b a b a- b- a- b- a- b-"
    rr = reduced_representative(g2, word)
    assert len(rr) == 12
    assert rr[:6] == tuple((r, 1) for r in ("a", "b", "a", "b", "a", "b"))
    assert rr[6:] == tuple((r, -1) for r in ("a", "b", "a", "b", "a", "b"))
