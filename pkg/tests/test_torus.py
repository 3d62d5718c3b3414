import random
from fractions import Fraction

import pytest

from xcluster.ratfun import RationalFunction, equals, parse
from xcluster.seeds import Seed, mutate_seed, validate
from xcluster.torus import (
    ClusterMap,
    check_poisson,
    compose,
    equals_up_to_permutation,
    evaluate_at,
    identity_map,
    is_positive,
    mutation_map,
    mutation_sequence_map,
    relabel_map,
)

from util import random_seed, rank2_in_ambient

A2ISH = Seed.build(
    ["x0", "x1", "x2"],
    ["x0", "x2"],
    [[0, 1, 0], [-1, 0, 1], [0, -1, 0]],
    [1, 1, 1],
)


def maps_equal(f, g):
    return (
        f.source == g.source
        and f.target == g.target
        and all(equals(f.pullback[v], g.pullback[v]) for v in f.target.vertices)
    )


def test_mutation_map_known_formulas():
    f = mutation_map(A2ISH, "x1")
    assert equals(f.pullback["x1"], parse("1/x1"))
    assert equals(f.pullback["x0"], parse("x0*(1+x1)"))
    assert equals(f.pullback["x2"], parse("x2/(1+1/x1)"))
    assert f.target == mutate_seed(A2ISH, "x1")


def test_mutation_map_is_involution_and_poisson():
    rng = random.Random(20260819)
    for _ in range(15):
        s = random_seed(rng, max_n=5)
        for k in s.unfrozen():
            f = mutation_map(s, k)
            back = mutation_map(f.target, k)
            assert maps_equal(compose(f, back), identity_map(s))
            assert check_poisson(f) is None


def test_mutation_sequence_matches_single_step_composition():
    rng = random.Random(99)
    for _ in range(6):
        s = random_seed(rng, max_n=4, allow_frozen=False)
        ks = [rng.choice(s.unfrozen()) for _ in range(3)]
        seq = mutation_sequence_map(s, ks)
        step = identity_map(s)
        for k in ks:
            step = compose(step, mutation_map(step.target, k))
        assert maps_equal(seq, step)
        assert is_positive(seq)


def test_sequence_kk_is_identity():
    rng = random.Random(4)
    s = random_seed(rng, max_n=5)
    k = s.unfrozen()[0]
    assert maps_equal(mutation_sequence_map(s, [k, k]), identity_map(s))


def test_evaluate_at_exact_point():
    f = mutation_map(A2ISH, "x1")
    img = evaluate_at(f, {"x0": 2, "x1": 3, "x2": 5})
    assert img == {
        "x0": Fraction(8),
        "x1": Fraction(1, 3),
        "x2": Fraction(15, 4),
    }


def test_relabel_and_compose():
    sigma = {"x0": "a", "x1": "b", "x2": "c"}
    t = Seed.build(["a", "b", "c"], ["a", "c"], A2ISH.eps, A2ISH.d)
    r = relabel_map(A2ISH, t, sigma)
    assert equals(r.pullback["a"], RationalFunction.var("x0"))
    rr = compose(r, relabel_map(t, A2ISH, {v: k for k, v in sigma.items()}))
    assert maps_equal(rr, identity_map(A2ISH))


def test_check_poisson_flags_corrupted_map():
    f = mutation_map(A2ISH, "x1")
    bad = dict(f.pullback)
    bad["x0"] = bad["x0"] * RationalFunction.var("x1")
    g = ClusterMap(f.source, f.target, bad)
    assert check_poisson(g) is not None


def test_is_positive_rejects_subtraction():
    s = Seed.build(["x0"], ["x0"], [[0]], [1])
    f = ClusterMap(s, s, {"x0": parse("(1 + x0)/x0")})
    assert is_positive(f)
    g = ClusterMap(s, s, {"x0": parse("1 - x0")})
    assert not is_positive(g)


# -- the four general periodicity properties ---------------------------------


def test_commuting_vertices_give_commuting_mutations():
    rng = random.Random(61)
    for _ in range(5):
        s = rank2_in_ambient(rng, 0, 0, rng.choice([1, 2]), rng.choice([1, 2]))
        assert validate(s) == []
        assert maps_equal(
            mutation_sequence_map(s, ["i", "j"]),
            mutation_sequence_map(s, ["j", "i"]),
        )
        assert maps_equal(
            mutation_sequence_map(s, ["i", "j", "j", "i"]), identity_map(s)
        )


def test_pentagon_up_to_transposition():
    rng = random.Random(62)
    for _ in range(5):
        s = rank2_in_ambient(rng, -1, 1, 1, 1)
        assert validate(s) == []
        f = mutation_sequence_map(s, ["i", "j", "i", "j", "i"])
        sigma = equals_up_to_permutation(identity_map(s), f)
        assert sigma == {"i": "j", "j": "i", "u": "u", "w": "w"}
        assert not maps_equal(f, identity_map(s))


def test_six_step_periodicity_exact():
    rng = random.Random(63)
    for _ in range(3):
        s = rank2_in_ambient(rng, -2, 1, 2, 1)
        assert validate(s) == []
        for ks in (
            ["j", "i", "j", "i", "j", "i"],
            ["i", "j", "i", "j", "i", "j"],
        ):
            assert maps_equal(mutation_sequence_map(s, ks), identity_map(s))


def test_eight_step_periodicity_exact_and_seven_step_misprint():
    # The (-3, 1) alternating sequence closes exactly after 8 mutations; the
    # 7-step composite is the single remaining mutation, not the identity.
    rng = random.Random(64)
    for _ in range(2):
        s = rank2_in_ambient(rng, -3, 1, 3, 1)
        assert validate(s) == []
        f8 = mutation_sequence_map(s, ["i", "j"] * 4)
        assert maps_equal(f8, identity_map(s))
        f7 = mutation_sequence_map(s, ["i", "j", "i", "j", "i", "j", "i"])
        assert maps_equal(f7, mutation_map(s, "j"))
        assert not maps_equal(f7, identity_map(s))


# -- the rank-2 composite with two fibres of three vertices each --------------

B2_WORD_SEED = Seed.build(
    ["a0", "a1", "a2", "b0", "b1", "b2"],
    ["a0", "a2", "b0", "b2"],
    [
        [0, 1, 0, Fraction(-1, 2), 0, 0],
        [-1, 0, 1, 1, -1, 0],
        [0, -1, 0, 0, 1, Fraction(-1, 2)],
        [1, -2, 0, 0, 1, 0],
        [0, 2, -2, -1, 0, 1],
        [0, 0, 1, 0, -1, 0],
    ],
    [1, 1, 1, 2, 2, 2],
)

# The six pullbacks of the 3-step composite, written in y = a1, x = b1 after
# sending every frozen coordinate to 1.
B2_EXPECTED = {
    "a0": "(1 + b1 + 2*b1*a1 + b1*a1^2) / (1 + b1 + b1*a1)",
    "a1": "a1 / (1 + b1 + 2*b1*a1 + b1*a1^2)",
    "a2": "1 + b1 + b1*a1",
    "b0": "b1*a1^2 / (1 + b1 + 2*b1*a1 + b1*a1^2)",
    "b1": "(1 + b1 + b1*a1)^2 / (b1*a1^2)",
    "b2": "b1*(1 + b1 + 2*b1*a1 + b1*a1^2) / (1 + b1 + b1*a1)^2",
}


def test_b2_three_step_composite_reproduces_closed_forms():
    assert validate(B2_WORD_SEED) == []
    ones = {v: Fraction(1) for v in ["a0", "a2", "b0", "b2"]}
    for ks in (["a1", "b1", "a1"], ["b1", "a1", "b1"]):
        f = mutation_sequence_map(B2_WORD_SEED, ks)
        assert check_poisson(f) is None
        for slot, expected in B2_EXPECTED.items():
            got = f.pullback[slot].substitute(ones)
            assert equals(got, parse(expected)), (ks, slot)
