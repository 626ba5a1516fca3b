import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tckit.monomial import (
    MonomialIdeal,
    NewtonPolyhedron,
    briancon_skoda_check,
    closure_membership,
    integral_closure_bruteforce,
    integral_closure_generators,
    minimalize,
    parse_monomial_ideal,
)


def mi(*vs):
    return MonomialIdeal(frozenset(vs), len(vs[0]))


X2Y2 = mi((2, 0), (0, 2))


# ------------------------------------------------------------ basics


def test_minimalize_drops_dominated():
    assert minimalize([(1, 1), (2, 1), (0, 3), (1, 1)]) == {(1, 1), (0, 3)}


def test_parse_and_print():
    I = parse_monomial_ideal("(x^2*y, y^3, x^2*y^2)")
    assert I.names == ("x", "y")
    assert I.exponents == {(2, 1), (0, 3)}
    assert str(I) == "(x^2*y, y^3)"


def test_parse_with_names():
    I = parse_monomial_ideal("(z^2, x)", names=["x", "y", "z"])
    assert I.exponents == {(0, 0, 2), (1, 0, 0)}


@pytest.mark.parametrize("text", ["()", "(x, )", "(x^a)", "(x+y)"])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_monomial_ideal(text)


def test_parse_unknown_name():
    with pytest.raises(ValueError):
        parse_monomial_ideal("(w)", names=["x", "y"])


def test_negative_exponent_rejected():
    with pytest.raises(ValueError):
        mi((1, -1))


def test_power_is_minkowski():
    assert X2Y2.power(2).exponents == {(4, 0), (2, 2), (0, 4)}
    assert X2Y2.power(0).exponents == {(0, 0)}


# ------------------------------------------------------------ membership


@pytest.mark.parametrize("a,expected", [((2, 0), True), ((1, 1), True), ((1, 0), False), ((0, 1), False), ((3, 0), True)])
def test_membership_examples(a, expected):
    assert closure_membership(a, X2Y2) is expected


def test_membership_dimension_mismatch():
    with pytest.raises(ValueError):
        closure_membership((1, 1, 1), X2Y2)


def test_membership_needs_fifths():
    # the only convex weight is 2/5, beyond a small fixed grid
    I = mi((5, 0), (0, 5))
    assert closure_membership((2, 3), I)
    assert not closure_membership((2, 2), I)


def grid_oracle(a, I, max_den):
    """a is in the closure iff some convex weights with denominator <= max_den
    put sum(l_i v_i) below a.  Weights at a vertex of the feasible polytope
    have denominators dividing a subdeterminant of the constraint matrix."""
    V = I.generators
    for D in range(1, max_den + 1):
        for ks in itertools.product(range(D + 1), repeat=len(V)):
            if sum(ks) != D:
                continue
            pt = [sum(Fraction(k, D) * v[i] for k, v in zip(ks, V)) for i in range(I.n)]
            if all(x <= y for x, y in zip(pt, a)):
                return True
    return False


# exponents in [0, 4]^2: a 3x3 subdeterminant with a row of ones is twice a
# triangle area in that square, so at most 16; 2x2 ones are at most 4
GRID_DEN = 16


ideals2 = st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=3).map(
    lambda vs: MonomialIdeal(frozenset(vs), 2)
)


@given(ideals2, st.tuples(st.integers(0, 5), st.integers(0, 5)))
def test_membership_matches_rational_grid(I, a):
    assert closure_membership(a, I) == grid_oracle(a, I, GRID_DEN)


@given(ideals2, st.tuples(st.integers(0, 4), st.integers(0, 4)), st.tuples(st.integers(0, 5), st.integers(0, 5)))
def test_membership_monotone(I, extra, a):
    J = MonomialIdeal(I.exponents | {extra}, 2)
    if closure_membership(a, I):
        assert closure_membership(a, J)


@given(ideals2, st.tuples(st.integers(0, 6), st.integers(0, 6)))
def test_polyhedron_agrees_with_caratheodory(I, a):
    assert NewtonPolyhedron(I).contains(a) == closure_membership(a, I)


# ------------------------------------------------------------ closure


def test_closure_x2_y2():
    assert integral_closure_generators(X2Y2).exponents == {(2, 0), (1, 1), (0, 2)}


@pytest.mark.parametrize("v", [(1,), (1, 0), (2, 1, 3)])
def test_principal_is_closed(v):
    I = mi(v)
    assert integral_closure_generators(I) == I


def test_closure_x3_y3_z3():
    I = mi((3, 0, 0), (0, 3, 0), (0, 0, 3))
    C = integral_closure_generators(I)
    assert (1, 1, 1) in C.exponents
    degree3 = {a for a in itertools.product(range(4), repeat=3) if sum(a) == 3}
    assert C.exponents == degree3
    assert C == integral_closure_bruteforce(I)


@pytest.mark.parametrize(
    "gens",
    [
        [(3, 0, 0), (0, 5, 0), (0, 0, 2)],
        [(4, 1), (0, 3), (7, 0)],
        [(2, 3), (5, 0), (0, 6)],
        [(1, 2, 0), (0, 0, 3), (3, 0, 1)],
    ],
)
def test_closure_matches_bruteforce(gens):
    I = MonomialIdeal(frozenset(gens), len(gens[0]))
    assert integral_closure_generators(I) == integral_closure_bruteforce(I)


ideals3 = st.integers(2, 3).flatmap(
    lambda n: st.lists(st.tuples(*[st.integers(0, 4)] * n), min_size=1, max_size=3).map(
        lambda vs: MonomialIdeal(frozenset(vs), n)
    )
)


@given(ideals3)
def test_closure_contains_ideal_and_is_idempotent(I):
    C = integral_closure_generators(I)
    assert all(C.contains(v) for v in I.exponents)
    assert integral_closure_generators(C) == C


@given(ideals3)
def test_closure_generators_are_members(I):
    C = integral_closure_generators(I)
    assert all(closure_membership(v, I) for v in C.exponents)


@given(ideals2, st.integers(2, 3))
def test_closure_power_inside_closure_of_power(I, m):
    lhs = integral_closure_generators(I).power(m)
    rhs = integral_closure_generators(I.power(m))
    assert all(rhs.contains(v) for v in lhs.exponents)


def test_empty_ideal_rejected():
    with pytest.raises(ValueError):
        integral_closure_generators(MonomialIdeal(frozenset(), 2))


# ------------------------------------------------------------ Briancon-Skoda


def test_bs_x2_y2_k0():
    rep = briancon_skoda_check(X2Y2, 0)
    assert rep.d == 2 and rep.passed
    assert rep.closure.contains((3, 1)) and rep.closure.contains((1, 3))


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_bs_principal(k):
    I = mi((2, 1))
    rep = briancon_skoda_check(I, k)
    assert rep.passed and rep.closure == I.power(1 + k)


def test_bs_x3_y3_z3_k1():
    rep = briancon_skoda_check(mi((3, 0, 0), (0, 3, 0), (0, 0, 3)), 1)
    assert rep.d == 3 and rep.passed


def test_bs_negative_k():
    with pytest.raises(ValueError):
        briancon_skoda_check(X2Y2, -1)


small_ideals = st.integers(1, 3).flatmap(
    lambda n: st.lists(st.tuples(*[st.integers(0, 6)] * n), min_size=1, max_size=3).map(
        lambda vs: MonomialIdeal(frozenset(vs), n)
    )
)


@given(small_ideals, st.integers(0, 2))
def test_bs_always_passes(I, k):
    assert briancon_skoda_check(I, k).passed


def test_bs_power_cannot_drop_to_k_plus_1():
    # closure(I^1) has xy, which is not in I: the shift by d is needed
    C = integral_closure_generators(X2Y2)
    assert not all(X2Y2.contains(v) for v in C.exponents)
