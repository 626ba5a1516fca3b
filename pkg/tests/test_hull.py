from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from tckit.hull import (
    Coord,
    Family,
    FormalSum,
    FracExponent,
    FracPoly,
    HullError,
    IndeterminateDCC,
    SupportDescription,
    chain_violation_search,
    dcc_check,
    essential_family,
    rounding_factor,
    nonvanishing_witness,
    parse_formal_sum,
    parse_frac_poly,
    parse_support,
    scalar_multiply,
    socle_pairing,
    strictly_below,
)


def vec(*xs):
    return tuple(Fr(x) for x in xs)


# ------------------------------------------------------------ exponents


def test_frac_exponent_lowest_terms():
    x = FracExponent(4, 3, 2)
    assert (x.numerator, x.level) == (1, 1)
    assert x.value == Fr(1, 2)
    assert FracExponent(6, 0, 3).level == 0


def test_frac_exponent_from_fraction():
    x = FracExponent.from_fraction(Fr(-5, 9), 3)
    assert (x.numerator, x.level) == (-5, 2)
    with pytest.raises(HullError):
        FracExponent.from_fraction(Fr(1, 6), 2)


# ------------------------------------------------------------ DCC


def test_dcc_finite_antichain():
    v = dcc_check(SupportDescription({vec(-1, -2), vec(-2, -1)}))
    assert v.passed and set(v.witness) == {vec(-1, -2), vec(-2, -1)}


def test_dcc_finite_witness_is_minimal_set():
    v = dcc_check(SupportDescription({vec(-1, -1), vec(-2, -2), vec(0, -3)}))
    assert v.passed and set(v.witness) == {vec(-2, -2), vec(0, -3)}


@pytest.mark.parametrize("p", [2, 3])
def test_dcc_essential_family_is_antichain(p):
    v = dcc_check(essential_family(p).support())
    assert v.passed and "antichain" in v.reason


def test_dcc_descending_family_fails_with_pair():
    fam = Family((Coord("arith", 1), Coord("arith", 1)), 2)
    v = dcc_check(SupportDescription(set(), [fam]))
    assert v.verdict == "fail"
    hi, lo = v.witness
    assert hi == vec(0, 0) and lo == vec(-1, -1) and strictly_below(lo, hi)


def test_dcc_ascending_family_passes():
    fam = Family((Coord("geom", 1), Coord("const", -2)), 3)
    assert dcc_check(SupportDescription(set(), [fam])).passed


def test_dcc_constant_family_indeterminate():
    fam = Family((Coord("const", -1), Coord("const", 0)), 2)
    assert dcc_check(SupportDescription(set(), [fam])).verdict == "indeterminate"


def test_dcc_union_with_finite():
    fam = essential_family(2).families[0][0]
    v = dcc_check(SupportDescription({vec(-3, -3)}, [fam]))
    assert v.passed and v.witness == [vec(-3, -3)]


def test_descending_formal_sum_rejected():
    with pytest.raises(HullError):
        parse_formal_sum("family(e){ x1^(-e) * x2^(-e) }", 2, 2)


def test_parse_support_skips_validation():
    S = parse_support("family(e){ x1^(-e) * x2^(-e) }", 2, 2)
    assert dcc_check(S).verdict == "fail"


# ------------------------------------------------------------ elements


def test_positive_support_rejected():
    with pytest.raises(HullError):
        FormalSum(2, 2, {vec(1, -1): 1})


def test_coefficients_reduce_mod_p():
    f = FormalSum(3, 1, {vec(-1): 4, vec(-2): 3})
    assert f.terms == {vec(-1): 1}


def test_non_p_adic_exponent_rejected():
    with pytest.raises(HullError):
        FormalSum(2, 1, {vec(Fr(-1, 3)): 1})


def test_arity_mismatch():
    with pytest.raises(HullError):
        scalar_multiply(FracPoly.monomial(2, (1,)), FormalSum(2, 2, {vec(-1, -1): 1}))
    with pytest.raises(HullError):
        scalar_multiply(FracPoly.monomial(3, (1, 0)), FormalSum(2, 2, {vec(-1, -1): 1}))


def test_scalar_exponents_nonnegative():
    with pytest.raises(HullError):
        FracPoly.monomial(2, (-1,))


# ------------------------------------------------------------ action


def test_identity_action():
    f = parse_formal_sum("x1^(-1) * x2^(-2) + family(e){ x1^(-1/p^e) * x2^(-e) }", 2, 2)
    prod = scalar_multiply(FracPoly.monomial(2, (0, 0)), f)
    assert prod.exact and prod.value == f


def test_kill_rule_example():
    f = parse_formal_sum("x1^(-1) * x2^(-2) + x1^(-2) * x2^(-1)", 2, 5)
    prod = scalar_multiply(FracPoly.monomial(5, (1, 2)), f)
    assert prod.exact and prod.value.terms == {vec(0, 0): 1}


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("t", [0, 1, 4])
def test_family_times_power_of_x2(p, t):
    E = 9
    prod = scalar_multiply(FracPoly.monomial(p, (0, t)), essential_family(p), E)
    expect = {vec(Fr(-1, p**e), t - e): 1 for e in range(t, E + 1)}
    assert prod.exact and prod.truncated == expect


def test_family_killed_by_x1():
    # x1 * x1^(-1/p^e): only e = 0 survives
    prod = scalar_multiply(FracPoly.monomial(2, (1, 0)), essential_family(2), 20)
    assert prod.value.is_finite and prod.value.terms == {vec(0, 0): 1}


def test_coefficients_cancel():
    f = parse_formal_sum("x1^(-1) + x1^(-2)", 1, 2)
    s = parse_frac_poly("x1 + 1", 1, 2)
    # (x + 1)(x^-1 + x^-2) = 1 + x^-1 + x^-1 + x^-2 = 1 + x^-2 in char 2
    assert scalar_multiply(s, f).value.terms == {vec(0): 1, vec(-2): 1}


def test_two_tails_flag_inexact():
    f = essential_family(2)
    s = FracPoly(2, 2, {vec(0, 1): 1, vec(0, 2): 1})
    assert not scalar_multiply(s, f).exact


# kill-rule consistency in one variable: x^a * x^-b = x^(a-b) or 0
GRID = [Fr(k, 4) for k in range(0, 13)]


@pytest.mark.parametrize("a", GRID)
def test_one_variable_grid(a):
    for b in GRID:
        prod = scalar_multiply(FracPoly.monomial(2, (a,)), FormalSum(2, 1, {(-b,): 1}))
        expect = {} if a > b else {(a - b,): 1}
        assert prod.value.terms == expect


# ------------------------------------------------------------ module axioms

P = 3
exps = st.integers(0, 8).map(lambda k: Fr(k, P))
neg_exps = st.integers(0, 8).map(lambda k: Fr(-k, P))
coefs = st.integers(1, P - 1)


def scalars(n=2):
    return st.dictionaries(st.tuples(*[exps] * n), coefs, max_size=3).map(lambda t: FracPoly(P, n, t))


def finite_sums(n=2):
    return st.dictionaries(st.tuples(*[neg_exps] * n), coefs, max_size=4).map(lambda t: FormalSum(P, n, t))


@given(scalars(), scalars(), finite_sums())
def test_action_associative(s1, s2, f):
    lhs = scalar_multiply(s1 * s2, f).value
    rhs = scalar_multiply(s1, scalar_multiply(s2, f).value).value
    assert lhs.terms == rhs.terms


@given(scalars(), scalars(), finite_sums())
def test_action_distributive(s1, s2, f):
    lhs = scalar_multiply(s1 + s2, f).value
    rhs = scalar_multiply(s1, f).value + scalar_multiply(s2, f).value
    assert lhs.terms == rhs.terms


@given(scalars(), finite_sums(), finite_sums())
def test_action_additive_in_f(s, f, g):
    lhs = scalar_multiply(s, f + g).value
    rhs = scalar_multiply(s, f).value + scalar_multiply(s, g).value
    assert lhs.terms == rhs.terms


@given(scalars(), finite_sums())
def test_product_support_has_dcc(s, f):
    prod = scalar_multiply(s, f)
    assert prod.exact and dcc_check(prod.value.support()).passed


def test_action_associative_on_family():
    f = essential_family(2)
    s1, s2 = FracPoly.monomial(2, (0, 2)), FracPoly.monomial(2, (Fr(1, 8), 1))
    lhs = scalar_multiply(s1 * s2, f, 12).truncated
    rhs = scalar_multiply(s1, scalar_multiply(s2, f, 12).value, 12).truncated
    assert lhs == rhs


# ------------------------------------------------------------ pairing


def test_pairing_single_term():
    pr = socle_pairing(FormalSum(5, 1, {vec(-2): 3}))
    assert pr.monomial == vec(2) and pr.constant == 3


def test_pairing_two_terms():
    f = parse_formal_sum("x1^(-1) * x2^(-2) + x1^(-2) * x2^(-1)", 2, 2)
    pr = socle_pairing(f)
    assert pr.constant == 1 and pr.monomial in (vec(1, 2), vec(2, 1))


def test_pairing_family():
    pr = socle_pairing(essential_family(2))
    assert pr.monomial == vec(1, 0) and pr.constant == 1


def test_pairing_empty():
    with pytest.raises(HullError):
        socle_pairing(FormalSum(2, 1, {}))


def test_pairing_indeterminate():
    fam = Family((Coord("const", -1),), 2)
    f = FormalSum.__new__(FormalSum)
    object.__setattr__(f, "p", 2)
    object.__setattr__(f, "n", 1)
    object.__setattr__(f, "terms", {})
    object.__setattr__(f, "families", ((fam, 1),))
    with pytest.raises(IndeterminateDCC):
        socle_pairing(f)


@given(finite_sums().filter(lambda f: not f.is_zero()))
def test_essentiality(f):
    pr = socle_pairing(f)
    assert pr.constant % P != 0
    assert vec(*(-x for x in pr.monomial)) in f.terms


# ------------------------------------------------------------ witness


def test_witness_t0():
    w = nonvanishing_witness(0, 5, 2)
    assert w.survivor == vec(-1, 0) and w.count == 6


def test_witness_t3():
    w = nonvanishing_witness(3, 10, 2)
    assert w.survivor == vec(Fr(-1, 8), 0) and w.count == 8
    assert w.text() == "x1^(-1/8)"


def test_witness_boundary():
    w = nonvanishing_witness(20, 20, 3)
    assert w.count == 1 and w.survivor == vec(Fr(-1, 3**20), 0)


def test_witness_needs_E_at_least_t():
    with pytest.raises(HullError):
        nonvanishing_witness(5, 4, 2)


@pytest.mark.parametrize("p", [2, 5])
def test_witness_every_t(p):
    assert all(nonvanishing_witness(t, 12, p).count == 13 - t for t in range(13))


# ------------------------------------------------------------ chains


def test_chain_antichain_b():
    B = [vec(-1, -3), vec(-2, -2), vec(-3, -1)]
    assert chain_violation_search([vec(0, 0)], B, 1) is not None
    assert chain_violation_search([vec(0, 0)], B, 2) is None


def test_chain_incomparable_pair():
    assert chain_violation_search([vec(0, 0)], [vec(-1, 5), vec(-2, 6)], 2) is None


def test_chain_from_a_alone():
    chain = chain_violation_search([vec(0, 0), vec(-1, -1)], [vec(0, 0)], 2)
    assert chain is not None and len(chain) == 2


sets2 = st.sets(st.tuples(st.integers(-3, 0), st.integers(-3, 0)), min_size=1, max_size=4)


@given(sets2, sets2)
def test_no_chain_beyond_pair_count(A, B):
    assert chain_violation_search(A, B, len(A) * len(B) + 1) is None


@given(sets2, sets2)
def test_found_chain_is_weakly_descending(A, B):
    chain = chain_violation_search(A, B, 2)
    if chain is None:
        return
    sums = [tuple(x + y for x, y in zip(a, b)) for a, b in chain]
    assert len(set(chain)) == len(chain)
    ordered = sorted(sums, key=sum, reverse=True)
    assert all(all(x >= y for x, y in zip(u, v)) for u, v in zip(ordered, ordered[1:]))


# ------------------------------------------------------------ rounding


def test_factor_halves():
    fac = rounding_factor((Fr(1, 2), Fr(5, 2)), 2, 2, p=2)
    assert fac.integer_part == (0, 2) and fac.degree == 2
    assert fac.remainder == vec(Fr(1, 2), Fr(1, 2))


def test_factor_integral():
    fac = rounding_factor((2, 1, 3), 4, 3)
    assert fac.integer_part == (2, 1, 3) and fac.remainder == vec(0, 0, 0)


def test_factor_boundary():
    fac = rounding_factor((Fr(3, 4),) * 3, 0, 3, p=2)
    assert fac.integer_part == (0, 0, 0) and fac.degree == 0


def test_factor_mu_zero():
    assert rounding_factor((), 0, 0).degree == 0


@pytest.mark.parametrize("a,n,mu", [((Fr(1, 2), Fr(1, 2)), 1, 2), ((1, 0), 2, 1)])
def test_factor_degree_precondition(a, n, mu):
    with pytest.raises(HullError):
        rounding_factor(a, n, mu)


def test_factor_negative_and_non_p_adic():
    with pytest.raises(HullError):
        rounding_factor((-1, 3), 0, 2)
    with pytest.raises(HullError):
        rounding_factor((Fr(1, 3), 4), 1, 2, p=2)


@given(st.lists(st.integers(0, 40), min_size=1, max_size=4), st.integers(0, 3))
def test_factor_properties(nums, level):
    a = tuple(Fr(k, 2**level) for k in nums)
    mu = len(a)
    n = int(sum(a)) - (mu - 1)
    if n < 0:
        return
    fac = rounding_factor(a, n, mu, p=2)
    assert fac.degree >= n
    assert all(0 <= r < 1 for r in fac.remainder)
    assert tuple(i + r for i, r in zip(fac.integer_part, fac.remainder)) == a


# ------------------------------------------------------------ text forms


@pytest.mark.parametrize(
    "text",
    [
        "x1^(-1) * x2^(-2) + 2 * x1^(-1/9)",
        "family(e){ x1^(-1/p^e) * x2^(-e) }",
        "x1^(-3) + family(e>=2){ x1^(-(2*e+1)) * x2^(-1/p^e) }",
        "2 * family(e>=1){ x2^(-(e-1/3)) * x1^(-5/p^e) }",
    ],
)
def test_round_trip(text):
    f = parse_formal_sum(text, 2, 3)
    assert parse_formal_sum(str(f), 2, 3) == f


@given(finite_sums(3))
def test_round_trip_random(f):
    assert parse_formal_sum(str(f), 3, P) == f


@pytest.mark.parametrize("text", ["x3^(-1)", "y^(-1)", "family(e){ x1^(e) }", "family(e){ x4^(-e) }"])
def test_parse_errors(text):
    with pytest.raises(HullError):
        parse_formal_sum(text, 2, 2)
