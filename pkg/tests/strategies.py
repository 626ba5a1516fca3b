"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from tckit.ffpoly import Polynomial


def polynomials(ctx, max_deg=3, max_terms=4):
    mono = st.tuples(*[st.integers(0, max_deg) for _ in range(ctx.n)])
    coef = st.integers(0, ctx.p - 1)
    return st.dictionaries(mono, coef, max_size=max_terms).map(lambda d: Polynomial(ctx, d))


def nonzero_polynomials(ctx, max_deg=3, max_terms=4):
    return polynomials(ctx, max_deg, max_terms).filter(lambda f: not f.is_zero())


def generator_lists(ctx, max_gens=3, max_deg=3):
    return st.lists(nonzero_polynomials(ctx, max_deg, 3), min_size=1, max_size=max_gens)
