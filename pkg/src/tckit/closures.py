"""Frobenius powers, roots and closures; tight-closure evidence and oracle."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .ffpoly import Polynomial, RingContext, frobenius_power_poly, make_context
from .groebner import (
    GREVLEX,
    IdealSpec,
    TermOrder,
    buchberger,
    division,
    ideal_contains,
    ideal_equal,
    ideal_membership,
    normal_form,
    standard_monomials,
)
from .linalg import nullspace_mod_p

log = logging.getLogger(__name__)


class ChainDescentError(RuntimeError):
    """The Frobenius closure chain failed to ascend (an internal bug)."""


class RelationsPresent(ValueError):
    pass


# ----------------------------------------------------------- certificates


@dataclass(frozen=True)
class ClosureCertificate:
    """Witness that c * u^q lies in the q-th bracket power of the target.

    For ideals ``u`` and the generators are polynomials; for submodules of a
    presented module they are coordinate tuples and ``presentation`` holds
    the relation columns of the module (already Frobenius-twisted at replay
    time, so stored untwisted).
    """

    kind: str  # "frobenius" | "tight-evidence"
    e: int
    ctx: RingContext
    u: object
    generators: tuple
    cofactors: tuple[Polynomial, ...]
    test_element: Polynomial | None = None
    presentation: tuple = ()
    presentation_cofactors: tuple[Polynomial, ...] = ()

    def __post_init__(self):
        if self.kind not in ("frobenius", "tight-evidence"):
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if self.kind == "frobenius" and self.test_element is not None:
            raise ValueError("frobenius certificates carry no test element")
        if len(self.cofactors) != len(self.generators):
            raise ValueError("one cofactor per generator required")

    @property
    def q(self) -> int:
        return self.ctx.p**self.e

    @property
    def is_module(self) -> bool:
        return isinstance(self.u, tuple)

    def residual(self) -> tuple[Polynomial, ...]:
        """c*u^q - sum h_i g_i^q - sum k_j r_j^q, coordinatewise."""
        e = self.e
        c = self.test_element
        as_vec = (lambda v: v) if self.is_module else (lambda v: (v,))
        u = as_vec(self.u)
        res = [frobenius_power_poly(x, e) for x in u]
        if c is not None:
            res = [c * x for x in res]
        pairs = list(zip(self.generators, self.cofactors)) + list(
            zip(self.presentation, self.presentation_cofactors)
        )
        for g, h in pairs:
            for i, x in enumerate(as_vec(g)):
                res[i] = res[i] - h * frobenius_power_poly(x, e)
        return tuple(res)

    def verify(self) -> bool:
        """Replay the cofactor identity modulo the ring relations."""
        rel = IdealSpec((), self.ctx)
        G = buchberger(rel) if self.ctx.relations else None
        for r in self.residual():
            if r.is_zero():
                continue
            if G is None or not normal_form(r, G).is_zero():
                return False
        return True

    def to_json(self) -> dict:
        fmt_vec = (lambda v: [str(x) for x in v]) if self.is_module else str
        out = {
            "tckit": 1,
            "kind": self.kind,
            "p": self.ctx.p,
            "e": self.e,
            "vars": list(self.ctx.names),
            "weights": list(self.ctx.weights),
            "relations": [str(r) for r in self.ctx.relations],
            "u": fmt_vec(self.u),
            "ideal_generators": [fmt_vec(g) for g in self.generators],
            "test_element": None if self.test_element is None else str(self.test_element),
            "cofactors": [str(h) for h in self.cofactors],
        }
        if self.is_module:
            out["presentation"] = [fmt_vec(g) for g in self.presentation]
            out["presentation_cofactors"] = [str(h) for h in self.presentation_cofactors]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ClosureCertificate":
        if data.get("tckit") != 1:
            raise ValueError("unsupported certificate version")
        ctx = make_context(data["p"], data["vars"], data.get("weights"), data.get("relations", ()))
        is_module = isinstance(data["u"], list)
        conv = (lambda v: tuple(ctx.parse(x) for x in v)) if is_module else ctx.parse
        c = data.get("test_element")
        return cls(
            kind=data["kind"],
            e=int(data["e"]),
            ctx=ctx,
            u=conv(data["u"]),
            generators=tuple(conv(g) for g in data["ideal_generators"]),
            cofactors=tuple(ctx.parse(h) for h in data["cofactors"]),
            test_element=None if c is None else ctx.parse(c),
            presentation=tuple(conv(g) for g in data.get("presentation", ())),
            presentation_cofactors=tuple(ctx.parse(h) for h in data.get("presentation_cofactors", ())),
        )


def verify_certificate_json(data: dict) -> bool:
    return ClosureCertificate.from_json(data).verify()


# ------------------------------------------------------ powers and roots


def frobenius_power_ideal(I: IdealSpec, e: int) -> IdealSpec:
    """I^[q]: generated by q-th powers of the given generators."""
    if e < 0:
        raise ValueError("e must be nonnegative")
    if e == 0:
        return I
    return IdealSpec(tuple(frobenius_power_poly(g, e) for g in I.generators), I.ctx)


def root_decomposition(g: Polynomial, e: int) -> dict[tuple[int, ...], Polynomial]:
    """Write g = sum_mu h_mu^q x^mu with mu in [0,q)^n; returns {mu: h_mu}."""
    q = g.ctx.p**e
    parts: dict[tuple[int, ...], dict] = {}
    for m, c in g.as_dict().items():
        mu = tuple(a % q for a in m)
        parts.setdefault(mu, {})[tuple(a // q for a in m)] = c
    return {mu: Polynomial(g.ctx, t, _trusted=True) for mu, t in parts.items()}


def frobenius_root(I: IdealSpec, e: int) -> IdealSpec:
    """Smallest ideal J of the polynomial ring with I contained in J^[q]."""
    if I.ctx.relations:
        raise RelationsPresent("Frobenius roots are only computed in polynomial rings")
    if e < 0:
        raise ValueError("e must be nonnegative")
    hs: list[Polynomial] = []
    for g in I.generators:
        for mu, h in sorted(root_decomposition(g, e).items()):
            if h not in hs:
                hs.append(h)
    return IdealSpec(tuple(hs), I.ctx)


# --------------------------------------------------- Frobenius closure


def frobenius_closure_membership(
    u: Polynomial, I: IdealSpec, e_max: int, order: TermOrder = GREVLEX
) -> ClosureCertificate | None:
    """First e <= e_max with u^q in I^[q] R, as a certificate; None if not found.

    None means "not found up to e_max", never a proof of non-membership.
    """
    if e_max < 0:
        raise ValueError("e_max must be nonnegative")
    u = I.ctx.coerce(u)
    for e in range(e_max + 1):
        Iq = frobenius_power_ideal(I, e)
        uq = frobenius_power_poly(u, e)
        if not ideal_membership(uq, Iq, order):
            continue
        return _certificate("frobenius", e, u, I, Iq, uq, None, order)
    return None


def _certificate(kind, e, u, I, Iq, target, c, order) -> ClosureCertificate:
    ctx = I.ctx
    if target.is_zero():
        cof = {}
    else:
        G = buchberger(Iq, order, track=True)
        r, cof = division(target, G)
        assert r.is_zero()
    cofactors = tuple(cof.get(i, ctx.zero()) for i in range(len(I.generators)))
    cert = ClosureCertificate(kind, e, ctx, u, I.generators, cofactors, c)
    return cert


def frobenius_preimage(I: IdealSpec, e: int) -> IdealSpec:
    """{u in R : u^q in I^[q] R} by elimination.

    Lifts L = I^[q] + (relations) to P, intersects with the subring
    F_p[x^q] (an elimination with new variables t_i = x_i^q) and pulls back
    along the isomorphism t_i -> x_i.
    """
    ctx = I.ctx
    q = ctx.p**e
    n = ctx.n
    tnames = _fresh_names(ctx.names, n)
    big = make_context(ctx.p, list(ctx.names) + tnames, graded=False)
    emb = lambda f: Polynomial(big, {m + (0,) * n: c for m, c in f.as_dict().items()}, _trusted=True)
    gens = [emb(frobenius_power_poly(g, e)) for g in I.generators]
    gens += [emb(r) for r in ctx.relations]
    for i in range(n):
        gens.append(big.var(n + i) - big.var(i) ** q)
    G = buchberger(IdealSpec.of(big, gens), TermOrder("elim", block=n))
    out = []
    for g in G.basis:
        if all(not any(m[:n]) for m in g.as_dict()):
            out.append(Polynomial(ctx.ambient, {m[n:]: c for m, c in g.as_dict().items()}, _trusted=True))
    return IdealSpec(tuple(out), ctx)


def _fresh_names(names, n):
    out = []
    k = 0
    while len(out) < n:
        cand = f"t{k}"
        k += 1
        if cand not in names:
            out.append(cand)
    return out


def frobenius_kernel(I: IdealSpec, e: int, order: TermOrder = GREVLEX) -> IdealSpec:
    """{u : u^q in I^[q] R} for an ideal with R/I finite-dimensional.

    u -> u^q is F_p-linear and factors through R/I, so the answer is I plus
    the kernel of the linear map R/I -> R/I^[q] on the standard monomials.
    """
    ctx = I.ctx
    GI = buchberger(I, order)
    basis = standard_monomials(GI)
    if basis is None:
        raise ValueError("R/I is not finite-dimensional")
    if not basis or e == 0:
        return I
    Gq = buchberger(frobenius_power_ideal(I, e), order)
    q = ctx.p**e
    columns = []
    index: dict = {}
    for b in basis:
        img = normal_form(ctx.monomial(tuple(q * a for a in b)), Gq)
        col = {}
        for m, c in img.as_dict().items():
            col[index.setdefault(m, len(index))] = c
        columns.append(col)
    kernel = nullspace_mod_p(columns, len(index), ctx.p)
    extra = []
    for vec in kernel:
        f = Polynomial(ctx.ambient, {basis[j]: c for j, c in vec.items()})
        if not f.is_zero():
            extra.append(f)
    return IdealSpec(I.generators + tuple(extra), ctx)


@dataclass
class ClosureChain:
    ideal: IdealSpec
    stabilized: bool
    e_stop: int
    chain: list[IdealSpec] = field(default_factory=list)
    method: str = ""

    def __iter__(self):
        return iter((self.ideal, self.stabilized, self.e_stop))


def frobenius_closure_step(I: IdealSpec, e: int, order: TermOrder = GREVLEX) -> IdealSpec:
    """C_e = {u : u^q in I^[q] R}, choosing the cheaper exact route."""
    if _finite_quotient(I, order):
        return frobenius_kernel(I, e, order)
    if not I.ctx.relations:
        return I  # Frobenius is flat over a polynomial ring
    return frobenius_preimage(I, e)


def _finite_quotient(I: IdealSpec, order=GREVLEX) -> bool:
    return standard_monomials(buchberger(I, order)) is not None


def frobenius_closure_ideal(I: IdealSpec, e_max: int, order: TermOrder = GREVLEX) -> ClosureChain:
    """Ascending chain C_1 ⊆ C_2 ⊆ ... of the Frobenius closure of I.

    Stops at the first e with C_e = C_{e+1}.  There is no known a priori
    bound making this stop exact, so ``stabilized`` is a heuristic flag.
    """
    if e_max < 1:
        raise ValueError("e_max must be at least 1")
    method = "linear-algebra" if _finite_quotient(I, order) else (
        "flat" if not I.ctx.relations else "elimination")
    chain = [frobenius_closure_step(I, 1, order)]
    _check_ascent(I, chain[0], 0, order)
    for e in range(1, e_max + 1):
        nxt = frobenius_closure_step(I, e + 1, order)
        _check_ascent(chain[-1], nxt, e, order)
        chain.append(nxt)
        if ideal_equal(chain[-2], nxt, order):
            return ClosureChain(chain[e - 1], True, e, chain, method)
    return ClosureChain(chain[e_max - 1], False, e_max, chain, method)


def _check_ascent(lo: IdealSpec, hi: IdealSpec, e: int, order) -> None:
    if not ideal_contains(hi, lo, order):
        raise ChainDescentError(f"closure chain descended at e={e}")


# ------------------------------------------------------------ tight closure


@dataclass
class EvidenceReport:
    u: Polynomial
    ideal: IdealSpec
    test_element: Polynomial
    passes: list[bool]
    certificates: list[ClosureCertificate | None] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(self.passes)

    @property
    def first_failure(self) -> int | None:
        for e, ok in enumerate(self.passes):
            if not ok:
                return e
        return None


def tight_closure_evidence(
    u: Polynomial, I: IdealSpec, c: Polynomial, e_max: int, certify: bool = False,
    order: TermOrder = GREVLEX,
) -> EvidenceReport:
    """Check c*u^q in I^[q] R for every e <= e_max.

    All-pass is evidence for u in I*, not a proof; a failure only rules
    out this particular multiplier.
    """
    ctx = I.ctx
    u = ctx.coerce(u)
    c = ctx.coerce(c)
    if c.is_zero() or (ctx.relations and ideal_membership(c, IdealSpec((), ctx))):
        raise ValueError("test element must be nonzero in R")
    passes, certs = [], []
    for e in range(e_max + 1):
        Iq = frobenius_power_ideal(I, e)
        target = c * frobenius_power_poly(u, e)
        ok = ideal_membership(target, Iq, order)
        passes.append(ok)
        if certify:
            certs.append(_certificate("tight-evidence", e, u, I, Iq, target, c, order) if ok else None)
    return EvidenceReport(u, I, c, passes, certs)


def is_m_primary(I: IdealSpec, order: TermOrder = GREVLEX) -> bool:
    """True iff I is primary to m = (variables).

    R/I finite-dimensional is not enough for non-homogeneous I (other
    maximal ideals may contribute), so with D = dim R/I every variable must
    also satisfy x_i^D in I.
    """
    G = buchberger(I, order)
    sm = standard_monomials(G)
    if not sm:
        return False
    D = len(sm)
    return all(normal_form(I.ctx.var(i) ** D, G).is_zero() for i in range(I.ctx.n))


@dataclass(frozen=True)
class OracleRule:
    name: str
    identity: str
    scope: str
    citation: str

    def matches(self, ctx: RingContext) -> bool:
        raise NotImplementedError


class HasseZeroCubicRule(OracleRule):
    """Diagonal plane cubic x^3+y^3+z^3 with p = 2 mod 3."""

    def matches(self, ctx: RingContext) -> bool:
        if ctx.n != 3 or len(ctx.relations) != 1 or not ctx.is_standard_graded:
            return False
        if ctx.p % 3 != 2:
            return False
        rel = ctx.relations[0].as_dict()
        cubes = {(3, 0, 0), (0, 3, 0), (0, 0, 3)}
        return set(rel) == cubes and len(set(rel.values())) == 1


HASSE_ZERO_CUBIC = HasseZeroCubicRule(
    name="hasse-zero-cubic",
    identity="I* = I^F",
    scope="m-primary ideals (graded or not); m-coprimary module quotients",
    citation=(
        "Brenner: for the homogeneous coordinate ring of an elliptic curve with Hasse "
        "invariant 0, I* = I^F for m-primary graded ideals; the cubical cone "
        "x^3+y^3+z^3 has Hasse invariant 0 when p = 2 mod 3.  The graded statement "
        "extends to all finitely generated N in M with M/N m-coprimary."
    ),
)

ORACLE_RULES: list[OracleRule] = [HASSE_ZERO_CUBIC]


def match_rule(ctx: RingContext) -> OracleRule | None:
    for rule in ORACLE_RULES:
        if rule.matches(ctx):
            return rule
    return None


def default_test_element(ctx: RingContext) -> Polynomial:
    """Documented default multiplier: the last variable (z for the cubical cone)."""
    return ctx.var(ctx.n - 1)


@dataclass
class OracleVerdict:
    verdict: str  # "member" | "non-member" | "evidence-only"
    provenance: str
    rule: OracleRule | None = None
    certificate: ClosureCertificate | None = None
    closure: ClosureChain | None = None
    evidence: EvidenceReport | None = None
    note: str = ""


def tight_closure_oracle(
    u: Polynomial, I: IdealSpec, e_max: int = 4, c: Polynomial | None = None,
    order: TermOrder = GREVLEX,
) -> OracleVerdict:
    """Definitive tight-closure verdict where a theorem identifies I* with I^F."""
    ctx = I.ctx
    u = ctx.coerce(u)
    rule = match_rule(ctx)
    if rule is not None and is_m_primary(I, order):
        cert = frobenius_closure_membership(u, I, e_max, order)
        if cert is not None:
            return OracleVerdict("member", f"{rule.name}: {rule.identity}", rule, certificate=cert)
        chain = frobenius_closure_ideal(I, e_max, order)
        if ideal_membership(u, chain.ideal, order):
            # only reachable if the chain found u at some e > e_max
            cert = frobenius_closure_membership(u, I, chain.e_stop + 1, order)
            return OracleVerdict("member", f"{rule.name}: {rule.identity}", rule, cert, chain)
        if chain.stabilized:
            return OracleVerdict(
                "non-member", f"{rule.name}: {rule.identity}", rule, closure=chain,
                note=f"definitive modulo the stabilization heuristic (C_{chain.e_stop} = C_{chain.e_stop + 1})",
            )
        note = "closure chain did not stabilize by e_max"
    elif rule is not None:
        note = "ideal is not m-primary; rule does not apply"
    else:
        note = "no oracle rule matches this ring"
    c = default_test_element(ctx) if c is None else ctx.coerce(c)
    ev = tight_closure_evidence(u, I, c, e_max, order=order)
    return OracleVerdict("evidence-only", "evidence-only", rule, evidence=ev, note=note)


# ------------------------------------------------ m-adic intersections


def power_of_maximal_ideal(ctx: RingContext, k: int) -> list[Polynomial]:
    out = []

    def rec(i, left, cur):
        if i == ctx.n - 1:
            out.append(ctx.monomial(tuple(cur + [left])))
            return
        for a in range(left, -1, -1):
            rec(i + 1, left - a, cur + [a])

    rec(0, k, [])
    return out


def intersection_chain_membership(
    u: Polynomial, I: IdealSpec, k_max: int, e_max: int, order: TermOrder = GREVLEX
) -> list[tuple[int, ClosureCertificate | None]]:
    """For k = 1..k_max, Frobenius-closure membership of u in I + m^k."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    out = []
    for k in range(1, k_max + 1):
        Ik = IdealSpec(I.generators + tuple(power_of_maximal_ideal(I.ctx, k)), I.ctx)
        out.append((k, frobenius_closure_membership(u, Ik, e_max, order)))
    return out
