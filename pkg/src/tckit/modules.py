"""Presented (graded) modules, the Frobenius functor and module closures.

A module is F / (relation columns) with F = R^r graded by ``shifts`` (the
degree of each basis vector).  Membership is decided by a module Groebner
basis, position-over-term, with the ring relations adjoined in every
coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Sequence

from .closures import ClosureCertificate, power_of_maximal_ideal
from .ffpoly import Polynomial, RingContext, frobenius_power_poly
from .groebner import GREVLEX, IdealSpec, TermOrder, _Elt, _Engine, buchberger, normal_form, raw_buchberger, standard_monomials

Vector = tuple[Polynomial, ...]


class GradingError(ValueError):
    pass


@dataclass(frozen=True)
class GradedFreeModule:
    rank: int
    shifts: tuple[int, ...]

    def __post_init__(self):
        if self.rank < 0 or len(self.shifts) != self.rank:
            raise ValueError("need one shift per basis vector")


def vector_degree(v: Sequence[Polynomial], shifts: Sequence[int]) -> int | None:
    """Degree of a homogeneous vector (None for zero); raises if inhomogeneous."""
    deg = None
    for f, s in zip(v, shifts):
        if f.is_zero():
            continue
        d, homog = f.degree_check()
        if not homog or (deg is not None and d + s != deg):
            raise GradingError(f"vector {[str(x) for x in v]} is not homogeneous for shifts {list(shifts)}")
        deg = d + s
    return deg


@dataclass(frozen=True)
class PresentedModule:
    """Cokernel of the relation columns inside the graded free module."""

    ctx: RingContext
    ambient: GradedFreeModule
    relations: tuple[Vector, ...]
    graded: bool = True

    def __post_init__(self):
        r = self.ambient.rank
        cols = []
        for col in self.relations:
            col = tuple(self.ctx.coerce(x) for x in col)
            if len(col) != r:
                raise ValueError(f"relation column of length {len(col)} in rank {r}")
            cols.append(col)
        object.__setattr__(self, "relations", tuple(cols))
        if self.graded:
            for col in cols:
                vector_degree(col, self.ambient.shifts)

    @classmethod
    def free(cls, ctx: RingContext, rank: int = 1, shifts=None) -> "PresentedModule":
        shifts = tuple(shifts) if shifts is not None else (0,) * rank
        return cls(ctx, GradedFreeModule(rank, shifts), ())

    @classmethod
    def from_rows(cls, ctx: RingContext, shifts: Sequence[int], rows: Sequence[Sequence], graded=True) -> "PresentedModule":
        """Build from a matrix written row by row (columns are relations)."""
        rows = [[ctx.coerce(x) for x in row] for row in rows]
        r = len(shifts)
        if rows and len(rows) != r:
            raise ValueError(f"{len(rows)} rows for rank {r}")
        ncols = len(rows[0]) if rows else 0
        if any(len(row) != ncols for row in rows):
            raise ValueError("ragged relation matrix")
        cols = tuple(tuple(rows[i][j] for i in range(r)) for j in range(ncols))
        return cls(ctx, GradedFreeModule(r, tuple(shifts)), cols, graded)

    @property
    def rank(self) -> int:
        return self.ambient.rank

    def element(self, coords) -> Vector:
        if isinstance(coords, (str, Polynomial)):
            coords = [coords]
        v = tuple(self.ctx.coerce(x) for x in coords)
        if len(v) != self.rank:
            raise ValueError(f"element of length {len(v)} in rank {self.rank}")
        return v

    def rows(self) -> list[list[Polynomial]]:
        return [[col[i] for col in self.relations] for i in range(self.rank)]


@dataclass(frozen=True)
class SubmoduleSpec:
    generators: tuple[Vector, ...]

    @classmethod
    def of(cls, M: PresentedModule, gens) -> "SubmoduleSpec":
        return cls(tuple(M.element(g) for g in gens))


def cyclic_module(ctx: RingContext) -> PresentedModule:
    return PresentedModule.free(ctx, 1)


def ideal_as_submodule(I: IdealSpec) -> tuple[PresentedModule, SubmoduleSpec]:
    M = cyclic_module(I.ctx)
    return M, SubmoduleSpec(tuple((g,) for g in I.generators))


def frobenius_functor(M: PresentedModule, e: int) -> PresentedModule:
    """Apply F^e: entries raised to the q-th power, shifts scaled by q."""
    if e < 0:
        raise ValueError("e must be nonnegative")
    if e == 0:
        return M
    q = M.ctx.p**e
    cols = tuple(tuple(frobenius_power_poly(x, e) for x in col) for col in M.relations)
    shifts = tuple(q * s for s in M.ambient.shifts)
    return PresentedModule(M.ctx, GradedFreeModule(M.rank, shifts), cols, M.graded)


def bracket_image(N: SubmoduleSpec, M: PresentedModule, e: int) -> SubmoduleSpec:
    """N^[q]_M inside F^e(M): coordinatewise q-th powers of N's generators."""
    return SubmoduleSpec(tuple(tuple(frobenius_power_poly(x, e) for x in g) for g in N.generators))


# ----------------------------------------------------------- module GB


def _vec_to_raw(v: Vector) -> dict:
    out = {}
    for pos, f in enumerate(v):
        for m, c in f.as_dict().items():
            out[(pos,) + m] = c
    return out


def _raw_to_vec(ctx: RingContext, raw: dict, rank: int) -> Vector:
    parts: list[dict] = [{} for _ in range(rank)]
    for m, c in raw.items():
        parts[m[0]][m[1:]] = c
    return tuple(Polynomial(ctx.ambient, t, _trusted=True) for t in parts)


def _unit_multiples(ctx: RingContext, rank: int) -> list[dict]:
    return [_vec_to_raw(tuple(rel if i == j else ctx.zero() for j in range(rank))) for i in range(rank) for rel in ctx.relations]


class ModuleGB:
    """Groebner basis of a submodule of R^r (relations adjoined per coordinate)."""

    def __init__(self, ctx: RingContext, rank: int, gens: Sequence[Vector], order: TermOrder = GREVLEX, track: bool = False):
        self.ctx = ctx
        self.rank = rank
        self.order = order
        raw = [_vec_to_raw(g) for g in gens] + _unit_multiples(ctx, rank)
        flags = [True] * len(gens) + [False] * (len(raw) - len(gens)) if track else None
        self.ngens = len(gens)
        self.elts: list[_Elt] = raw_buchberger(raw, ctx.p, order, flags, ideal_mode=(rank == 1))
        self.track = track
        self._eng = _Engine(ctx.p, order)

    def reduce(self, v: Vector) -> Vector:
        r, _ = self._eng.reduce(_vec_to_raw(v), self.elts)
        return _raw_to_vec(self.ctx, r, self.rank)

    def contains(self, v: Vector) -> bool:
        return all(x.is_zero() for x in self.reduce(v))

    def lift(self, v: Vector) -> tuple[Vector, list[Polynomial]]:
        """Remainder and cofactors w.r.t. the tracked generators."""
        if not self.track:
            raise ValueError("basis built without tracking")
        r, rep = self._eng.reduce(_vec_to_raw(v), self.elts, track=True, rep={})
        p = self.ctx.p
        cof = [self.ctx.zero()] * self.ngens
        for i, h in (rep or {}).items():
            cof[i] = Polynomial(self.ctx.ambient, {m: (-c) % p for m, c in h.items()}, _trusted=True)
        return _raw_to_vec(self.ctx, r, self.rank), cof

    def leading_monomials(self) -> list[tuple[int, ...]]:
        return [e.lm for e in self.elts]

    def standard_monomials(self) -> list[tuple[int, ...]] | None:
        """Flat (pos, exps) monomials outside the leading module, None if infinite."""
        out = []
        n = self.ctx.n
        for pos in range(self.rank):
            lms = [lm[1:] for lm in self.leading_monomials() if lm[0] == pos]
            sub = _staircase(lms, n)
            if sub is None:
                return None
            out.extend((pos,) + m for m in sub)
        return out

    def infinite_ray(self) -> tuple[int, int] | None:
        """(position, variable) whose pure powers all stay standard, if any."""
        n = self.ctx.n
        for pos in range(self.rank):
            lms = [lm[1:] for lm in self.leading_monomials() if lm[0] == pos]
            if any(not any(m) for m in lms):
                continue
            for i in range(n):
                if not any(m[i] and all(m[j] == 0 for j in range(n) if j != i) for m in lms):
                    return pos, i
        return None


def _staircase(lms, n):
    if any(not any(m) for m in lms):
        return []
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if m[i] and all(m[j] == 0 for j in range(n) if j != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    out = []

    def rec(i, cur):
        if i == n:
            m = tuple(cur)
            if not any(all(a <= b for a, b in zip(lm, m)) for lm in lms):
                out.append(m)
            return
        for a in range(bounds[i]):
            rec(i + 1, cur + [a])

    rec(0, [])
    return out


def _submodule_gb(N: SubmoduleSpec, M: PresentedModule, order=GREVLEX, track=False) -> ModuleGB:
    gens = list(N.generators) + list(M.relations)
    return ModuleGB(M.ctx, M.rank, gens, order, track)


def module_membership(u, N: SubmoduleSpec, M: PresentedModule, order: TermOrder = GREVLEX) -> bool:
    """True iff u in N + relations(M) inside the ambient free module."""
    u = M.element(u)
    if all(x.is_zero() for x in u):
        return True
    return _submodule_gb(N, M, order).contains(u)


def module_frobenius_closure_membership(
    u, N: SubmoduleSpec, M: PresentedModule, e_max: int, order: TermOrder = GREVLEX
) -> ClosureCertificate | None:
    """First e <= e_max with u^q in N^[q] of F^e(M); None if not found."""
    if e_max < 0:
        raise ValueError("e_max must be nonnegative")
    u = M.element(u)
    for e in range(e_max + 1):
        Me = frobenius_functor(M, e)
        Ne = bracket_image(N, M, e)
        uq = tuple(frobenius_power_poly(x, e) for x in u)
        if not module_membership(uq, Ne, Me, order):
            continue
        gb = _submodule_gb(Ne, Me, order, track=True)
        r, cof = gb.lift(uq)
        assert all(x.is_zero() for x in r)
        k = len(N.generators)
        return ClosureCertificate(
            "frobenius", e, M.ctx, u, N.generators, tuple(cof[:k]),
            presentation=M.relations, presentation_cofactors=tuple(cof[k:]),
        )
    return None


@dataclass
class CoprimaryVerdict:
    verdict: str  # "true" | "false" | "unknown"
    n: int | None = None
    witness: tuple[int, int] | None = None  # (position, variable) of an infinite ray
    dimension: int | None = None

    def __bool__(self):
        return self.verdict == "true"


def is_m_coprimary(M: PresentedModule, N: SubmoduleSpec, cap: int = 64, order: TermOrder = GREVLEX) -> CoprimaryVerdict:
    """Is m^n M contained in N + relations for some n?  Least n by ascending search.

    An infinite standard ray gives a definitive "false"; a finite quotient of
    dimension D that is not killed by m^D is also definitively not
    m-coprimary.  Running past ``cap`` before either happens gives "unknown".
    """
    gb = _submodule_gb(N, M, order)
    ray = gb.infinite_ray()
    if ray is not None:
        return CoprimaryVerdict("false", witness=ray)
    D = len(gb.standard_monomials())
    ctx = M.ctx
    for n in range(0, min(cap, D) + 1):
        mons = power_of_maximal_ideal(ctx, n) if n else [ctx.one()]
        ok = True
        for i in range(M.rank):
            for mono in mons:
                v = tuple(mono if j == i else ctx.zero() for j in range(M.rank))
                if not gb.contains(v):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return CoprimaryVerdict("true", n=n, dimension=D)
    if cap >= D:
        # m^D Q != 0 for a D-dimensional Q means the m-part never dies
        return CoprimaryVerdict("false", dimension=D)
    return CoprimaryVerdict("unknown", dimension=D)


# --------------------------------------------- graded dual truncations


def graded_dual_dimensions(ctx: RingContext, q: int, n: int) -> list[tuple[int, int]]:
    """dim W_j of R^{1/q} / m^n R^{1/q}, W_j spanning degrees in (j-1, j].

    R^{1/q} is identified with R (r^{1/q} -> r, degrees divided by q), under
    which m^n R^{1/q} becomes (m^n)^[q].  These equal dim V_{-j} of the
    graded K-dual.  Only j with nonzero dimension are listed.
    """
    if not ctx.is_standard_graded:
        raise ValueError("graded duals need a standard graded ring")
    e = _log_p(q, ctx.p)
    if n < 1:
        raise ValueError("n must be at least 1")
    gens = [frobenius_power_poly(g, e) for g in power_of_maximal_ideal(ctx, n)]
    G = buchberger(IdealSpec.of(ctx, gens))
    sm = standard_monomials(G)
    counts: dict[int, int] = {}
    for m in sm:
        D = sum(m)
        j = -((-D) // q)  # ceil(D/q): the window (j-1, j] holding D/q
        counts[j] = counts.get(j, 0) + 1
    return sorted(counts.items())


def degree_components(ctx: RingContext, q: int, n: int) -> dict:
    """dim of each homogeneous degree D/q piece of R^{1/q}/m^n R^{1/q}."""
    from fractions import Fraction

    e = _log_p(q, ctx.p)
    gens = [frobenius_power_poly(g, e) for g in power_of_maximal_ideal(ctx, n)]
    sm = standard_monomials(buchberger(IdealSpec.of(ctx, gens)))
    out: dict = {}
    for m in sm:
        d = Fraction(sum(m), q)
        out[d] = out.get(d, 0) + 1
    return dict(sorted(out.items()))


def _log_p(q: int, p: int) -> int:
    e = 0
    x = q
    while x > 1 and x % p == 0:
        x //= p
        e += 1
    if x != 1:
        raise ValueError(f"{q} is not a power of {p}")
    return e
