"""Buchberger engine: normal forms, membership and equality of ideals.

The engine works on raw sparse vectors ``{(pos, a1, ..., an): coeff}`` so
the same code serves ideals (everything at position 0) and submodules of
free modules (position-over-term order).  Quotient rings are handled by
adjoining the context relations to every generator list.
"""

from __future__ import annotations

import hashlib
import heapq
import logging
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .ffpoly import Polynomial, RingContext, check_exponent, parse_polynomial

log = logging.getLogger(__name__)

ORDER_KINDS = ("grevlex", "lex", "graded-lex", "elim")


@dataclass(frozen=True)
class TermOrder:
    """Monomial order on exponent vectors.

    ``kind`` is one of grevlex, lex, graded-lex; ``permutation[i]`` is the
    variable index ranked i-th.  ``elim`` (kind "elim") is a block order:
    grevlex on the first ``block`` ranked variables, then grevlex on the rest.
    """

    kind: str = "grevlex"
    permutation: tuple[int, ...] | None = None
    block: int = 0

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise ValueError(f"unknown term order {self.kind!r}")
        if self.permutation is not None:
            perm = tuple(self.permutation)
            if sorted(perm) != list(range(len(perm))):
                raise ValueError(f"{perm} is not a permutation")
            object.__setattr__(self, "permutation", perm)

    def key(self, m: Sequence[int]) -> tuple:
        """Sort key: ascending keys list monomials from largest to smallest."""
        if self.permutation is not None:
            m = tuple(m[i] for i in self.permutation)
        kind = self.kind
        if kind == "grevlex":
            return (-sum(m),) + tuple(m[::-1])
        if kind == "lex":
            return tuple(-a for a in m)
        if kind == "graded-lex":
            return (-sum(m),) + tuple(-a for a in m)
        b = self.block
        head, tail = m[:b], m[b:]
        return (-sum(head),) + tuple(head[::-1]) + (-sum(tail),) + tuple(tail[::-1])

    def label(self) -> str:
        s = self.kind
        if self.permutation is not None:
            s += "[" + ",".join(map(str, self.permutation)) + "]"
        if self.kind == "elim":
            s += f"/{self.block}"
        return s


GREVLEX = TermOrder()


# ---------------------------------------------------------------- raw engine
#
# A raw vector is a dict mapping flat monomials (pos, a1..an) to residues.


class _Engine:
    """Term-order aware primitives over raw vectors for one ring."""

    def __init__(self, p: int, order: TermOrder):
        self.p = p
        self.order = order
        self._keys: dict = {}

    def key(self, m):
        k = self._keys.get(m)
        if k is None:
            k = (m[0],) + self.order.key(m[1:])
            self._keys[m] = k
        return k

    def lead(self, f: dict):
        return min(f, key=self.key)

    def monic(self, f: dict, rep=None):
        lm = self.lead(f)
        c = f[lm]
        if c == 1:
            return f, rep
        inv = pow(c, -1, self.p)
        p = self.p
        f = {m: (a * inv) % p for m, a in f.items()}
        if rep is not None:
            rep = {i: _scale(h, inv, p) for i, h in rep.items()}
        return f, rep

    def reduce(self, f: dict, basis: list, track: bool = False, rep=None):
        """Fully reduce ``f`` by ``basis`` (list of _Elt).

        Returns (remainder, quotient representation).  When ``track`` is set
        the representation is accumulated from the basis elements' own
        representations in terms of the tracked generators.
        """
        p = self.p
        key = self.key
        f = dict(f)
        heap = [(key(m), m) for m in f]
        heapq.heapify(heap)
        rem = {}
        quot = {}  # basis index -> {exps: coef}
        by_pos: dict[int, list] = {}
        for idx, g in enumerate(basis):
            by_pos.setdefault(g.lm[0], []).append(idx)
        while heap:
            _, m = heapq.heappop(heap)
            c = f.pop(m, 0)
            if not c:
                continue
            div = None
            for idx in by_pos.get(m[0], ()):
                lm = basis[idx].lm
                if all(a <= b for a, b in zip(lm[1:], m[1:])):
                    div = idx
                    break
            if div is None:
                rem[m] = c
                continue
            g = basis[div]
            t = tuple(b - a for a, b in zip(g.lm[1:], m[1:]))
            for gm, gc in g.tail:
                nm = (gm[0],) + tuple(a + b for a, b in zip(t, gm[1:]))
                old = f.get(nm)
                if old is None:
                    f[nm] = (-c * gc) % p
                    heapq.heappush(heap, (key(nm), nm))
                else:
                    v = (old - c * gc) % p
                    if v:
                        f[nm] = v
                    else:
                        # leave the stale heap entry; pop() will skip it
                        del f[nm]
            if track:
                q = quot.setdefault(div, {})
                q[t] = (q.get(t, 0) + c) % p
        if not track:
            return rem, None
        out = dict(rep) if rep else {}
        out = {i: dict(h) for i, h in out.items()}
        for idx, q in quot.items():
            q = {m: a for m, a in q.items() if a}
            if not q:
                continue
            for gi, h in basis[idx].rep.items():
                prod = _poly_mul(q, h, p)
                acc = out.setdefault(gi, {})
                for m, a in prod.items():
                    v = (acc.get(m, 0) - a) % p
                    if v:
                        acc[m] = v
                    else:
                        acc.pop(m, None)
        return rem, {i: h for i, h in out.items() if h}


def _scale(h: dict, c: int, p: int) -> dict:
    return {m: (a * c) % p for m, a in h.items() if (a * c) % p}


def _poly_mul(a: dict, b: dict, p: int) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            out[m] = (out.get(m, 0) + c1 * c2) % p
    return {m: c for m, c in out.items() if c}


def _add_into(acc: dict, h: dict, c: int, p: int):
    for m, a in h.items():
        v = (acc.get(m, 0) + c * a) % p
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)


class _Elt:
    __slots__ = ("poly", "lm", "tail", "rep")

    def __init__(self, poly: dict, lm, key, rep=None):
        self.poly = poly
        self.lm = lm
        self.tail = sorted(((m, c) for m, c in poly.items() if m != lm), key=lambda t: key(t[0]))
        self.rep = rep or {}


def _lcm(a, b):
    return (a[0],) + tuple(max(x, y) for x, y in zip(a[1:], b[1:]))


def _divides(a, b):
    return a[0] == b[0] and all(x <= y for x, y in zip(a[1:], b[1:]))


def _coprime(a, b):
    return all(not (x and y) for x, y in zip(a[1:], b[1:]))


def raw_buchberger(
    gens: list[dict],
    p: int,
    order: TermOrder,
    track: Sequence[bool] | None = None,
    ideal_mode: bool = True,
) -> list[_Elt]:
    """Reduced Groebner basis of the raw vectors ``gens``.

    ``track[i]`` marks generators whose cofactors are recorded; untracked
    generators (typically context relations) contribute nothing to the
    representations, which are therefore only valid modulo them.
    Normal selection strategy with Gebauer-Moeller pair pruning; the
    coprime-leading-term criterion is only applied in ``ideal_mode``.
    """
    eng = _Engine(p, order)
    key = eng.key
    tracking = track is not None
    G: list[_Elt] = []
    pairs: list = []  # heap of (key(lcm), i, j)
    live: set = set()
    counter = 0

    def add(f: dict, rep):
        nonlocal counter
        f, rep = eng.monic(f, rep)
        lm = eng.lead(f)
        elt = _Elt(f, lm, key, rep)
        k = len(G)
        # Gebauer-Moeller update
        new = []
        for i, g in enumerate(G):
            if g is None or g.lm[0] != lm[0]:
                continue
            new.append((i, _lcm(g.lm, lm)))
        # chain criterion on old pairs
        for pr in list(live):
            i, j, L = pr
            if (
                _divides(lm, L)
                and _lcm(G[i].lm, lm) != L
                and _lcm(G[j].lm, lm) != L
            ):
                live.discard(pr)
        # among new pairs, keep minimal lcms, dropping coprime ones
        new.sort(key=lambda t: key(t[1]))
        kept = []
        seen_lcms = []
        for i, L in new:
            if any(_divides(L2, L) and L2 != L for L2 in seen_lcms):
                continue
            if any(L2 == L for L2 in seen_lcms):
                continue
            seen_lcms.append(L)
            kept.append((i, L))
        # a lcm strictly divisible by another new lcm is redundant
        final = [(i, L) for i, L in kept if not any(_divides(L2, L) and L2 != L for _, L2 in kept)]
        G.append(elt)
        for i, L in final:
            if ideal_mode and _coprime(G[i].lm, lm):
                continue
            pr = (i, k, L)
            live.add(pr)
            heapq.heappush(pairs, (key(L), counter, pr))
            counter += 1

    for idx, g in enumerate(gens):
        if not g:
            continue
        rep = {idx: {(0,) * (len(next(iter(g))) - 1): 1}} if tracking and track[idx] else ({} if tracking else None)
        basis = [e for e in G if e is not None]
        r, rep = eng.reduce(g, basis, tracking, rep)
        if r:
            add(r, rep)

    while pairs:
        _, _, pr = heapq.heappop(pairs)
        if pr not in live:
            continue
        live.discard(pr)
        i, j, L = pr
        gi, gj = G[i], G[j]
        ti = tuple(a - b for a, b in zip(L[1:], gi.lm[1:]))
        tj = tuple(a - b for a, b in zip(L[1:], gj.lm[1:]))
        s: dict = {}
        for m, c in gi.tail:
            nm = (m[0],) + tuple(a + b for a, b in zip(ti, m[1:]))
            s[nm] = (s.get(nm, 0) + c) % p
        for m, c in gj.tail:
            nm = (m[0],) + tuple(a + b for a, b in zip(tj, m[1:]))
            s[nm] = (s.get(nm, 0) - c) % p
        s = {m: c for m, c in s.items() if c}
        rep = None
        if tracking:
            rep = {}
            for gi_idx, h in gi.rep.items():
                _add_into(rep.setdefault(gi_idx, {}), {tuple(a + b for a, b in zip(ti, m)): c for m, c in h.items()}, 1, p)
            for gi_idx, h in gj.rep.items():
                _add_into(rep.setdefault(gi_idx, {}), {tuple(a + b for a, b in zip(tj, m)): c for m, c in h.items()}, -1, p)
            rep = {i2: h for i2, h in rep.items() if h}
        if not s:
            continue
        basis = G  # reduce against everything found so far
        r, rep = eng.reduce(s, basis, tracking, rep)
        if r:
            add(r, rep)

    return _interreduce(G, eng, tracking)


def _interreduce(G: list[_Elt], eng: _Engine, tracking: bool) -> list[_Elt]:
    key = eng.key
    # minimal basis: drop elements whose leading monomial is divisible by another's
    G = sorted(G, key=lambda e: key(e.lm), reverse=True)  # smallest first
    minimal: list[_Elt] = []
    for e in G:
        if any(_divides(m.lm, e.lm) for m in minimal):
            continue
        minimal.append(e)
    out = []
    for i, e in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        tail = dict(e.tail)
        r, rep = eng.reduce(tail, others, tracking, None)
        if tracking:
            rep_full = {k: dict(v) for k, v in e.rep.items()}
            # e = lm + tail, tail = sum q*g + r  =>  lm + r = e - sum q*g
            for gi, h in (rep or {}).items():
                _add_into(rep_full.setdefault(gi, {}), h, 1, eng.p)
            # ``rep`` from reduce already carries the minus sign
            rep_full = {k: v for k, v in rep_full.items() if v}
        else:
            rep_full = None
        poly = dict(r)
        poly[e.lm] = 1
        out.append(_Elt(poly, e.lm, key, rep_full))
    out.sort(key=lambda e: key(e.lm))
    return out


# ------------------------------------------------------------- ideal layer


def _to_raw(f: Polynomial) -> dict:
    return {(0,) + m: c for m, c in f.as_dict().items()}


def _from_raw(ctx: RingContext, f: dict) -> Polynomial:
    return Polynomial(ctx.ambient, {m[1:]: c for m, c in f.items()}, _trusted=True)


def _rep_poly(ctx: RingContext, h: dict) -> Polynomial:
    return Polynomial(ctx.ambient, h, _trusted=True)


@dataclass(frozen=True)
class IdealSpec:
    """Ideal of ``ctx`` (the ring P/(relations)) given by generators."""

    generators: tuple[Polynomial, ...]
    ctx: RingContext

    def __post_init__(self):
        gens = tuple(self.ctx.coerce(g) for g in self.generators)
        if any(g.is_zero() for g in gens):
            raise ValueError("ideal generators must be nonzero")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, ctx: RingContext, gens: Iterable) -> "IdealSpec":
        if isinstance(gens, str):
            gens = split_generators(gens)
        polys = [ctx.coerce(g) for g in gens]
        return cls(tuple(g for g in polys if not g.is_zero()), ctx)

    def digest(self) -> str:
        h = hashlib.sha256(self.ctx.digest().encode())
        for g in self.generators:
            h.update(b"|" + str(g).encode())
        return h.hexdigest()

    def lifted_generators(self) -> list[Polynomial]:
        """Generators with the context relations adjoined (an ideal of P)."""
        return list(self.generators) + list(self.ctx.relations)

    def __add__(self, other: "IdealSpec") -> "IdealSpec":
        if other.ctx != self.ctx:
            raise ValueError("ideals live in different rings")
        return IdealSpec(self.generators + other.generators, self.ctx)

    def __str__(self):
        return "(" + ", ".join(map(str, self.generators)) + ")"


def split_generators(text: str) -> list[str]:
    """Split ``"(y, z^2+x)"`` or ``"y,z"`` into generator strings."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        depth = 0
        wrapped = True
        for i, ch in enumerate(s):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(s) - 1:
                wrapped = False
                break
        if wrapped:
            s = s[1:-1]
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    out.append("".join(cur))
    return [t.strip() for t in out if t.strip()]


@dataclass(frozen=True)
class GroebnerBasis:
    basis: tuple[Polynomial, ...]
    order: TermOrder
    reduced: bool
    source: str
    ctx: RingContext
    # cofactors of each basis element w.r.t. the tracked generators
    reps: tuple[dict, ...] | None = field(default=None, compare=False, repr=False)

    def leading_monomials(self) -> list[tuple[int, ...]]:
        return [min(g.as_dict(), key=self.order.key) for g in self.basis]

    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)


class GBCache:
    """Thread-safe in-memory cache with an optional on-disk mirror."""

    HEADER = "tckit-gb v1"

    def __init__(self, directory: str | os.PathLike | None = None):
        self._mem: dict = {}
        self._lock = threading.Lock()
        self.directory: Path | None = None
        if directory is not None:
            self.set_directory(directory)

    def set_directory(self, directory):
        if directory is None:
            self.directory = None
            return
        d = Path(directory)
        try:
            d.mkdir(parents=True, exist_ok=True)
            probe = d / ".tckit-probe"
            probe.write_text("ok")
            probe.unlink()
        except OSError as exc:
            log.warning("GB cache directory %s unusable (%s); disk cache disabled", d, exc)
            self.directory = None
            return
        self.directory = d

    def clear(self):
        with self._lock:
            self._mem.clear()

    def get(self, key: str, ctx: RingContext):
        with self._lock:
            hit = self._mem.get(key)
        if hit is not None:
            return hit
        if self.directory is None:
            return None
        polys = self.load(key, ctx)
        if polys is not None:
            with self._lock:
                self._mem[key] = polys
        return polys

    def put(self, key: str, polys: tuple[Polynomial, ...]):
        with self._lock:
            self._mem[key] = polys
        if self.directory is not None:
            self.store(key, polys)

    def path_for(self, key: str) -> Path:
        assert self.directory is not None
        return self.directory / f"{key}.gb"

    def store(self, key: str, polys: Sequence[Polynomial]):
        text = f"{self.HEADER} {key}\n" + "".join(f"{g}\n" for g in polys)
        try:
            fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".gb-")
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, self.path_for(key))
        except OSError as exc:
            log.warning("could not write GB cache entry %s: %s", key, exc)

    def load(self, key: str, ctx: RingContext):
        path = self.path_for(key)
        if not path.exists():
            return None
        try:
            lines = path.read_text().splitlines()
            head = lines[0].split()
            if " ".join(head[:2]) != self.HEADER or len(head) != 3 or head[2] != key:
                raise ValueError("digest mismatch")
            return tuple(parse_polynomial(line, ctx) for line in lines[1:] if line.strip())
        except Exception as exc:  # corrupt entry: recompute
            log.warning("ignoring corrupt GB cache entry %s: %s", path, exc)
            return None


CACHE = GBCache(os.environ.get("TCKIT_CACHE") or None)


def _cache_key(ctx: RingContext, gens: Sequence[Polynomial], order: TermOrder) -> str:
    h = hashlib.sha256(ctx.digest().encode())
    for g in gens:
        h.update(b"|" + str(g).encode())
    h.update(b"#" + order.label().encode())
    return h.hexdigest()


def buchberger(I: IdealSpec, order: TermOrder = GREVLEX, track: bool = False, cache: GBCache | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of I + (relations) in the polynomial ring.

    With ``track`` the basis carries, for every element, cofactors with
    respect to ``I.generators`` valid modulo the context relations.
    """
    ctx = I.ctx
    gens = I.lifted_generators()
    cache = CACHE if cache is None else cache
    key = _cache_key(ctx, gens, order)
    if not track:
        hit = cache.get(key, ctx.ambient)
        if hit is not None:
            return GroebnerBasis(hit, order, True, I.digest(), ctx)
    raw = [_to_raw(g) for g in gens]
    flags = [True] * len(I.generators) + [False] * len(ctx.relations) if track else None
    G = raw_buchberger(raw, ctx.p, order, flags, ideal_mode=True)
    basis = tuple(_from_raw(ctx, e.poly) for e in G)
    reps = None
    if track:
        reps = tuple({i: _rep_poly(ctx, h) for i, h in e.rep.items()} for e in G)
    else:
        cache.put(key, basis)
    return GroebnerBasis(basis, order, True, I.digest(), ctx, reps)


def groebner_basis(ctx: RingContext, gens: Iterable, order: TermOrder = GREVLEX) -> GroebnerBasis:
    return buchberger(IdealSpec.of(ctx, gens), order)


def _basis_elts(G: GroebnerBasis) -> list[_Elt]:
    eng = _Engine(G.ctx.p, G.order)
    out = []
    for i, g in enumerate(G.basis):
        raw = _to_raw(g)
        rep = None
        if G.reps is not None:
            rep = {k: v.as_dict() for k, v in G.reps[i].items()}
        out.append(_Elt(raw, eng.lead(raw), eng.key, rep))
    return out


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    """Unique remainder of f modulo the reduced basis G."""
    f = G.ctx.coerce(f)
    eng = _Engine(G.ctx.p, G.order)
    r, _ = eng.reduce(_to_raw(f), _basis_elts(G))
    return _from_raw(G.ctx, r)


def division(f: Polynomial, G: GroebnerBasis) -> tuple[Polynomial, dict[int, Polynomial]]:
    """Remainder of f and cofactors h_i with f - r = sum h_i * gen_i (mod relations).

    ``G`` must have been computed with ``track=True``; indices refer to the
    generators of the ideal the basis was computed from.
    """
    if G.reps is None:
        raise ValueError("basis was computed without cofactor tracking")
    f = G.ctx.coerce(f)
    eng = _Engine(G.ctx.p, G.order)
    r, rep = eng.reduce(_to_raw(f), _basis_elts(G), track=True, rep={})
    # reduce() accumulates -sum(q*rep); flip the sign
    p = G.ctx.p
    cof = {i: _rep_poly(G.ctx, {m: (-c) % p for m, c in h.items()}) for i, h in (rep or {}).items()}
    return _from_raw(G.ctx, r), cof


def ideal_membership(f: Polynomial, I: IdealSpec, order: TermOrder = GREVLEX) -> bool:
    """True iff f lies in I*R, R = P/(relations)."""
    f = I.ctx.coerce(f)
    if f.is_zero():
        return True
    return normal_form(f, buchberger(I, order)).is_zero()


def ideal_contains(I: IdealSpec, J: IdealSpec, order: TermOrder = GREVLEX) -> bool:
    """True iff J is contained in I (in R)."""
    G = buchberger(I, order)
    return all(normal_form(g, G).is_zero() for g in J.generators)


def ideal_equal(I: IdealSpec, J: IdealSpec, order: TermOrder = GREVLEX) -> bool:
    if I.ctx != J.ctx:
        raise ValueError("ideals live in different rings")
    return buchberger(I, order).basis == buchberger(J, order).basis


def standard_monomials(G: GroebnerBasis, limit: int | None = None) -> list[tuple[int, ...]] | None:
    """Monomials outside the leading-term ideal, or None if infinitely many.

    Returned in ascending grevlex order.  ``limit`` caps the enumeration.
    """
    n = G.ctx.n
    lms = G.leading_monomials()
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
            cur.append(a)
            rec(i + 1, cur)
            cur.pop()

    rec(0, [])
    out.sort(key=lambda m: tuple(-x for x in GREVLEX.key(m)))
    if limit is not None and len(out) > limit:
        raise ValueError(f"more than {limit} standard monomials")
    return out


def quotient_dimension(I: IdealSpec) -> int | None:
    """dim_K R/I, or None when infinite."""
    sm = standard_monomials(buchberger(I))
    return None if sm is None else len(sm)
