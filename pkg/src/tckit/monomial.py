"""Integral closure of monomial ideals via the Newton polyhedron.

The closure of a monomial ideal I is spanned by the monomials x^a with
a in conv(exponents of I) + R^n_{>=0}.  Everything is exact over Q.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd
from typing import Iterable, Sequence

Exp = tuple[int, ...]


def dominates(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x >= y for x, y in zip(a, b))


def minimalize(vectors: Iterable[Exp]) -> frozenset[Exp]:
    vs = sorted(set(vectors), key=sum)
    out: list[Exp] = []
    for v in vs:
        if not any(dominates(v, w) for w in out):
            out.append(v)
    return frozenset(out)


@dataclass(frozen=True)
class MonomialIdeal:
    exponents: frozenset[Exp]
    n: int
    names: tuple[str, ...] = ()

    def __post_init__(self):
        exps = frozenset(tuple(int(a) for a in v) for v in self.exponents)
        if any(len(v) != self.n or min(v, default=0) < 0 for v in exps):
            raise ValueError(f"exponent vectors must have {self.n} nonnegative entries")
        object.__setattr__(self, "exponents", minimalize(exps))
        if not self.names:
            object.__setattr__(self, "names", default_names(self.n))

    @property
    def generators(self) -> list[Exp]:
        return sorted(self.exponents, key=lambda v: (sum(v), tuple(-x for x in v)))

    @property
    def d(self) -> int:
        return len(self.exponents)

    def contains(self, a: Sequence[int]) -> bool:
        return any(dominates(a, v) for v in self.exponents)

    def __mul__(self, other: "MonomialIdeal") -> "MonomialIdeal":
        if other.n != self.n:
            raise ValueError("arity mismatch")
        sums = (tuple(x + y for x, y in zip(a, b)) for a in self.exponents for b in other.exponents)
        return MonomialIdeal(frozenset(sums), self.n, self.names)

    def power(self, m: int) -> "MonomialIdeal":
        if m < 0:
            raise ValueError("negative power")
        out = MonomialIdeal(frozenset({(0,) * self.n}), self.n, self.names)
        for _ in range(m):
            out = out * self
        return out

    def __str__(self):
        return "(" + ", ".join(format_monomial(v, self.names) for v in self.generators) + ")"


def default_names(n: int) -> tuple[str, ...]:
    return ("x", "y", "z")[:n] if n <= 3 else tuple(f"x{i + 1}" for i in range(n))


def format_monomial(a: Sequence[int], names: Sequence[str]) -> str:
    parts = [nm if k == 1 else f"{nm}^{k}" for nm, k in zip(names, a) if k]
    return "*".join(parts) or "1"


_MONO_FACTOR = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\^\s*(\d+))?\s*$")


def parse_monomial_ideal(text: str, names: Sequence[str] | None = None) -> MonomialIdeal:
    """Parse ``(x^2*y, y^3)``; variable order is ``names`` or order of appearance."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    mons = []
    seen: list[str] = list(names) if names else []
    for chunk in s.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError(f"empty generator in {text!r}")
        powers: dict[str, int] = {}
        if chunk != "1":
            for fac in chunk.split("*"):
                mt = _MONO_FACTOR.match(fac)
                if not mt:
                    raise ValueError(f"bad monomial factor {fac!r}")
                nm, k = mt.group(1), int(mt.group(2) or 1)
                if nm not in seen:
                    if names:
                        raise ValueError(f"unknown variable {nm!r}")
                    seen.append(nm)
                powers[nm] = powers.get(nm, 0) + k
        mons.append(powers)
    n = len(seen)
    if n == 0:
        raise ValueError("monomial ideal needs at least one variable")
    exps = frozenset(tuple(p.get(nm, 0) for nm in seen) for p in mons)
    return MonomialIdeal(exps, n, tuple(seen))


# --------------------------------------------------- exact linear algebra


def solve_exact(A: list[list[Fraction]], b: list[Fraction]) -> list[Fraction] | None:
    """Unique solution of a square system, or None if singular."""
    k = len(A)
    M = [list(row) + [rhs] for row, rhs in zip(A, b)]
    for col in range(k):
        piv = next((r for r in range(col, k) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [x / pv for x in M[col]]
        for r in range(k):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[r][k] for r in range(k)]


def closure_membership(a: Sequence[int], I: MonomialIdeal) -> bool:
    """Is x^a integral over I, i.e. a in conv(I) + R^n_{>=0}?

    Decides feasibility of sum(l_i v_i) + s = a, sum(l_i) = 1, l, s >= 0
    by enumerating Caratheodory bases: n+1 columns among the generator and
    slack columns, each solved exactly.
    """
    a = tuple(a)
    if len(a) != I.n:
        raise ValueError("dimension mismatch")
    if I.contains(a):
        return True
    n = I.n
    V = I.generators
    cols = [[Fraction(x) for x in v] + [Fraction(1)] for v in V]
    cols += [[Fraction(int(i == j)) for i in range(n)] + [Fraction(0)] for j in range(n)]
    rhs = [Fraction(x) for x in a] + [Fraction(1)]
    m = len(V)
    for basis in combinations(range(m + n), n + 1):
        if basis[0] >= m:
            continue  # needs at least one generator column
        A = [[cols[j][i] for j in basis] for i in range(n + 1)]
        sol = solve_exact(A, rhs)
        if sol is not None and all(x >= 0 for x in sol):
            return True
    return False


class NewtonPolyhedron:
    """H-description of conv(exponents) + R^n_{>=0} by brute-force facet search."""

    def __init__(self, I: MonomialIdeal):
        self.n = I.n
        self.points = I.generators
        self.inequalities = self._facets()

    def _facets(self) -> list[tuple[tuple[int, ...], int]]:
        n = self.n
        items = [("pt", v) for v in self.points] + [("ray", j) for j in range(n)]
        found: set = set()
        for combo in combinations(items, n):
            if not any(kind == "pt" for kind, _ in combo):
                continue
            rows = []
            for kind, val in combo:
                if kind == "pt":
                    rows.append([Fraction(x) for x in val] + [Fraction(-1)])
                else:
                    rows.append([Fraction(int(i == val)) for i in range(n)] + [Fraction(0)])
            ns = _nullspace(rows, n + 1)
            if len(ns) != 1:
                continue
            vec = ns[0]
            w, b = vec[:n], vec[n]
            if any(x < 0 for x in w):
                if all(x <= 0 for x in w):
                    w, b = [-x for x in w], -b
                else:
                    continue
            if all(x == 0 for x in w):
                continue
            if any(sum(x * y for x, y in zip(w, v)) < b for v in self.points):
                continue
            found.add(_integral(w, b))
        return sorted(found)

    def contains(self, a: Sequence[int]) -> bool:
        return all(sum(x * y for x, y in zip(w, a)) >= b for w, b in self.inequalities)

    def min_last(self, head: Sequence[int]) -> int:
        """Least t >= 0 with (head, t) inside; inequalities without a last
        coordinate that fail make the answer infinite (returned as -1)."""
        t = 0
        for w, b in self.inequalities:
            rest = b - sum(x * y for x, y in zip(w, head))
            if w[-1] == 0:
                if rest > 0:
                    return -1
                continue
            need = -((-rest) // w[-1])
            t = max(t, need)
        return t


def _integral(w, b):
    den = 1
    for x in list(w) + [b]:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in list(w) + [b]]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    g = g or 1
    ints = [x // g for x in ints]
    return tuple(ints[:-1]), ints[-1]


def _nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][f]
        out.append(v)
    return out


def integral_closure_generators(I: MonomialIdeal) -> MonomialIdeal:
    """Minimal monomial generators of the integral closure of I.

    Minimal generators lie in the box [0, max_i]^n (lowering a coordinate
    above every generator's keeps the point inside), so the lower boundary
    of the polyhedron over that box is scanned column by column.
    """
    if not I.exponents:
        raise ValueError("empty ideal")
    n = I.n
    P = NewtonPolyhedron(I)
    top = [max(v[i] for v in I.exponents) for i in range(n)]
    if n == 1:
        return MonomialIdeal(frozenset({(min(v[0] for v in I.exponents),)}), 1, I.names)
    height: dict = {}
    for head in product(*(range(t + 1) for t in top[:-1])):
        t = P.min_last(head)
        if 0 <= t <= top[-1]:
            height[head] = t
    gens = set()
    for head, t in height.items():
        minimal = True
        for i in range(n - 1):
            if head[i] == 0:
                continue
            lower = head[:i] + (head[i] - 1,) + head[i + 1 :]
            tl = height.get(lower)
            if tl is not None and tl <= t:
                minimal = False
                break
        if minimal:
            gens.add(head + (t,))
    return MonomialIdeal(frozenset(gens), n, I.names)


def integral_closure_bruteforce(I: MonomialIdeal) -> MonomialIdeal:
    """Box enumeration with the Caratheodory membership test (slow oracle)."""
    n = I.n
    top = [max(v[i] for v in I.exponents) for i in range(n)]
    members = [a for a in product(*(range(t + 1) for t in top)) if closure_membership(a, I)]
    return MonomialIdeal(frozenset(members), n, I.names)


@dataclass
class BrianconSkodaReport:
    ideal: MonomialIdeal
    k: int
    d: int
    closure: MonomialIdeal
    target: MonomialIdeal
    counterexamples: list[Exp]

    @property
    def passed(self) -> bool:
        return not self.counterexamples


def briancon_skoda_check(I: MonomialIdeal, k: int) -> BrianconSkodaReport:
    """Check closure(I^(d+k)) ⊆ I^(k+1), d = number of minimal generators."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    d = I.d
    closure = integral_closure_generators(I.power(d + k))
    target = I.power(k + 1)
    bad = [a for a in closure.generators if not target.contains(a)]
    return BrianconSkodaReport(I, k, d, closure, target, bad)
