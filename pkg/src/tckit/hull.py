"""Formal sums of fractional inverse monomials with DCC support.

Elements look like sum c_a x^(-a) with a in Z[1/p]^n, a >= 0.  A monomial
x^b with b >= 0 acts by shifting exponents; a product term dies as soon as
some coordinate of its exponent is strictly positive (the kill rule).

Infinite supports are limited to parametric families where each coordinate
is a constant, an arithmetic progression -(alpha*e + beta), or a geometric
one -gamma/p^e.  Coefficients live in F_p.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

Vec = tuple[Fraction, ...]


class HullError(ValueError):
    pass


class IndeterminateDCC(HullError):
    """Raised when DCC of a support cannot be certified."""


# ------------------------------------------------------------ exponents


@dataclass(frozen=True)
class FracExponent:
    """numerator / p^level, in lowest terms with respect to p."""

    numerator: int
    level: int
    p: int

    def __post_init__(self):
        if self.level < 0:
            raise HullError("level must be nonnegative")
        num, lev = self.numerator, self.level
        while lev > 0 and num % self.p == 0:
            num //= self.p
            lev -= 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "level", lev)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.p**self.level)

    @classmethod
    def from_fraction(cls, x: Fraction, p: int) -> "FracExponent":
        x = Fraction(x)
        den, lev = x.denominator, 0
        while den % p == 0:
            den //= p
            lev += 1
        if den != 1:
            raise HullError(f"{x} is not in Z[1/{p}]")
        return cls(x.numerator, lev, p)


def check_vector(v: Iterable, p: int) -> Vec:
    out = tuple(Fraction(x) for x in v)
    for x in out:
        FracExponent.from_fraction(x, p)
    return out


def leq(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def strictly_below(a: Sequence[Fraction], b: Sequence[Fraction]) -> bool:
    return leq(a, b) and tuple(a) != tuple(b)


def killed(v: Sequence[Fraction]) -> bool:
    return any(x > 0 for x in v)


# ------------------------------------------------------------ families


@dataclass(frozen=True)
class Coord:
    """One coordinate of a family: kind in {const, arith, geom}."""

    kind: str
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.kind == "const":
            if self.a > 0:
                raise HullError("constant coordinate must be <= 0")
        elif self.kind == "arith":
            if self.a <= 0:
                raise HullError("arithmetic coordinate needs alpha > 0")
        elif self.kind == "geom":
            if self.a <= 0:
                raise HullError("geometric coordinate needs gamma > 0")
        else:
            raise HullError(f"unknown coordinate kind {self.kind!r}")

    def at(self, e: int, p: int) -> Fraction:
        if self.kind == "const":
            return self.a
        if self.kind == "arith":
            return -(self.a * e + self.b)
        return -self.a / Fraction(p) ** e

    @property
    def trend(self) -> int:
        return {"const": 0, "arith": -1, "geom": 1}[self.kind]

    def shifted(self, b: Fraction) -> "Coord":
        """The coordinate after adding b (assumes the result stays <= 0 eventually)."""
        if self.kind == "const":
            return Coord("const", self.a + b)
        if self.kind == "arith":
            return Coord("arith", self.a, self.b - b)
        if b != 0:
            raise HullError("geometric coordinate cannot absorb a shift")
        return self

    def text(self, p: int) -> str:
        if self.kind == "const":
            return _fmt_frac(self.a)
        if self.kind == "arith":
            inner = "e" if self.a == 1 else f"{_fmt_frac(self.a)}*e"
            if self.b:
                sign = "+" if self.b > 0 else "-"
                return f"-({inner}{sign}{_fmt_frac(abs(self.b))})"
            return f"-{inner}" if self.a == 1 else f"-({inner})"
        return f"-{_fmt_frac(self.a)}/p^e"


@dataclass(frozen=True)
class Family:
    coords: tuple[Coord, ...]
    p: int
    start: int = 0

    @property
    def n(self) -> int:
        return len(self.coords)

    def at(self, e: int) -> Vec:
        return tuple(c.at(e, self.p) for c in self.coords)

    def points(self, upto: int) -> list[tuple[int, Vec]]:
        return [(e, self.at(e)) for e in range(self.start, upto + 1)]

    def validate(self) -> None:
        if all(c.kind == "const" for c in self.coords):
            raise HullError("family must vary with e")
        if killed(self.at(self.start)):
            raise HullError("family points must have all coordinates <= 0")

    def index_of(self, v: Sequence[Fraction]) -> int | None:
        """The e >= start with at(e) == v, if any."""
        cand = None
        for c, x in zip(self.coords, v):
            if c.kind == "arith":
                e = (-x - c.b) / c.a
            elif c.kind == "geom":
                if x >= 0:
                    return None
                r = c.a / -x
                e, pw = 0, Fraction(1)
                while pw < r:
                    pw *= self.p
                    e += 1
                if pw != r:
                    return None
            else:
                continue
            if Fraction(e).denominator != 1:
                return None
            cand = int(e)
            break
        if cand is None or cand < self.start:
            return None
        return cand if self.at(cand) == tuple(v) else None

    def text(self) -> str:
        head = "family(e)" if self.start == 0 else f"family(e>={self.start})"
        parts = [f"x{i + 1}^({c.text(self.p)})" for i, c in enumerate(self.coords)
                 if not (c.kind == "const" and c.a == 0)]
        return head + "{ " + " * ".join(parts) + " }"


@dataclass
class SupportDescription:
    finite: set = field(default_factory=set)
    families: list = field(default_factory=list)


@dataclass
class DCCVerdict:
    verdict: str  # pass / fail / indeterminate
    witness: object = None
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _family_dcc(fam: Family) -> DCCVerdict:
    trends = {c.trend for c in fam.coords}
    if trends == {0}:
        return DCCVerdict("indeterminate", reason="family is constant in e")
    if 1 in trends and -1 in trends:
        return DCCVerdict("pass", reason="antichain: one coordinate rises while another falls")
    if -1 in trends:
        a, b = fam.at(fam.start), fam.at(fam.start + 1)
        return DCCVerdict("fail", witness=(a, b), reason="strictly descending family")
    # only rising and constant coordinates: a strictly ascending chain in e
    return DCCVerdict("pass", reason="strictly ascending family")


def dcc_check(S: SupportDescription) -> DCCVerdict:
    """Certify DCC of a support.  A finite union of DCC sets is DCC, so
    each part is judged on its own; the witness is the finite minimal set."""
    finite = [tuple(v) for v in S.finite]
    minimal = [v for v in finite if not any(strictly_below(w, v) for w in finite)]
    reasons = ["finite part"] if finite or not S.families else []
    verdict = "pass"
    for fam in S.families:
        v = _family_dcc(fam)
        if v.verdict == "fail":
            return v
        if v.verdict == "indeterminate":
            verdict = "indeterminate"
        reasons.append(v.reason)
    return DCCVerdict(verdict, witness=minimal, reason="; ".join(reasons))


# ------------------------------------------------------------ elements


def _norm_terms(terms: Mapping, p: int, n: int) -> dict[Vec, int]:
    out: dict[Vec, int] = {}
    for v, c in terms.items():
        v = check_vector(v, p)
        if len(v) != n:
            raise HullError("arity mismatch")
        c = int(c) % p
        if c:
            out[v] = (out.get(v, 0) + c) % p
            if not out[v]:
                del out[v]
    return out


@dataclass(frozen=True)
class FracPoly:
    """Element of F_p[x^(1/p^inf)], exponents >= 0."""

    p: int
    n: int
    terms: Mapping[Vec, int]

    def __post_init__(self):
        t = _norm_terms(self.terms, self.p, self.n)
        if any(x < 0 for v in t for x in v):
            raise HullError("scalar exponents must be nonnegative")
        object.__setattr__(self, "terms", t)

    @classmethod
    def monomial(cls, p: int, b: Sequence, c: int = 1) -> "FracPoly":
        return cls(p, len(b), {tuple(Fraction(x) for x in b): c})

    def _check(self, other: "FracPoly"):
        if (self.p, self.n) != (other.p, other.n):
            raise HullError("arity/characteristic mismatch")

    def __add__(self, other: "FracPoly") -> "FracPoly":
        self._check(other)
        t = dict(self.terms)
        for v, c in other.terms.items():
            t[v] = t.get(v, 0) + c
        return FracPoly(self.p, self.n, t)

    def __mul__(self, other: "FracPoly") -> "FracPoly":
        self._check(other)
        t: dict[Vec, int] = {}
        for v, c in self.terms.items():
            for w, d in other.terms.items():
                k = tuple(x + y for x, y in zip(v, w))
                t[k] = t.get(k, 0) + c * d
        return FracPoly(self.p, self.n, t)

    def __str__(self):
        return format_terms(self.terms) or "0"


@dataclass(frozen=True)
class FormalSum:
    p: int
    n: int
    terms: Mapping[Vec, int] = field(default_factory=dict)
    families: tuple[tuple[Family, int], ...] = ()

    def __post_init__(self):
        t = _norm_terms(self.terms, self.p, self.n)
        if any(killed(v) for v in t):
            raise HullError("support vectors must have all coordinates <= 0")
        fams = []
        for fam, c in self.families:
            if fam.n != self.n or fam.p != self.p:
                raise HullError("arity/characteristic mismatch")
            fam.validate()
            if c % self.p:
                fams.append((fam, c % self.p))
        object.__setattr__(self, "terms", t)
        object.__setattr__(self, "families", tuple(fams))
        v = dcc_check(self.support())
        if v.verdict == "fail":
            raise HullError(f"support violates DCC: {v.witness}")

    def support(self) -> SupportDescription:
        return SupportDescription(set(self.terms), [f for f, _ in self.families])

    @property
    def is_finite(self) -> bool:
        return not self.families

    def is_zero(self) -> bool:
        return not self.terms and not self.families

    def evaluate(self, E: int) -> dict[Vec, int]:
        """Finite truncation: family members with index <= E folded in."""
        out = dict(self.terms)
        for fam, c in self.families:
            for _, v in fam.points(E):
                out[v] = (out.get(v, 0) + c) % self.p
                if not out[v]:
                    del out[v]
        return out

    def __add__(self, other: "FormalSum") -> "FormalSum":
        if (self.p, self.n) != (other.p, other.n):
            raise HullError("arity/characteristic mismatch")
        t = dict(self.terms)
        for v, c in other.terms.items():
            t[v] = t.get(v, 0) + c
        return FormalSum(self.p, self.n, t, self.families + other.families)

    def __str__(self):
        parts = [format_terms(self.terms)] if self.terms else []
        for fam, c in self.families:
            parts.append(fam.text() if c == 1 else f"{c} * {fam.text()}")
        return " + ".join(parts) or "0"


@dataclass
class Product:
    value: FormalSum
    exact: bool
    truncated: dict  # evaluation up to E

    @property
    def survivors(self) -> int:
        return len(self.truncated)


def _family_times(fam: Family, b: Vec) -> tuple[list[tuple[int, Vec]], Family | None]:
    """Multiply a family by x^b: returns finitely many surviving (e, vec)
    and, if the kill status eventually stays 'alive', the shifted tail."""
    p = fam.p
    dies_forever = False
    for c, x in zip(fam.coords, b):
        if c.kind == "const" and c.a + x > 0:
            dies_forever = True
        if c.kind == "geom" and x > 0:
            dies_forever = True
    if dies_forever:
        # eventually killed; find the last index that might survive
        last = fam.start
        for c, x in zip(fam.coords, b):
            if c.kind == "geom" and x > 0:
                e, pw = 0, Fraction(1)
                while c.a / pw >= x:
                    pw *= p
                    e += 1
                last = max(last, e)
        out = []
        for e in range(fam.start, last + 1):
            v = tuple(y + x for y, x in zip(fam.at(e), b))
            if not killed(v):
                out.append((e, v))
        return out, None
    # alive from some index on: arith coordinates need a*e + beta >= b
    e0 = fam.start
    for c, x in zip(fam.coords, b):
        if c.kind == "arith":
            need = (x - c.b) / c.a
            e0 = max(e0, -((-need.numerator) // need.denominator))
    head = []
    for e in range(fam.start, e0):
        v = tuple(y + x for y, x in zip(fam.at(e), b))
        if not killed(v):
            head.append((e, v))
    tail = Family(tuple(c.shifted(x) for c, x in zip(fam.coords, b)), p, e0)
    return head, tail


def scalar_multiply(s: FracPoly, f: FormalSum, E: int = 32) -> Product:
    """s * f with the kill rule; exact unless two family tails coexist or
    a tail collides with a finite term."""
    if (s.p, s.n) != (f.p, f.n):
        raise HullError("arity/characteristic mismatch")
    p = f.p
    terms: dict[Vec, int] = {}
    tails: list[tuple[Family, int]] = []
    for b, cb in s.terms.items():
        for a, ca in f.terms.items():
            v = tuple(x + y for x, y in zip(a, b))
            if not killed(v):
                terms[v] = (terms.get(v, 0) + ca * cb) % p
        for fam, cf in f.families:
            head, tail = _family_times(fam, b)
            for _, v in head:
                terms[v] = (terms.get(v, 0) + cf * cb) % p
            if tail is not None:
                tails.append((tail, cf * cb % p))
    terms = {v: c for v, c in terms.items() if c}
    exact = len(tails) <= 1
    for tail, _ in tails:
        if any(tail.index_of(v) is not None for v in terms):
            exact = False
    value = FormalSum(p, f.n, terms, tuple(tails))
    return Product(value, exact, value.evaluate(E))


# ------------------------------------------------------------ pairing


@dataclass
class Pairing:
    monomial: Vec
    constant: int


def socle_pairing(f: FormalSum, E: int = 32) -> Pairing:
    """Pick a minimal support point -a0 and return (x^a0, c_a0); every
    other term of x^a0 * f must die."""
    if f.is_zero():
        raise HullError("support is empty")
    v = dcc_check(f.support())
    if v.verdict != "pass":
        raise IndeterminateDCC(v.reason)
    cands = sorted(f.terms, key=lambda w: sum(w))
    for fam, _ in f.families:
        cands += [w for _, w in fam.points(fam.start + 2)]
    for w in cands:
        a0 = tuple(-x for x in w)
        prod = scalar_multiply(FracPoly.monomial(f.p, a0), f, E)
        zero = (Fraction(0),) * f.n
        val = prod.value
        if prod.exact and not val.families and set(val.terms) == {zero}:
            return Pairing(a0, val.terms[zero])
    raise HullError("no minimal support element isolates a constant")


# ------------------------------------------------------------ witness


@dataclass
class Witness:
    t: int
    E: int
    p: int
    survivor: Vec
    count: int

    def text(self) -> str:
        return format_terms({self.survivor: 1})


def essential_family(p: int) -> FormalSum:
    fam = Family((Coord("geom", 1), Coord("arith", 1, 0)), p)
    return FormalSum(p, 2, {}, ((fam, 1),))


def nonvanishing_witness(t: int, E: int, p: int) -> Witness:
    """x2^t * sum_e x1^(-1/p^e) x2^(-e) keeps the term at e = t."""
    if t < 0:
        raise HullError("t must be nonnegative")
    if E < t:
        raise HullError(f"truncation E={E} is below t={t}")
    f = essential_family(p)
    prod = scalar_multiply(FracPoly.monomial(p, (0, t)), f, E)
    survivors = prod.truncated
    count = len(survivors)
    target = (Fraction(-1, p**t), Fraction(0))
    if survivors.get(target) != 1:
        raise HullError("expected survivor missing")
    if count != E - t + 1:
        raise HullError(f"survivor count {count} != {E - t + 1}")
    return Witness(t, E, p, target, count)


# ------------------------------------------------------------ chains


def chain_violation_search(A: Iterable, B: Iterable, L: int) -> list | None:
    """A weakly descending chain a(k)+b(k) of length L over distinct pairs,
    or None.  Equal sums can be chained freely, so the longest chain is
    a heaviest path through the strict order on the distinct sums."""
    A = [tuple(Fraction(x) for x in a) for a in set(map(tuple, A))]
    B = [tuple(Fraction(x) for x in b) for b in set(map(tuple, B))]
    if L <= 0:
        return []
    groups: dict[Vec, list] = {}
    for a in A:
        for b in B:
            groups.setdefault(tuple(x + y for x, y in zip(a, b)), []).append((a, b))
    sums = sorted(groups, key=lambda v: sum(v))
    best: dict[Vec, tuple[int, Vec | None]] = {}
    for s in sums:  # ascending total degree: anything strictly below is done
        prev = max(((best[t][0], t) for t in best if strictly_below(t, s)),
                   key=lambda x: x[0], default=(0, None))
        best[s] = (prev[0] + len(groups[s]), prev[1])
    if not best:
        return None
    top = max(best, key=lambda s: best[s][0])
    if best[top][0] < L:
        return None
    chain = []
    s = top
    while s is not None:
        chain.extend(groups[s])
        s = best[s][1]
    return chain[:L]


# ------------------------------------------------------------ rounding


@dataclass
class Factorization:
    integer_part: tuple[int, ...]
    remainder: Vec

    @property
    def degree(self) -> int:
        return sum(self.integer_part)


def rounding_factor(a: Sequence, n: int, mu: int, p: int | None = None) -> Factorization:
    """Split x^a = x^[a] * x^r with 0 <= r_i < 1.  If sum(a) >= n + mu - 1
    then the integer part has degree >= n."""
    a = tuple(Fraction(x) for x in a)
    if p is not None:
        check_vector(a, p)
    if any(x < 0 for x in a):
        raise HullError("exponents must be nonnegative")
    c = mu - 1 if mu > 0 else 0
    if sum(a) < n + c:
        raise HullError(f"degree {sum(a)} below n + c = {n + c}")
    ints = tuple(x.numerator // x.denominator for x in a)
    rem = tuple(x - i for x, i in zip(a, ints))
    assert sum(ints) >= n, "rounding lost too much degree"
    assert tuple(i + r for i, r in zip(ints, rem)) == a
    return Factorization(ints, rem)


# ------------------------------------------------------------ text forms


def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_terms(terms: Mapping[Vec, int]) -> str:
    out = []
    for v in sorted(terms, key=lambda w: (sum(w), w)):
        c = terms[v]
        mons = [f"x{i + 1}^({_fmt_frac(x)})" if x.denominator != 1 or x < 0 else
                (f"x{i + 1}" if x == 1 else f"x{i + 1}^{x}")
                for i, x in enumerate(v) if x != 0]
        if not mons:
            out.append(str(c))
        elif c == 1:
            out.append(" * ".join(mons))
        else:
            out.append(f"{c} * " + " * ".join(mons))
    return " + ".join(out)


_NUM = r"-?\d+(?:/\d+(?:\^\d+)?)?"
_FACTOR = re.compile(r"^x(\d+)(?:\^\(?\s*(" + _NUM + r")\s*\)?)?$")


def _num(text: str) -> Fraction:
    text = text.replace(" ", "")
    if "/" not in text:
        return Fraction(int(text))
    top, bot = text.split("/")
    if "^" in bot:
        base, exp = bot.split("^")
        return Fraction(int(top), int(base) ** int(exp))
    return Fraction(int(top), int(bot))


def _split_top(text: str, sep: str = "+") -> list[str]:
    """Split on top-level separators (outside parentheses and braces)."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [x.strip() for x in parts if x.strip()]


def _parse_term(text: str, n: int) -> tuple[Vec, int]:
    coef = 1
    v = [Fraction(0)] * n
    for fac in _split_top(text, "*"):
        if re.fullmatch(r"-?\d+", fac):
            coef *= int(fac)
            continue
        m = _FACTOR.match(fac.replace(" ", ""))
        if not m:
            raise HullError(f"bad factor {fac!r}")
        i = int(m.group(1)) - 1
        if not 0 <= i < n:
            raise HullError(f"variable x{i + 1} out of range for arity {n}")
        v[i] += _num(m.group(2)) if m.group(2) else Fraction(1)
    return tuple(v), coef


_FAMILY = re.compile(r"^(?:(-?\d+)\s*\*\s*)?family\(e(?:\s*>=\s*(\d+))?\)\s*\{(.*)\}$", re.S)
_ARITH = re.compile(r"^-\(?(?:(\d+(?:/\d+)?)\*)?e(?:([+-]\d+(?:/\d+)?))?\)?$")
_GEOM = re.compile(r"^-(\d+(?:/\d+)?)/p\^e$")


def _parse_coord(text: str) -> Coord:
    t = text.replace(" ", "")
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    if m := _GEOM.match(t):
        return Coord("geom", Fraction(m.group(1)))
    if m := _ARITH.match(t):
        return Coord("arith", Fraction(m.group(1) or 1), Fraction(m.group(2) or 0))
    try:
        return Coord("const", _num(t))
    except ValueError:
        raise HullError(f"bad family exponent {text!r}") from None


def _parse_family(m: re.Match, n: int, p: int) -> tuple[Family, int]:
    coef = int(m.group(1) or 1)
    start = int(m.group(2) or 0)
    coords = [Coord("const", 0)] * n
    for fac in _split_top(m.group(3), "*"):
        fm = re.fullmatch(r"x(\d+)\^\((.*)\)", fac.replace(" ", ""))
        if not fm:
            raise HullError(f"bad family factor {fac!r}")
        i = int(fm.group(1)) - 1
        if not 0 <= i < n:
            raise HullError(f"variable x{i + 1} out of range for arity {n}")
        coords[i] = _parse_coord(fm.group(2))
    return Family(tuple(coords), p, start), coef


def _parse_parts(text: str, n: int, p: int):
    terms: dict[Vec, int] = {}
    fams = []
    for chunk in _split_top(text.strip()):
        if m := _FAMILY.match(chunk):
            fams.append(_parse_family(m, n, p))
        elif chunk == "0":
            continue
        else:
            v, c = _parse_term(chunk, n)
            terms[v] = terms.get(v, 0) + c
    return terms, fams


def parse_formal_sum(text: str, n: int, p: int) -> FormalSum:
    """Terms ``c * x1^(-a/p^e) * x2^(-b)``, families
    ``family(e){ x1^(-1/p^e) * x2^(-e) }``, joined by ``+``."""
    terms, fams = _parse_parts(text, n, p)
    return FormalSum(p, n, terms, tuple(fams))


def parse_support(text: str, n: int, p: int) -> SupportDescription:
    """The support of a formal-sum text, without the DCC validation."""
    terms, fams = _parse_parts(text, n, p)
    finite = {check_vector(v, p) for v, c in terms.items() if c % p}
    return SupportDescription(finite, [f for f, c in fams if c % p])


def parse_frac_poly(text: str, n: int, p: int) -> FracPoly:
    terms: dict[Vec, int] = {}
    for chunk in _split_top(text.strip()):
        v, c = _parse_term(chunk, n)
        terms[v] = terms.get(v, 0) + c
    return FracPoly(p, n, terms)
