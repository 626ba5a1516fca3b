"""Sparse multivariate polynomials over a prime field F_p.

Monomials are plain tuples of exponents.  A :class:`Polynomial` is an
immutable mapping ``monomial -> residue`` tied to the ambient polynomial
ring of a :class:`RingContext`; the quotient relations of the context are
carried alongside but never applied by the arithmetic here (the Groebner
layer adjoins them when deciding membership).
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from sympy import isprime

# Exponents are bounded so that Frobenius powers fail loudly instead of
# silently producing absurd objects.
MAX_EXPONENT = 2**31 - 1

NEG_INF = -math.inf


class ContextMismatch(ValueError):
    """Raised when polynomials from different rings are combined."""


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at column {pos + 1}" if text else message)


def check_exponent(a: int) -> int:
    if a > MAX_EXPONENT:
        raise OverflowError(f"exponent {a} exceeds {MAX_EXPONENT}")
    return a


@dataclass(frozen=True)
class RingContext:
    """F_p[names] / (relations), graded by positive integer weights."""

    p: int
    names: tuple[str, ...]
    weights: tuple[int, ...] = ()
    relations: tuple["Polynomial", ...] = ()
    graded: bool = True

    def __post_init__(self):
        if not isinstance(self.p, int) or not isprime(self.p):
            raise ValueError(f"p must be prime, got {self.p!r}")
        names = tuple(self.names)
        if not names:
            raise ValueError("a ring needs at least one variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for nm in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", nm):
                raise ValueError(f"bad variable name {nm!r}")
        object.__setattr__(self, "names", names)
        weights = tuple(self.weights) or (1,) * len(names)
        if len(weights) != len(names) or any(w < 1 for w in weights):
            raise ValueError("weights must be positive integers, one per variable")
        object.__setattr__(self, "weights", weights)
        rels = tuple(self.relations)
        amb = self.ambient
        for r in rels:
            if r.ctx != amb:
                raise ContextMismatch("relation lives in a different ring")
            if r.is_zero():
                raise ValueError("zero relation")
            if self.graded and not r.degree_check()[1]:
                raise ValueError(f"relation {r} is not homogeneous under weights {weights}")
        object.__setattr__(self, "relations", rels)

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def ambient(self) -> "RingContext":
        """The polynomial ring P with the relations dropped (always graded)."""
        if not self.relations and self.graded:
            return self
        return RingContext(self.p, self.names, self.weights, (), True)

    def with_relations(self, relations: Iterable["Polynomial | str"]) -> "RingContext":
        rels = tuple(self.ambient.coerce(r) for r in relations)
        return RingContext(self.p, self.names, self.weights, rels, self.graded)

    @property
    def is_standard_graded(self) -> bool:
        return all(w == 1 for w in self.weights)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"p={self.p};vars={','.join(self.names)};w={self.weights}".encode())
        for r in self.relations:
            h.update(b";rel=" + str(r).encode())
        return h.hexdigest()

    # construction helpers

    def zero(self) -> "Polynomial":
        return Polynomial(self.ambient, {})

    def one(self) -> "Polynomial":
        return self.constant(1)

    def constant(self, c: int) -> "Polynomial":
        return Polynomial(self.ambient, {(0,) * self.n: c})

    def var(self, name_or_index) -> "Polynomial":
        i = self.names.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        e = [0] * self.n
        e[i] = 1
        return Polynomial(self.ambient, {tuple(e): 1})

    def gens(self) -> list["Polynomial"]:
        return [self.var(i) for i in range(self.n)]

    def monomial(self, exps: Iterable[int], coeff: int = 1) -> "Polynomial":
        return Polynomial(self.ambient, {tuple(exps): coeff})

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)

    def coerce(self, obj) -> "Polynomial":
        if isinstance(obj, Polynomial):
            if obj.ctx != self.ambient:
                raise ContextMismatch(f"{obj} is not in {self.ambient}")
            return obj
        if isinstance(obj, str):
            return self.parse(obj)
        if isinstance(obj, int):
            return self.constant(obj)
        raise TypeError(f"cannot coerce {obj!r} to a polynomial")

    def __str__(self):
        s = f"F_{self.p}[{','.join(self.names)}]"
        if self.relations:
            s += "/(" + ", ".join(map(str, self.relations)) + ")"
        return s


def grevlex_key(m: tuple[int, ...]) -> tuple[int, ...]:
    """Sort key putting larger monomials (graded reverse lex) first."""
    return (-sum(m),) + m[::-1]


class Polynomial:
    """Immutable sparse polynomial; terms have nonzero residues mod p."""

    __slots__ = ("ctx", "_terms", "_hash")

    def __init__(self, ctx: RingContext, terms: Mapping[tuple[int, ...], int], _trusted: bool = False):
        # polynomials always live in the ambient ring; relations act on ideals
        self.ctx = ctx.ambient
        if _trusted:
            self._terms = dict(terms)
        else:
            p, n = ctx.p, ctx.n
            clean: dict[tuple[int, ...], int] = {}
            for m, c in terms.items():
                m = tuple(int(a) for a in m)
                if len(m) != n or any(a < 0 for a in m):
                    raise ValueError(f"bad exponent vector {m} for {n} variables")
                for a in m:
                    check_exponent(a)
                c = (clean.get(m, 0) + c) % p
                if c:
                    clean[m] = c
                else:
                    clean.pop(m, None)
            self._terms = clean
        self._hash = None

    # basic accessors

    @property
    def terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms in canonical (grevlex, descending) order."""
        return sorted(self._terms.items(), key=lambda t: grevlex_key(t[0]))

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def coefficient(self, m: tuple[int, ...]) -> int:
        return self._terms.get(tuple(m), 0)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ctx.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ctx == other.ctx and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.p, self.ctx.names, frozenset(self._terms.items())))
        return self._hash

    # arithmetic

    def _check(self, other) -> "Polynomial":
        if isinstance(other, int):
            return self.ctx.constant(other)
        if not isinstance(other, Polynomial):
            raise TypeError(f"unsupported operand {other!r}")
        if other.ctx != self.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
        return other

    def __add__(self, other):
        other = self._check(other)
        p = self.ctx.p
        out = dict(self._terms)
        for m, c in other._terms.items():
            c = (out.get(m, 0) + c) % p
            if c:
                out[m] = c
            else:
                out.pop(m, None)
        return Polynomial(self.ctx, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        p = self.ctx.p
        return Polynomial(self.ctx, {m: (-c) % p for m, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        return multiply(self, self._check(other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c: int) -> "Polynomial":
        p = self.ctx.p
        c %= p
        if not c:
            return self.ctx.zero()
        return Polynomial(self.ctx, {m: (a * c) % p for m, a in self._terms.items()}, _trusted=True)

    def mul_monomial(self, m: tuple[int, ...], c: int = 1) -> "Polynomial":
        p = self.ctx.p
        c %= p
        if not c:
            return self.ctx.zero()
        out = {}
        for t, a in self._terms.items():
            out[tuple(check_exponent(x + y) for x, y in zip(t, m))] = (a * c) % p
        return Polynomial(self.ctx, out, _trusted=True)

    def frobenius(self, e: int) -> "Polynomial":
        return frobenius_power_poly(self, e)

    def degree_check(self):
        return degree_check(self)

    def degree(self):
        return degree_check(self)[0]

    def homogeneous_components(self) -> dict[int, "Polynomial"]:
        w = self.ctx.weights
        parts: dict[int, dict] = {}
        for m, c in self._terms.items():
            d = sum(a * b for a, b in zip(m, w))
            parts.setdefault(d, {})[m] = c
        return {d: Polynomial(self.ctx, t, _trusted=True) for d, t in parts.items()}

    def substitute_monomials(self, fn) -> "Polynomial":
        """Apply ``fn`` to every exponent vector (coefficients unchanged)."""
        out: dict = {}
        p = self.ctx.p
        for m, c in self._terms.items():
            nm = fn(m)
            out[nm] = (out.get(nm, 0) + c) % p
        return Polynomial(self.ctx, {m: c for m, c in out.items() if c}, _trusted=True)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({str(self)!r}, p={self.ctx.p})"


def multiply(f: Polynomial, g: Polynomial) -> Polynomial:
    """Product of two polynomials over the same ring, reduced mod p."""
    if f.ctx != g.ctx:
        raise ContextMismatch(f"{f.ctx} vs {g.ctx}")
    p = f.ctx.p
    out: dict[tuple[int, ...], int] = {}
    for m1, c1 in f._terms.items():
        for m2, c2 in g._terms.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            out[m] = (out.get(m, 0) + c1 * c2) % p
    for m in out:
        for a in m:
            check_exponent(a)
    return Polynomial(f.ctx, {m: c for m, c in out.items() if c}, _trusted=True)


def frobenius_power_poly(f: Polynomial, e: int) -> Polynomial:
    """Return f^(p^e), computed termwise since c^(p^e) = c in F_p."""
    if e < 0:
        raise ValueError("e must be nonnegative")
    q = f.ctx.p**e
    out = {}
    for m, c in f._terms.items():
        out[tuple(check_exponent(q * a) for a in m)] = c
    return Polynomial(f.ctx, out, _trusted=True)


def degree_check(f: Polynomial) -> tuple[float | int, bool]:
    """(weighted degree of the highest term, homogeneous flag); 0 has degree -inf."""
    if f.is_zero():
        return NEG_INF, True
    w = f.ctx.weights
    degs = {sum(a * b for a, b in zip(m, w)) for m in f._terms}
    return max(degs), len(degs) == 1


# text syntax


def format_polynomial(f: Polynomial) -> str:
    if f.is_zero():
        return "0"
    names = f.ctx.names
    parts = []
    for m, c in f.terms:
        factors = []
        for nm, a in zip(names, m):
            if a == 1:
                factors.append(nm)
            elif a > 1:
                factors.append(f"{nm}^{a}")
        if not factors:
            parts.append(str(c))
        elif c == 1:
            parts.append("*".join(factors))
        else:
            parts.append(f"{c}*" + "*".join(factors))
    return " + ".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if not mt:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolynomialSyntaxError(f"unexpected character {text[start]!r}", text, start)
        start = mt.start(mt.lastindex)
        if mt.group(1) is not None:
            toks.append(("num", int(mt.group(1)), start))
        elif mt.group(2) is not None:
            toks.append(("name", mt.group(2), start))
        else:
            op = mt.group(3)
            toks.append(("op", "^" if op == "**" else op, start))
        pos = mt.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ctx: RingContext):
        self.text = text
        self.ctx = ctx.ambient
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg):
        raise PolynomialSyntaxError(msg, self.text, self.peek()[2])

    def parse(self) -> Polynomial:
        f = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek()[:2] == ("op", "+"):
            self.take()
        f = self.term().scale(sign)
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            f = f + t if op == "+" else f - t
        return f

    def term(self) -> Polynomial:
        f = self.power()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                f = f * self.power()
            elif kind in ("num", "name") or (kind == "op" and val == "("):
                f = f * self.power()
            else:
                return f

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, _ = self.take()
            if kind != "num":
                self.i -= 1
                self.error("exponent must be a nonnegative integer")
            if base.is_zero() and val == 0:
                return self.ctx.one()
            if len(base) == 1:
                (m, c), = base.terms
                return Polynomial(self.ctx, {tuple(check_exponent(a * val) for a in m): pow(c, val, self.ctx.p)})
            return base**val
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "num":
            return self.ctx.constant(val)
        if kind == "name":
            if val not in self.ctx.names:
                self.i -= 1
                self.error(f"unknown variable {val!r}")
            return self.ctx.var(val)
        if kind == "op" and val == "(":
            f = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.error("expected ')'")
            self.take()
            return f
        self.i -= 1
        self.error("expected a number, variable or '('")


def parse_polynomial(text: str, ctx: RingContext) -> Polynomial:
    """Parse e.g. ``2*x*y - z^2`` into a polynomial of ``ctx``'s ambient ring."""
    if not text.strip():
        raise PolynomialSyntaxError("empty polynomial")
    return _Parser(text, ctx).parse()


def make_context(p: int, names, weights=None, relations=(), graded: bool = True) -> RingContext:
    """Build a context, parsing relation strings against the variable list."""
    if isinstance(names, str):
        names = [s.strip() for s in names.split(",") if s.strip()]
    base = RingContext(p, tuple(names), tuple(weights or ()), (), graded)
    return base.with_relations(relations) if relations else base
