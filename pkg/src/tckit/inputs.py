"""Block-structured input files.

    ring { p = 2; vars = [x,y,z]; weights = [1,1,1]; quotient = ["x^3+y^3+z^3"]; }
    ideal { gens = ["y","z"]; }
    module { shifts = [0,0]; relations = [["x","y"],["0","x"]]; }   # rows
    submodule { gens = [["y","0"]]; }
    hull { p = 2; n = 2; f = "family(e){ x1^(-1/p^e) * x2^(-e) }"; }

``#`` starts a comment.  Errors carry line and column.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .ffpoly import PolynomialSyntaxError, RingContext, make_context
from .groebner import IdealSpec
from .hull import FormalSum, HullError, parse_formal_sum, parse_support
from .modules import PresentedModule, SubmoduleSpec


class InputError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


@dataclass
class Node:
    value: object
    line: int
    col: int

    def plain(self):
        if isinstance(self.value, list):
            return [x.plain() for x in self.value]
        return self.value


_TOKEN = re.compile(
    r'(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)'
    r'|(?P<string>"(?:[^"\\\n]|\\.)*")|(?P<number>-?\d+)'
    r'|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[{}\[\]=;,])'
)


def tokenize(text: str) -> list[tuple[str, object, int, int]]:
    out, pos, line, start = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - start + 1
        if not m:
            raise InputError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind == "string":
            out.append(("string", re.sub(r"\\(.)", r"\1", tok[1:-1]), line, col))
        elif kind == "number":
            out.append(("number", int(tok), line, col))
        elif kind in ("ident", "punct"):
            out.append((kind, tok, line, col))
        pos = m.end()
    out.append(("eof", None, line, pos - start + 1))
    return out


class _Reader:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value if value is not None else kind
            got = "end of file" if tok[0] == "eof" else repr(tok[1])
            raise InputError(f"expected {want!r}, found {got}", tok[2], tok[3])
        self.i += 1
        return tok

    def value(self) -> Node:
        kind, val, line, col = self.peek()
        if kind in ("string", "number", "ident"):
            self.i += 1
            return Node(val, line, col)
        if (kind, val) == ("punct", "["):
            self.i += 1
            items = []
            if self.peek()[1] != "]":
                items.append(self.value())
                while self.peek()[1] == ",":
                    self.i += 1
                    items.append(self.value())
            self.take("punct", "]")
            return Node(items, line, col)
        raise InputError("expected a value", line, col)


@dataclass
class Block:
    name: str
    line: int
    col: int
    fields: dict[str, Node] = field(default_factory=dict)

    def get(self, key: str, required: bool = False) -> Node | None:
        node = self.fields.get(key)
        if node is None and required:
            raise InputError(f"block '{self.name}' needs '{key}'", self.line, self.col)
        return node


def parse_blocks(text: str) -> list[Block]:
    r = _Reader(tokenize(text))
    blocks = []
    while r.peek()[0] != "eof":
        _, name, line, col = r.take("ident")
        r.take("punct", "{")
        blk = Block(name, line, col)
        while r.peek()[1] != "}":
            _, key, kl, kc = r.take("ident")
            if key in blk.fields:
                raise InputError(f"duplicate key '{key}'", kl, kc)
            r.take("punct", "=")
            blk.fields[key] = r.value()
            r.take("punct", ";")
        r.take("punct", "}")
        blocks.append(blk)
    return blocks


@dataclass
class ParsedInput:
    ctx: RingContext | None = None
    ideal: IdealSpec | None = None
    module: PresentedModule | None = None
    submodule: SubmoduleSpec | None = None
    formal_sum: FormalSum | None = None
    hull_text: tuple[str, int, int] | None = None  # (text, n, p) of the hull block
    blocks: list[Block] = field(default_factory=list)


def _expect(node: Node, typ, what: str):
    if not isinstance(node.value, typ):
        raise InputError(f"{what} has the wrong type", node.line, node.col)
    return node.value


def _poly(ctx: RingContext, node: Node):
    text = _expect(node, str, "polynomial")
    try:
        return ctx.parse(text)
    except PolynomialSyntaxError as exc:
        # +1 for the opening quote
        raise InputError(str(exc).split(" at column")[0], node.line, node.col + 1 + exc.pos) from None
    except ValueError as exc:
        raise InputError(str(exc), node.line, node.col) from None


def _ring(blk: Block) -> RingContext:
    pnode = blk.get("p", True)
    p = _expect(pnode, int, "p")
    vnode = blk.get("vars", True)
    names = [str(x.value) for x in _expect(vnode, list, "vars")]
    wnode = blk.get("weights")
    weights = None
    if wnode is not None:
        weights = [_expect(x, int, "weight") for x in _expect(wnode, list, "weights")]
    try:
        base = make_context(p, names, weights)
    except ValueError as exc:
        node = pnode if "prime" in str(exc) else (wnode or vnode)
        raise InputError(str(exc), node.line, node.col) from None
    qnode = blk.get("quotient")
    if qnode is None:
        return base
    rels = [_poly(base, x) for x in _expect(qnode, list, "quotient")]
    # with explicit weights the relations must be homogeneous
    graded = wnode is not None or all(r.degree_check()[1] for r in rels)
    try:
        return make_context(p, names, weights, rels, graded)
    except ValueError as exc:
        raise InputError(str(exc), qnode.line, qnode.col) from None


def parse_input(text: str) -> ParsedInput:
    out = ParsedInput(blocks=parse_blocks(text))
    byname: dict[str, Block] = {}
    for blk in out.blocks:
        if blk.name in byname:
            raise InputError(f"duplicate block '{blk.name}'", blk.line, blk.col)
        if blk.name not in ("ring", "ideal", "module", "submodule", "hull"):
            raise InputError(f"unknown block '{blk.name}'", blk.line, blk.col)
        byname[blk.name] = blk
    if "ring" in byname:
        out.ctx = _ring(byname["ring"])
    for name in ("ideal", "module", "submodule"):
        if name in byname and out.ctx is None:
            blk = byname[name]
            raise InputError(f"block '{name}' needs a ring block", blk.line, blk.col)
    if "ideal" in byname:
        node = byname["ideal"].get("gens", True)
        gens = [_poly(out.ctx, x) for x in _expect(node, list, "gens")]
        try:
            out.ideal = IdealSpec(tuple(gens), out.ctx)
        except ValueError as exc:
            raise InputError(str(exc), node.line, node.col) from None
    if "module" in byname:
        blk = byname["module"]
        snode = blk.get("shifts", True)
        shifts = [_expect(x, int, "shift") for x in _expect(snode, list, "shifts")]
        rnode = blk.get("relations")
        rows = []
        if rnode is not None:
            for row in _expect(rnode, list, "relations"):
                rows.append([_poly(out.ctx, x) for x in _expect(row, list, "row")])
        try:
            if rows:
                out.module = PresentedModule.from_rows(out.ctx, shifts, rows)
            else:
                out.module = PresentedModule.free(out.ctx, len(shifts), shifts)
        except ValueError as exc:
            node = rnode or snode
            raise InputError(str(exc), node.line, node.col) from None
    if "submodule" in byname:
        blk = byname["submodule"]
        if out.module is None:
            raise InputError("block 'submodule' needs a module block", blk.line, blk.col)
        node = blk.get("gens", True)
        gens = []
        for g in _expect(node, list, "gens"):
            coords = g.value if isinstance(g.value, list) else [g]
            gens.append(tuple(_poly(out.ctx, x) for x in coords))
        try:
            out.submodule = SubmoduleSpec.of(out.module, gens)
        except ValueError as exc:
            raise InputError(str(exc), node.line, node.col) from None
    if "hull" in byname:
        blk = byname["hull"]
        pnode = blk.get("p")
        p = _expect(pnode, int, "p") if pnode else (out.ctx.p if out.ctx else None)
        if p is None:
            raise InputError("block 'hull' needs 'p' (or a ring block)", blk.line, blk.col)
        n = _expect(blk.get("n", True), int, "n")
        fnode = blk.get("f", True)
        text = _expect(fnode, str, "f")
        try:
            make_context(p, ["x"])  # prime check
            parse_support(text, n, p)
        except (HullError, ValueError) as exc:
            node = pnode if pnode is not None and "prime" in str(exc) else fnode
            raise InputError(str(exc), node.line, node.col) from None
        out.hull_text = (text, n, p)
        try:
            out.formal_sum = parse_formal_sum(text, n, p)
        except HullError:
            out.formal_sum = None  # support fails DCC; hull-dcc reports it
    return out


def load_input(path: str | Path) -> ParsedInput:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except UnicodeDecodeError:
        raise InputError(f"{path} is not valid UTF-8") from None
    return parse_input(text)
