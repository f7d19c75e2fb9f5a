"""Recursive-descent parsers for the text formats the command line accepts.

Grammars (ASCII):

    poly / rational expression:
        expr   := term (('+'|'-') term)*
        term   := factor (('*'|'/') factor)*
        factor := '-'* atom ('^' INT)?
        atom   := INT | var | '(' expr ')'
        var    := IDENT ('[' index ']')?
        index  := '0' | d-factor+        (d-factor := dINT ('^' INT)?)

    differential term:
        texpr   := tterm (('+'|'-') tterm)*
        tterm   := tfactor ('*' tfactor)*
        tfactor := '-' tfactor | dINT '(' texpr ')' | IDENT
                 | INT ('/' INT)? | '(' texpr ')'
        atom    := texpr ('='|'!=') texpr

    derivation spec:     eta: t -> 1; d: x -> u, y -> v     (or `eta: none`)

    configuration file:  k = 2
                         P: d1, d2
                         p[d1] = x[d1] - x[0]^2
                         eta: none            (or `eta[d1]: t -> 1, ...`)

Identifiers of the form d<digits> are reserved for derivation symbols and
cannot name variables.  Errors carry 1-based line and column positions.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import JetVar, Poly, RatFun, _to_ratfun
from .axioms import DefinableSetDesc, TriangularSystem
from .config import Configuration
from .derivation import DerSpec
from .errors import ParseError
from .jet import DiffTerm, JetAtom, TAdd, TConst, TDer, TMul, TNeg, TVar
from .monoid import COMMUTATIVE, FREE, MonoidElem

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<int>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>->|!=|[-+*/^()\[\],;:=])"
)

_DNAME_RE = re.compile(r"^d(\d+)$")


@dataclass(frozen=True)
class Token:
    kind: str  # 'int' | 'ident' | 'op' | 'eof'
    text: str
    line: int
    column: int


def tokenize(text: str, first_line: int = 1) -> list[Token]:
    tokens = []
    line = first_line
    col = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


def _shown(tok: "Token") -> str:
    return repr(tok.text) if tok.text else "end of input"


class _Cursor:
    def __init__(self, tokens: Sequence[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text in ops

    def expect_op(self, op: str) -> Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            raise ParseError(f"expected {op!r}, found {_shown(tok)}", tok.line, tok.column)
        return self.advance()

    def expect_int(self) -> int:
        tok = self.peek()
        if tok.kind != "int":
            raise ParseError(f"expected a number, found {_shown(tok)}", tok.line, tok.column)
        self.advance()
        return int(tok.text)

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(f"expected a name, found {_shown(tok)}", tok.line, tok.column)
        return self.advance()

    def expect_eof(self):
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.column)


def _scan_k(tokens: Sequence[Token]) -> int:
    best = 1
    for tok in tokens:
        if tok.kind == "ident":
            m = _DNAME_RE.match(tok.text)
            if m:
                best = max(best, int(m.group(1)))
    return best


# ----------------------------------------------------------------------
# monoid indices


def _parse_index(cur: _Cursor, mode: str, k: int) -> MonoidElem:
    tok = cur.peek()
    if tok.kind == "int":
        if tok.text != "0":
            raise ParseError("an index is 0 or a product of d1, d2, ...", tok.line, tok.column)
        cur.advance()
        return MonoidElem.identity(mode, k)
    if mode == FREE:
        letters = []
        while cur.peek().kind == "ident" and _DNAME_RE.match(cur.peek().text):
            letters.append(int(_DNAME_RE.match(cur.advance().text).group(1)))
        if not letters:
            raise ParseError("expected a derivation word", tok.line, tok.column)
        return MonoidElem.word(k, letters)
    exps = [0] * k
    seen = False
    while cur.peek().kind == "ident" and _DNAME_RE.match(cur.peek().text):
        gen_tok = cur.advance()
        i = int(_DNAME_RE.match(gen_tok.text).group(1))
        if not 1 <= i <= k:
            raise ParseError(f"generator d{i} exceeds k={k}", gen_tok.line, gen_tok.column)
        e = 1
        if cur.at_op("^"):
            cur.advance()
            e = cur.expect_int()
        exps[i - 1] += e
        seen = True
    if not seen:
        raise ParseError("expected a monomial in d1, d2, ...", tok.line, tok.column)
    return MonoidElem.exponents(exps)


def parse_index_text(text: str, mode: str = COMMUTATIVE, k: Optional[int] = None) -> MonoidElem:
    tokens = tokenize(text)
    if k is None:
        k = _scan_k(tokens)
    cur = _Cursor(tokens)
    out = _parse_index(cur, mode, k)
    cur.expect_eof()
    return out


# ----------------------------------------------------------------------
# polynomial / rational expressions


class _ExprParser:
    def __init__(self, cur: _Cursor, mode: str, k: int):
        self.cur = cur
        self.mode = mode
        self.k = k

    def expr(self):
        value = self.term()
        while self.cur.at_op("+", "-"):
            op = self.cur.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.cur.at_op("*", "/"):
            op = self.cur.advance().text
            rhs = self.factor()
            if op == "*":
                value = value * rhs
            else:
                value = _to_ratfun(value) / _to_ratfun(rhs)
        return value

    def factor(self):
        negate = False
        while self.cur.at_op("-"):
            self.cur.advance()
            negate = not negate
        value = self.atom()
        if self.cur.at_op("^"):
            self.cur.advance()
            value = value ** self.cur.expect_int()
        return -value if negate else value

    def atom(self):
        tok = self.cur.peek()
        if tok.kind == "int":
            self.cur.advance()
            return Poly.const(int(tok.text))
        if tok.kind == "ident":
            return self.variable()
        if self.cur.at_op("("):
            self.cur.advance()
            value = self.expr()
            self.cur.expect_op(")")
            return value
        raise ParseError(f"expected a value, found {_shown(tok)}", tok.line, tok.column)

    def variable(self):
        tok = self.cur.expect_ident()
        if _DNAME_RE.match(tok.text):
            raise ParseError(f"{tok.text} is reserved for derivation symbols", tok.line, tok.column)
        if self.cur.at_op("["):
            bracket = self.cur.advance()
            if self.cur.peek().kind == "eof":
                raise ParseError("unterminated index", bracket.line, bracket.column)
            index = _parse_index(self.cur, self.mode, self.k)
            self.cur.expect_op("]")
            return Poly.variable(JetVar(tok.text, index))
        return Poly.variable(JetVar(tok.text))


def parse_expression(text: str, mode: str = COMMUTATIVE, k: Optional[int] = None):
    """A Poly or RatFun, depending on whether division shows up."""
    tokens = tokenize(text)
    if k is None:
        k = _scan_k(tokens)
    cur = _Cursor(tokens)
    value = _ExprParser(cur, mode, k).expr()
    cur.expect_eof()
    return value


def parse_poly(text: str, mode: str = COMMUTATIVE, k: Optional[int] = None) -> Poly:
    value = _to_ratfun(parse_expression(text, mode, k))
    if not value.is_polynomial:
        tok = tokenize(text)[0]
        raise ParseError("expected a polynomial, found a proper fraction", tok.line, tok.column)
    return value.to_poly()


def parse_ratfun(text: str, mode: str = COMMUTATIVE, k: Optional[int] = None) -> RatFun:
    return _to_ratfun(parse_expression(text, mode, k))


# ----------------------------------------------------------------------
# differential terms


class _TermParser:
    def __init__(self, cur: _Cursor):
        self.cur = cur

    def expr(self) -> DiffTerm:
        value = self.term()
        while self.cur.at_op("+", "-"):
            op = self.cur.advance().text
            rhs = self.term()
            value = TAdd(value, rhs if op == "+" else TNeg(rhs))
        return value

    def term(self) -> DiffTerm:
        value = self.factor()
        while self.cur.at_op("*"):
            self.cur.advance()
            value = TMul(value, self.factor())
        return value

    def factor(self) -> DiffTerm:
        tok = self.cur.peek()
        if self.cur.at_op("-"):
            self.cur.advance()
            return TNeg(self.factor())
        if tok.kind == "int":
            self.cur.advance()
            num = int(tok.text)
            if self.cur.at_op("/"):
                self.cur.advance()
                den = self.cur.expect_int()
                if den == 0:
                    raise ParseError("zero denominator", tok.line, tok.column)
                return TConst(Fraction(num, den))
            return TConst(Fraction(num))
        if tok.kind == "ident":
            self.cur.advance()
            m = _DNAME_RE.match(tok.text)
            if m:
                self.cur.expect_op("(")
                inner = self.expr()
                self.cur.expect_op(")")
                return TDer(int(m.group(1)), inner)
            return TVar(tok.text)
        if self.cur.at_op("("):
            self.cur.advance()
            value = self.expr()
            self.cur.expect_op(")")
            return value
        raise ParseError(f"expected a term, found {_shown(tok)}", tok.line, tok.column)


def parse_term(text: str) -> DiffTerm:
    cur = _Cursor(tokenize(text))
    value = _TermParser(cur).expr()
    cur.expect_eof()
    return value


def parse_term_atom(text: str) -> tuple[DiffTerm, str, DiffTerm]:
    """`lhs = rhs` or `lhs != rhs` as differential terms."""
    cur = _Cursor(tokenize(text))
    parser = _TermParser(cur)
    lhs = parser.expr()
    tok = cur.peek()
    if not cur.at_op("=", "!="):
        raise ParseError("expected '=' or '!='", tok.line, tok.column)
    rel = cur.advance().text
    rhs = parser.expr()
    cur.expect_eof()
    return lhs, rel, rhs


# ----------------------------------------------------------------------
# derivation specs


def parse_derspec(text: str, mode: str = COMMUTATIVE, k: Optional[int] = None, name: str = "d") -> DerSpec:
    """`eta: t -> 1; d: x -> u, y -> v`; either section may be `none`."""
    tokens = tokenize(text)
    if k is None:
        k = _scan_k(tokens)
    cur = _Cursor(tokens)
    eta: dict[JetVar, RatFun] = {}
    images: dict[JetVar, RatFun] = {}
    while cur.peek().kind != "eof":
        section = cur.expect_ident()
        cur.expect_op(":")
        if cur.peek().kind == "ident" and cur.peek().text == "none":
            cur.advance()
        else:
            while True:
                target_tok = cur.peek()
                target = _ExprParser(cur, mode, k).variable()
                (target_var,) = target.variables()
                cur.expect_op("->")
                value = _ExprParser(cur, mode, k).expr()
                table = eta if section.text == "eta" else images
                if target_var in table:
                    raise ParseError(f"duplicate entry for {target_var}", target_tok.line, target_tok.column)
                table[target_var] = _to_ratfun(value)
                if cur.at_op(","):
                    cur.advance()
                    continue
                break
        if cur.at_op(";"):
            cur.advance()
            continue
        break
    cur.expect_eof()
    return DerSpec(name, eta, images)


# ----------------------------------------------------------------------
# configuration files


def parse_config(text: str) -> Configuration:
    lines = text.split("\n")
    k: Optional[int] = None
    base = "x"
    leaders: list[MonoidElem] = []
    relation_lines: list[tuple[int, str, str]] = []  # (line number, index text, poly text)
    eta_lines: list[tuple[int, Optional[str], str]] = []  # (line number, index text or None, body)

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if re.match(r"^k\s*=", line):
            k = int(line.split("=", 1)[1].strip())
            continue
        if line.startswith("base"):
            base = line.split("=", 1)[1].strip()
            continue
        if line.startswith("P:") or line.startswith("P :"):
            body = line.split(":", 1)[1]
            if k is None:
                raise ParseError("k must be declared before P", lineno, 1)
            for part in body.split(","):
                part = part.strip()
                if part:
                    leaders.append(parse_index_text(part, COMMUTATIVE, k))
            continue
        m = re.match(r"^p\s*\[([^\]]*)\]\s*=\s*(.*)$", line)
        if m:
            relation_lines.append((lineno, m.group(1), m.group(2)))
            continue
        m = re.match(r"^eta\s*(?:\[([^\]]*)\])?\s*:\s*(.*)$", line)
        if m:
            eta_lines.append((lineno, m.group(1), m.group(2)))
            continue
        raise ParseError(f"unrecognized configuration line: {line!r}", lineno, 1)

    if k is None:
        raise ParseError("missing `k = ...` header", 1, 1)
    if not leaders:
        raise ParseError("missing `P: ...` line", 1, 1)

    relations = {}
    for lineno, index_text, poly_text in relation_lines:
        pi = parse_index_text(index_text, COMMUTATIVE, k)
        try:
            relations[pi] = parse_poly(poly_text, COMMUTATIVE, k)
        except ParseError as err:
            raise ParseError(err.message, lineno, err.column) from None

    etas: list[dict[JetVar, RatFun]] = [{} for _ in range(k)]
    for lineno, index_text, body in eta_lines:
        body = body.strip()
        if body == "none":
            continue
        targets = range(k) if index_text is None else [_eta_slot(index_text, k, lineno)]
        try:
            spec = parse_derspec("eta: " + body, COMMUTATIVE, k)
        except ParseError as err:
            raise ParseError(err.message, lineno, err.column) from None
        for slot in targets:
            etas[slot] = dict(spec.eta)

    return Configuration(k, leaders, relations, etas, base=base)


def _eta_slot(index_text: str, k: int, lineno: int) -> int:
    m = _DNAME_RE.match(index_text.strip())
    if not m or not 1 <= int(m.group(1)) <= k:
        raise ParseError(f"eta index must be one of d1..d{k}", lineno, 1)
    return int(m.group(1)) - 1


# ----------------------------------------------------------------------
# variety files: polynomials, optional derivation and point lines


@dataclass
class VarietyInput:
    variables: tuple[JetVar, ...]
    gens: tuple[Poly, ...]
    spec: DerSpec
    point: Optional[tuple[RatFun, ...]]


def parse_variety(text: str) -> VarietyInput:
    gens: list[Poly] = []
    spec = DerSpec()
    point_text: Optional[str] = None
    declared_vars: Optional[list[str]] = None

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vars:"):
            declared_vars = [part.strip() for part in line.split(":", 1)[1].split(",") if part.strip()]
            continue
        if line.startswith("derivation:"):
            try:
                spec = parse_derspec(line.split(":", 1)[1])
            except ParseError as err:
                raise ParseError(err.message, lineno, err.column) from None
            continue
        if line.startswith("point:"):
            point_text = line.split(":", 1)[1]
            continue
        try:
            gens.append(parse_poly(line))
        except ParseError as err:
            raise ParseError(err.message, lineno, err.column) from None

    if declared_vars is not None:
        variables = tuple(JetVar(name) for name in declared_vars)
    else:
        seen: set[JetVar] = set()
        for p in gens:
            seen |= {v for v in p.variables() if v.index is None}
        seen -= set(spec.eta)
        variables = tuple(sorted(seen, key=lambda v: v.sort_key))

    point = None
    if point_text is not None:
        parts = [part.strip() for part in point_text.split(",")]
        point = tuple(parse_ratfun(part) for part in parts if part)
    return VarietyInput(variables, tuple(gens), spec, point)


# ----------------------------------------------------------------------
# triangular systems: `ambient: ...` then `main : poly` lines


def parse_triangular(text: str) -> TriangularSystem:
    ambient: Optional[tuple[JetVar, ...]] = None
    equations: list[tuple[JetVar, Poly]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("ambient:"):
            names = [part.strip() for part in line.split(":", 1)[1].split(",") if part.strip()]
            ambient = tuple(_parse_var_text(name, lineno) for name in names)
            continue
        if ":" not in line:
            raise ParseError("expected `main : polynomial`", lineno, 1)
        main_text, poly_text = line.split(":", 1)
        try:
            main = _parse_var_text(main_text.strip(), lineno)
            poly = parse_poly(poly_text)
        except ParseError as err:
            raise ParseError(err.message, lineno, err.column) from None
        equations.append((main, poly))

    if ambient is None:
        seen: set[JetVar] = set()
        for _, p in equations:
            seen |= p.variables()
        ambient = tuple(sorted(seen, key=lambda v: v.sort_key))
    return TriangularSystem(ambient, tuple(equations))


def _parse_var_text(text: str, lineno: int, mode: str = COMMUTATIVE, k: Optional[int] = None) -> JetVar:
    try:
        value = parse_expression(text, mode, k)
    except ParseError as err:
        raise ParseError(err.message, lineno, err.column) from None
    variables = _to_ratfun(value).variables()
    if len(variables) != 1:
        raise ParseError(f"expected a single variable, got {text!r}", lineno, 1)
    (v,) = variables
    return v


# ----------------------------------------------------------------------
# definable-set descriptions as JSON


def parse_definable_json(text: str, mode: str = COMMUTATIVE, k: Optional[int] = None) -> DefinableSetDesc:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON: {err.msg}", err.lineno, err.colno) from None
    for key in ("indices", "atoms", "projection"):
        if key not in data:
            raise ParseError(f"missing field {key!r}", 1, 1)
    indices = tuple(_parse_var_text(name, 1, mode, k) for name in data["indices"])
    atoms = []
    for entry in data["atoms"]:
        rel = entry.get("rel", "=")
        if rel not in ("=", "!="):
            raise ParseError(f"unknown relation {rel!r}", 1, 1)
        atoms.append(JetAtom(parse_poly(entry["poly"], mode, k), rel))
    projection = tuple(_parse_var_text(name, 1, mode, k) for name in data["projection"])
    return DefinableSetDesc(indices, tuple(atoms), projection)
