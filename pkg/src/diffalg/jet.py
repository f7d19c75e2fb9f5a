"""Jet rewriting of differential terms, and a concrete model to check it.

A differential term is a tree over rational constants, named variables,
+, *, unary minus, and derivation symbols d1..dk.  `rewrite_term` removes
every derivation symbol: each variable x not declared as a parameter turns
into a family of jet variables x[w] indexed by monoid elements, and di
applied to a subterm expands by additivity and the product rule, bumping
jet indices and consulting the parameter table.  In commutative mode the
indices live in the exponent-tuple monoid, so d1 d2 x and d2 d1 x become
the same variable; in free mode they stay distinct words.

`DiffModel` is the reference semantics: an honest differential field
(a transcendental base, optionally an algebraic tower) with one concrete
derivation per symbol.  `oracle_eval` interprets a term there literally,
which is what the rewriting is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .algebra import JetVar, Poly, RatFun, _to_ratfun
from .derivation import DerSpec, Tower, apply_derivation, coeff_derivative
from .errors import EngineError, KindMismatchError, UncoveredVariableError
from .monoid import COMMUTATIVE, FREE, MonoidElem


class DiffTerm:
    """Base class of term nodes."""

    __slots__ = ()

    def __add__(self, other):
        return TAdd(self, _as_term(other))

    def __mul__(self, other):
        return TMul(self, _as_term(other))

    def __neg__(self):
        return TNeg(self)


@dataclass(frozen=True)
class TConst(DiffTerm):
    value: Fraction

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class TVar(DiffTerm):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TAdd(DiffTerm):
    left: DiffTerm
    right: DiffTerm

    def __str__(self):
        return f"{self.left} + {self.right}"


@dataclass(frozen=True)
class TMul(DiffTerm):
    left: DiffTerm
    right: DiffTerm

    def __str__(self):
        return f"{_factor_str(self.left)} * {_factor_str(self.right)}"


@dataclass(frozen=True)
class TNeg(DiffTerm):
    arg: DiffTerm

    def __str__(self):
        return f"-{_factor_str(self.arg)}"


@dataclass(frozen=True)
class TDer(DiffTerm):
    index: int
    arg: DiffTerm

    def __str__(self):
        return f"d{self.index}({self.arg})"


def _factor_str(t: DiffTerm) -> str:
    if isinstance(t, (TAdd, TNeg)):
        return f"({t})"
    return str(t)


def _as_term(x) -> DiffTerm:
    if isinstance(x, DiffTerm):
        return x
    if isinstance(x, (int, Fraction)):
        return TConst(Fraction(x))
    raise TypeError(f"not a term: {x!r}")


def term_str(t: DiffTerm) -> str:
    return str(t)


def max_der_index(t: DiffTerm) -> int:
    if isinstance(t, TDer):
        return max(t.index, max_der_index(t.arg))
    if isinstance(t, (TAdd, TMul)):
        return max(max_der_index(t.left), max_der_index(t.right))
    if isinstance(t, TNeg):
        return max_der_index(t.arg)
    return 0


def term_variables(t: DiffTerm) -> set[str]:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, (TAdd, TMul)):
        return term_variables(t.left) | term_variables(t.right)
    if isinstance(t, (TNeg, TDer)):
        return term_variables(t.arg)
    return set()


@dataclass(frozen=True)
class JetAtom:
    """A rewritten polynomial (in)equation: `poly rel 0` with rel in {=, !=}."""

    poly: Poly
    rel: str

    def __str__(self):
        return f"{self.poly} {self.rel} 0"


def _eta_tables(eta, k: int) -> list[dict[JetVar, object]]:
    """Normalize the parameter-table argument to one table per derivation symbol."""
    if eta is None:
        return [{} for _ in range(k)]
    if isinstance(eta, DerSpec):
        return [dict(eta.eta) for _ in range(k)]
    if isinstance(eta, Mapping):
        return [dict(eta) for _ in range(k)]
    tables = [dict(table.eta) if isinstance(table, DerSpec) else dict(table) for table in eta]
    if len(tables) != k:
        raise EngineError(f"expected {k} parameter tables, got {len(tables)}")
    return tables


def _jet_shift(value, i: int, mode: str, k: int, eta: Mapping[JetVar, object], params: set[JetVar]):
    """Apply the i-th derivation symbol formally: bump jet indices, derive parameters."""
    gen = MonoidElem.generator(mode, k, i)
    out = coeff_derivative(value, eta)
    for v in sorted(value.variables() - params, key=lambda v: v.sort_key):
        if v.index is None:
            raise UncoveredVariableError(
                f"variable {v} is neither a declared parameter nor a jet variable"
            )
        bumped = JetVar(v.base, gen.compose(v.index))
        out = out + value.partial(v) * Poly.variable(bumped)
    return out


def rewrite_term(
    t: DiffTerm,
    mode: str = COMMUTATIVE,
    eta: Optional[Union[DerSpec, Mapping[JetVar, object]]] = None,
    k: Optional[int] = None,
):
    """Eliminate derivation symbols, returning a polynomial in jet variables.

    `eta` declares the parameters: a single table shared by all symbols, or
    one table per symbol.  The result is a Poly whenever the tables are
    polynomial, and a RatFun otherwise.  Substituting the actual iterated
    derivatives of any differential ring for the jet variables recovers the
    value of the term.
    """
    if mode not in (FREE, COMMUTATIVE):
        raise KindMismatchError(f"unknown mode {mode!r}")
    if k is None:
        k = max(max_der_index(t), 1)
    tables = _eta_tables(eta, k)
    params = set().union(*tables) if tables else set()

    identity = MonoidElem.identity(mode, k)

    def rec(node: DiffTerm):
        if isinstance(node, TConst):
            return Poly.const(node.value)
        if isinstance(node, TVar):
            plain = JetVar(node.name)
            if plain in params:
                return Poly.variable(plain)
            return Poly.variable(JetVar(node.name, identity))
        if isinstance(node, TAdd):
            return rec(node.left) + rec(node.right)
        if isinstance(node, TMul):
            return rec(node.left) * rec(node.right)
        if isinstance(node, TNeg):
            return -rec(node.arg)
        if isinstance(node, TDer):
            if not 1 <= node.index <= k:
                raise EngineError(f"derivation index d{node.index} exceeds k={k}")
            return _jet_shift(rec(node.arg), node.index, mode, k, tables[node.index - 1], params)
        raise TypeError(f"unknown term node: {node!r}")

    value = rec(t)
    rf = _to_ratfun(value)
    return rf.to_poly() if rf.is_polynomial else rf


def rewrite_atom(
    lhs: DiffTerm,
    rel: str,
    rhs: DiffTerm,
    mode: str = COMMUTATIVE,
    eta=None,
    k: Optional[int] = None,
) -> JetAtom:
    """Rewrite `lhs rel rhs` to a polynomial atom `p rel 0`.

    When a fractional parameter table makes the difference a genuine
    fraction, the atom is taken on its numerator (the denominator is a
    nonzero product of parameter expressions).
    """
    if rel not in ("=", "!="):
        raise EngineError(f"unknown relation {rel!r}")
    if k is None:
        k = max(max_der_index(lhs), max_der_index(rhs), 1)
    left = rewrite_term(lhs, mode, eta, k)
    right = rewrite_term(rhs, mode, eta, k)
    diff = _to_ratfun(left - right)
    return JetAtom(diff.num, rel)


# ----------------------------------------------------------------------
# the concrete differential-field oracle


class DiffModel:
    """A differential field with one concrete derivation per symbol.

    Carries k towers sharing the same base parameters and stage structure,
    one per derivation; for a purely transcendental model, build it from
    plain derivation tables via `DiffModel.on_parameters`.
    """

    def __init__(self, towers: Sequence[Tower]):
        if not towers:
            raise EngineError("a model needs at least one derivation")
        first = towers[0]
        for tw in towers[1:]:
            if tw.params != first.params or [s.minpoly for s in tw.stages] != [
                s.minpoly for s in first.stages
            ]:
                raise KindMismatchError("model derivations must live on the same field")
        self.towers = tuple(towers)

    @staticmethod
    def on_parameters(params: Sequence[JetVar], tables: Sequence[Mapping[JetVar, object]]) -> "DiffModel":
        return DiffModel([Tower(params, table) for table in tables])

    @property
    def k(self) -> int:
        return len(self.towers)

    def variables(self):
        return self.towers[0].variables()

    def element(self, name) -> RatFun:
        return self.towers[0].element(name)

    def apply(self, i: int, value) -> RatFun:
        if not 1 <= i <= self.k:
            raise EngineError(f"no derivation d{i} in a model with k={self.k}")
        return self.towers[i - 1].apply(value)

    def apply_word(self, word: MonoidElem, value) -> RatFun:
        """Iterated derivative along a word (rightmost letter acts first)."""
        if word.kind != FREE:
            word = word.canonical_word()
        out = _to_ratfun(value)
        for letter in reversed(word.data):
            out = self.apply(letter, out)
        return out

    def equal(self, a, b) -> bool:
        return self.towers[0].equal(a, b)

    def is_zero(self, a) -> bool:
        return self.towers[0].is_zero(a)

    def reduce(self, a) -> RatFun:
        return self.towers[0].reduce(a)

    def commutes_on_generators(self) -> bool:
        for v in self.variables():
            elem = RatFun.variable(v)
            for i in range(1, self.k + 1):
                for j in range(i + 1, self.k + 1):
                    lhs = self.apply(i, self.apply(j, elem))
                    rhs = self.apply(j, self.apply(i, elem))
                    if not self.equal(lhs, rhs):
                        return False
        return True


def oracle_eval(
    t: DiffTerm,
    model: DiffModel,
    sigma: Mapping[str, object],
    mode: str = FREE,
) -> RatFun:
    """Evaluate a term by literally applying the model derivations.

    `sigma` binds the term's differential variables to model elements;
    names that are model variables evaluate to themselves.  In commutative
    mode the model derivations must commute on generators.
    """
    if mode == COMMUTATIVE and not model.commutes_on_generators():
        raise KindMismatchError("model derivations do not commute; free mode only")
    model_vars = {v.base: v for v in model.variables()}

    def rec(node: DiffTerm) -> RatFun:
        if isinstance(node, TConst):
            return RatFun.const(node.value)
        if isinstance(node, TVar):
            if node.name in sigma:
                return _to_ratfun(sigma[node.name])
            if node.name in model_vars:
                return RatFun.variable(model_vars[node.name])
            raise UncoveredVariableError(f"no model value for variable {node.name}")
        if isinstance(node, TAdd):
            return rec(node.left) + rec(node.right)
        if isinstance(node, TMul):
            return rec(node.left) * rec(node.right)
        if isinstance(node, TNeg):
            return -rec(node.arg)
        if isinstance(node, TDer):
            return model.apply(node.index, rec(node.arg))
        raise TypeError(f"unknown term node: {node!r}")

    return model.reduce(rec(t))


def jet_binding(
    model: DiffModel,
    sigma: Mapping[str, object],
    jet_vars: Sequence[JetVar],
) -> dict[JetVar, RatFun]:
    """Bind jet variables to the literal iterated derivatives they stand for."""
    out: dict[JetVar, RatFun] = {}
    for v in jet_vars:
        if v.index is None:
            out[v] = model.element(v.base) if v.base not in sigma else _to_ratfun(sigma[v.base])
        else:
            if v.base not in sigma:
                raise UncoveredVariableError(f"no model value for {v.base}")
            out[v] = model.apply_word(v.index, sigma[v.base])
    return out
