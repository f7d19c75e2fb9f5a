"""Derivation calculus: twisted lifts, derivation application, towers.

A `DerSpec` packages a derivation acting on expressions: a coefficient
table `eta` (how the derivation acts on parameters) and an image table
`images` (values assigned to the remaining variables).  Variables in
`eta`'s domain are the parameters; every other variable of an expression
is treated as a main variable.

The twisted lift of p sends each main variable x to a fresh partner
variable y_x and applies `eta` to the coefficients:

    lift(p) = p_eta + sum_x (dp/dx) * y_x,

so that substituting y_x -> D(x) recovers the action of any derivation D
extending eta.  Setting all partners to zero gives the coefficient-only
part p_eta.

`Tower` models iterated algebraic extensions of a transcendental base
field Q(params): each stage adjoins a generator with a defining polynomial
and carries the forced derivative value

    d(gen) = - (defining polynomial with coefficients derived, at gen)
             / (its derivative in gen, at gen).

Tower arithmetic reduces elements by pseudo-division against each stage's
defining polynomial (highest stage first) and inverts elements through the
extended Euclidean algorithm against the defining polynomial.  Degenerate
elements (zero divisors arising from a reducible defining polynomial)
raise `NonInvertibleError` instead of splitting the tower.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Union

from .algebra import JetVar, Poly, RatFun, _to_ratfun, pseudo_remainder
from .errors import (
    EngineError,
    NonInvertibleError,
    SeparantZeroError,
    UncoveredVariableError,
    UndeclaredParameterError,
)

Value = Union[Poly, RatFun]


@dataclass
class DerSpec:
    """A derivation: coefficient action on parameters plus variable images."""

    name: str = "d"
    eta: dict[JetVar, Value] = field(default_factory=dict)
    images: dict[JetVar, Value] = field(default_factory=dict)

    def __post_init__(self):
        declared = set(self.eta)
        for p, value in self.eta.items():
            extra = _to_ratfun(value).variables() - declared
            if extra:
                names = ", ".join(sorted(str(v) for v in extra))
                raise UndeclaredParameterError(
                    f"eta image of {p} mentions undeclared parameters: {names}"
                )
        overlap = declared & set(self.images)
        if overlap:
            names = ", ".join(sorted(str(v) for v in overlap))
            raise UndeclaredParameterError(f"variables both parameter and main: {names}")

    @property
    def parameters(self) -> set[JetVar]:
        return set(self.eta)

    def __str__(self) -> str:
        def table(mapping):
            items = sorted(mapping.items(), key=lambda kv: kv[0].sort_key)
            return ", ".join(f"{v} -> {val}" for v, val in items)

        eta_part = table(self.eta) if self.eta else "none"
        if self.images:
            return f"eta: {eta_part}; {self.name}: {table(self.images)}"
        return f"eta: {eta_part}"


def coeff_derivative(q: Value, eta: Mapping[JetVar, Value]) -> Value:
    """Apply the coefficient derivation: sum over parameters of dq/dc * eta(c)."""
    out = Poly.zero()
    for v in sorted(q.variables() & set(eta), key=lambda v: v.sort_key):
        out = out + q.partial(v) * eta[v]
    return out


def partner_var(v: JetVar) -> JetVar:
    """The fresh tangent partner of a main variable (reserved y_ prefix)."""
    return JetVar("y_" + v.base, v.index)


class LiftResult(NamedTuple):
    lift: Value
    coeff_only: Value


def twisted_lift(p: Value, spec: DerSpec) -> LiftResult:
    """Lift p to p_eta + sum (dp/dx) y_x over fresh partner variables."""
    mains = sorted(p.variables() - spec.parameters, key=lambda v: v.sort_key)
    for v in mains:
        if partner_var(v) in p.variables():
            raise EngineError(f"reserved partner name {partner_var(v)} already occurs in {p}")
    coeff_only = coeff_derivative(p, spec.eta)
    lift = coeff_only
    for v in mains:
        lift = lift + p.partial(v) * Poly.variable(partner_var(v))
    return LiftResult(lift, coeff_only)


def apply_derivation(q: Value, spec: DerSpec) -> Value:
    """Evaluate the derivation on q: q_eta + sum (dq/dx) * images[x]."""
    out = coeff_derivative(q, spec.eta)
    mains = sorted(q.variables() - spec.parameters, key=lambda v: v.sort_key)
    for v in mains:
        if v not in spec.images:
            raise UncoveredVariableError(f"derivation {spec.name} has no image for {v}")
        out = out + q.partial(v) * spec.images[v]
    return out


def implicit_delta(p: Poly, main: JetVar, spec: DerSpec) -> RatFun:
    """Derivative value forced on `main` by differentiating the constraint p = 0.

    Returns -(p_eta + sum_{v != main} (dp/dv) * images[v]) / (dp/dmain); the
    sign is fixed so the result annihilates the constraint.
    """
    separant = p.partial(main)
    if separant.is_zero:
        raise SeparantZeroError(f"constraint does not depend on {main}")
    total = coeff_derivative(p, spec.eta)
    for v in sorted(p.variables() - spec.parameters - {main}, key=lambda v: v.sort_key):
        if v not in spec.images:
            raise UncoveredVariableError(f"no derivative value for {v}")
        total = total + p.partial(v) * spec.images[v]
    return _to_ratfun(-total) / _to_ratfun(separant)


# ----------------------------------------------------------------------
# towers of algebraic extensions


@dataclass(frozen=True)
class TowerStage:
    gen: JetVar
    minpoly: Poly
    dvalue: RatFun


class Tower:
    """Q(params) extended by a chain of algebraic generators, with a derivation."""

    def __init__(self, params: Iterable[JetVar], eta: Optional[Mapping[JetVar, Value]] = None):
        self.params = tuple(params)
        given = dict(eta) if eta else {}
        for p in given:
            if p not in self.params:
                raise UndeclaredParameterError(f"eta assigns {p}, which is not a base parameter")
        # unlisted parameters are constants for the derivation
        self.eta = {p: given.get(p, Poly.zero()) for p in self.params}
        self.stages: tuple[TowerStage, ...] = ()

    # -- construction --------------------------------------------------

    def _with_stages(self, stages: tuple[TowerStage, ...]) -> "Tower":
        out = Tower.__new__(Tower)
        out.params = self.params
        out.eta = dict(self.eta)
        out.stages = stages
        return out

    def extend(self, minpoly: Poly, gen: Union[JetVar, str]) -> "Tower":
        return extend_to_algebraic(self, minpoly, gen)

    def with_eta(self, eta: Mapping[JetVar, Value], params: Optional[Iterable[JetVar]] = None) -> "Tower":
        """Rebuild the same chain of extensions over a new coefficient derivation."""
        base = Tower(self.params if params is None else params, eta)
        for stage in self.stages:
            base = base.extend(stage.minpoly, stage.gen)
        return base

    # -- structure -----------------------------------------------------

    def variables(self) -> tuple[JetVar, ...]:
        return self.params + tuple(s.gen for s in self.stages)

    def gens(self) -> tuple[JetVar, ...]:
        return tuple(s.gen for s in self.stages)

    def element(self, name: Union[JetVar, str]) -> RatFun:
        v = JetVar(name) if isinstance(name, str) else name
        if v not in self.variables():
            raise UncoveredVariableError(f"{v} is not a tower variable")
        return RatFun.variable(v)

    def derspec(self, name: str = "d") -> DerSpec:
        return DerSpec(name, dict(self.eta), {s.gen: s.dvalue for s in self.stages})

    # -- reduction and zero testing ------------------------------------

    def reduce_poly(self, p: Poly) -> tuple[Poly, Poly]:
        """Normal form modulo the stage relations.

        Returns (rem, mult) with mult * p congruent to rem and mult a
        product of powers of stage initials (never zero in the tower).
        """
        mult = Poly.const(1)
        for stage in reversed(self.stages):
            d = stage.minpoly.deg_in(stage.gen)
            if p.deg_in(stage.gen) >= d:
                rem, m, _ = pseudo_remainder(p, stage.minpoly, stage.gen)
                p = rem
                mult = mult * m
        return p, mult

    def reduce(self, x: Value) -> RatFun:
        """Value-preserving normal form of a tower element."""
        rf = _to_ratfun(x)
        for _ in range(len(self.stages) + 2):
            rn, mn = self.reduce_poly(rf.num)
            rd, md = self.reduce_poly(rf.den)
            if rd.is_zero:
                raise NonInvertibleError(f"denominator {rf.den} vanishes in the tower")
            new = RatFun(rn * md, rd * mn)
            if new.num == rf.num and new.den == rf.den:
                return new
            rf = new
        return rf

    def is_zero(self, x: Value) -> bool:
        rem, _ = self.reduce_poly(_to_ratfun(x).num)
        return rem.is_zero

    def equal(self, a: Value, b: Value) -> bool:
        return self.is_zero(_to_ratfun(a) - _to_ratfun(b))

    # -- derivation ----------------------------------------------------

    def apply(self, x: Value) -> RatFun:
        return self.reduce(_to_ratfun(apply_derivation(_to_ratfun(x), self.derspec())))

    # -- inversion via the extended Euclidean step ----------------------

    def invert(self, x: Value) -> RatFun:
        rf = self.reduce(x)
        if rf.is_zero:
            raise NonInvertibleError("cannot invert zero")
        inv_num = self._invert_poly(rf.num)
        return self.reduce(inv_num * rf.den)

    def _invert_poly(self, p: Poly) -> RatFun:
        stage_idx = None
        for i in range(len(self.stages) - 1, -1, -1):
            if p.depends_on(self.stages[i].gen):
                stage_idx = i
                break
        if stage_idx is None:
            # transcendental content only: a plain fraction inverts it
            return RatFun(Poly.const(1), p)
        stage = self.stages[stage_idx]
        a = _upoly(p, stage.gen)
        b = _upoly(stage.minpoly, stage.gen)
        g, u = _ext_euclid_first(self, a, b)
        dg = _udeg(self, g)
        if dg != 0:
            raise NonInvertibleError(
                f"{p} is a zero divisor modulo {stage.minpoly} (gcd has degree {dg})"
            )
        inv_c = self.invert(g[0])
        result = RatFun.const(0)
        for e, coef in u.items():
            result = result + coef * RatFun(Poly.variable(stage.gen) ** e)
        return self.reduce(result * inv_c)

    def __str__(self) -> str:
        parts = [f"Q({', '.join(str(p) for p in self.params)})"]
        for s in self.stages:
            parts.append(f"[{s.gen}: {s.minpoly} = 0]")
        return "".join(parts)


# -- univariate helpers over a tower (sparse degree -> coefficient maps) --


def _upoly(p: Poly, gen: JetVar) -> dict[int, RatFun]:
    return {e: RatFun(c) for e, c in p.as_univariate(gen).items()}


def _udeg(tower: Tower, up: Mapping[int, RatFun]) -> int:
    best = -1
    for e, c in up.items():
        if e > best and not tower.is_zero(c):
            best = e
    return best


def _udivmod(tower: Tower, a: dict[int, RatFun], b: dict[int, RatFun]):
    db = _udeg(tower, b)
    if db < 0:
        raise ZeroDivisionError("division by zero polynomial over the tower")
    inv_lb = tower.invert(b[db])
    q: dict[int, RatFun] = {}
    r = {e: tower.reduce(c) for e, c in a.items() if not tower.is_zero(c)}
    while True:
        dr = _udeg(tower, r)
        if dr < db:
            break
        coef = tower.reduce(r[dr] * inv_lb)
        q[dr - db] = q.get(dr - db, RatFun.const(0)) + coef
        for e, c in b.items():
            shifted = e + dr - db
            updated = r.get(shifted, RatFun.const(0)) - coef * c
            updated = tower.reduce(updated)
            if updated.is_zero:
                r.pop(shifted, None)
            else:
                r[shifted] = updated
        r.pop(dr, None)
    return q, r


def _ext_euclid_first(tower: Tower, a: dict[int, RatFun], b: dict[int, RatFun]):
    """Last nonzero remainder g and cofactor u with u * a = g modulo b."""
    r0, r1 = dict(a), dict(b)
    u0: dict[int, RatFun] = {0: RatFun.const(1)}
    u1: dict[int, RatFun] = {}
    while _udeg(tower, r1) >= 0:
        quot, rem = _udivmod(tower, r0, r1)
        r0, r1 = r1, rem
        prod = _umul(tower, quot, u1)
        u0, u1 = u1, _usub(tower, u0, prod)
    return r0, u0


def _umul(tower: Tower, a: Mapping[int, RatFun], b: Mapping[int, RatFun]) -> dict[int, RatFun]:
    out: dict[int, RatFun] = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            out[e] = out.get(e, RatFun.const(0)) + c1 * c2
    return {e: tower.reduce(c) for e, c in out.items() if not tower.is_zero(c)}


def _usub(tower: Tower, a: Mapping[int, RatFun], b: Mapping[int, RatFun]) -> dict[int, RatFun]:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, RatFun.const(0)) - c
    return {e: c for e, c in out.items() if not tower.is_zero(c)}


def _gcd_degree(tower: Tower, a: dict[int, RatFun], b: dict[int, RatFun]) -> int:
    r0, r1 = dict(a), dict(b)
    while _udeg(tower, r1) >= 0:
        _, rem = _udivmod(tower, r0, r1)
        r0, r1 = r1, rem
    return _udeg(tower, r0)


def extend_to_algebraic(tower: Tower, minpoly: Poly, gen: Union[JetVar, str]) -> Tower:
    """Adjoin an algebraic generator and the derivative value it forces.

    The defining polynomial must be univariate in `gen` over the current
    tower, with a simple root there: the squarefreeness of minpoly in `gen`
    is verified by a gcd computation against its own separant.
    """
    gen = JetVar(gen) if isinstance(gen, str) else gen
    if gen in tower.variables():
        raise EngineError(f"{gen} is already a tower variable")
    extra = minpoly.variables() - set(tower.variables()) - {gen}
    if extra:
        names = ", ".join(sorted(str(v) for v in extra))
        raise EngineError(f"defining polynomial mentions foreign variables: {names}")
    if minpoly.deg_in(gen) == 0:
        raise EngineError(f"defining polynomial does not involve {gen}")

    lead = minpoly.leading_coeff_in(gen)
    if tower.is_zero(lead):
        raise SeparantZeroError(f"leading coefficient {lead} vanishes in the tower")

    separant = minpoly.partial(gen)
    gcd_deg = _gcd_degree(tower, _upoly(minpoly, gen), _upoly(separant, gen))
    if gcd_deg != 0:
        raise SeparantZeroError(
            f"defining polynomial has a multiple root: gcd with separant has degree {gcd_deg}"
        )

    # derivative forced on gen: coefficients derived, divided by the separant
    lower = coeff_derivative(minpoly, tower.eta)
    spec = tower.derspec()
    for v in sorted(minpoly.variables() & set(spec.images), key=lambda v: v.sort_key):
        lower = lower + minpoly.partial(v) * spec.images[v]
    dvalue = _to_ratfun(-lower) / _to_ratfun(separant)

    stage = TowerStage(gen, minpoly, dvalue)
    out = tower._with_stages(tower.stages + (stage,))
    stage = TowerStage(gen, minpoly, out.reduce(dvalue))
    out = tower._with_stages(tower.stages + (stage,))
    assert out.is_zero(apply_derivation(_to_ratfun(minpoly), out.derspec()))
    return out
