"""Twisted tangent bundles and derivation extension at generic points.

Given generators p_1..p_l of the ideal of a variety W in n ambient
variables and a coefficient derivation on the parameters, the twisted
bundle is cut out by the lifts

    p_i with coefficients derived  +  Jacobian row of p_i . y  =  0,

one affine-linear equation in the tangent coordinates y per generator.
With the zero derivation this is the ordinary tangent bundle.  Points are
tuples of exact rational functions; at a point the bundle fiber becomes an
affine system solved exactly, giving tangent dimensions and membership in
the equal-dimension strata.

`extend_at_point` realizes a fiber point as an honest derivation: the
point's coordinates live in a tower whose base transcendentals are the
generic coordinates, the prescribed tangent values become the derivation
of those transcendentals, and algebraic stages receive the derivative
value their defining polynomial forces.  The result annihilates every
generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

from .algebra import AffineSpace, JetVar, Poly, RatFun, _to_ratfun, solve_affine
from .derivation import DerSpec, Tower, coeff_derivative, partner_var, twisted_lift
from .errors import FiberError, UndeclaredParameterError

Value = Union[Poly, RatFun]


@dataclass(frozen=True)
class VarietyPresentation:
    """Ambient variables plus generators assumed to generate the full ideal."""

    variables: tuple[JetVar, ...]
    gens: tuple[Poly, ...]
    generates_full_ideal: bool = True

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate ambient variables")

    @property
    def n(self) -> int:
        return len(self.variables)

    def parameters(self) -> set[JetVar]:
        out = set()
        for p in self.gens:
            out |= p.variables()
        return out - set(self.variables)

    def point_binding(self, point: Sequence[Value]) -> dict[JetVar, RatFun]:
        if len(point) != self.n:
            raise ValueError(f"point has {len(point)} coordinates, ambient dimension is {self.n}")
        binding = {v: _to_ratfun(a) for v, a in zip(self.variables, point)}
        for p in self.parameters():
            binding[p] = RatFun.variable(p)
        return binding

    def contains(self, point: Sequence[Value], is_zero=None) -> bool:
        binding = self.point_binding(point)
        test = is_zero if is_zero is not None else (lambda rf: rf.is_zero)
        return all(test(p.evaluate(binding)) for p in self.gens)


@dataclass(frozen=True)
class Prolongation:
    source: VarietyPresentation
    spec: DerSpec
    equations: tuple[Value, ...]

    def tangent_vars(self) -> tuple[JetVar, ...]:
        return tuple(partner_var(v) for v in self.source.variables)


def _check_parameters(variety: VarietyPresentation, spec: DerSpec) -> None:
    undeclared = variety.parameters() - spec.parameters
    if undeclared:
        names = ", ".join(sorted(str(v) for v in undeclared))
        raise UndeclaredParameterError(f"parameters not covered by the derivation: {names}")
    clash = spec.parameters & set(variety.variables)
    if clash:
        names = ", ".join(sorted(str(v) for v in clash))
        raise UndeclaredParameterError(f"ambient variables declared as parameters: {names}")


def twisted_bundle(variety: VarietyPresentation, spec: DerSpec) -> Prolongation:
    """The system of lifted generators, affine-linear in the tangent variables."""
    _check_parameters(variety, spec)
    equations = tuple(twisted_lift(p, spec).lift for p in variety.gens)
    return Prolongation(variety, spec, equations)


def tangent_system_at(
    variety: VarietyPresentation, spec: DerSpec, point: Sequence[Value]
) -> tuple[list[list[RatFun]], list[RatFun]]:
    """Matrix and constant column of the fiber equations at a point of W."""
    binding = variety.point_binding(point)
    rows = []
    rhs = []
    for p in variety.gens:
        rows.append([_to_ratfun(p.partial(v).substitute(binding)) for v in variety.variables])
        rhs.append(_to_ratfun(coeff_derivative(p, spec.eta)).substitute(binding))
    return rows, rhs


def tangent_space_at(
    variety: VarietyPresentation,
    spec: DerSpec,
    point: Sequence[Value],
    tower: Optional[Tower] = None,
) -> AffineSpace:
    """Solve the twisted fiber at a point of the variety.

    Membership of the point is checked by evaluation; when the coordinates
    live in an algebraic tower, pass it so vanishing is decided there.
    """
    _check_parameters(variety, spec)
    is_zero = tower.is_zero if tower is not None else None
    if not variety.contains(point, is_zero=is_zero):
        raise FiberError("point does not satisfy the generators")
    rows, rhs = tangent_system_at(variety, spec, point)
    return solve_affine(rows, rhs, n=variety.n)


class RegRank(NamedTuple):
    dimension: int
    in_reg: Optional[bool]


def reg_rank_at(
    variety: VarietyPresentation, point: Sequence[Value], d: Optional[int] = None
) -> RegRank:
    """Ordinary tangent dimension at a point, and membership in the d-stratum."""
    space = tangent_space_at(variety, DerSpec(eta={p: Poly.zero() for p in variety.parameters()}), point)
    dim = space.dimension
    return RegRank(dim, None if d is None else dim == d)


def extend_at_point(
    variety: VarietyPresentation,
    spec: DerSpec,
    tower: Tower,
    point: Sequence[Union[JetVar, str]],
    tangent: Sequence[Value],
) -> DerSpec:
    """Extend the coefficient derivation so the point moves along the fiber.

    The point's coordinates must be distinct tower variables; transcendental
    coordinates receive the prescribed tangent values directly, algebraic
    stages the derivative their defining polynomial forces (which must agree
    with the prescribed value, or the pair was not on the bundle).
    """
    _check_parameters(variety, spec)
    coords = tuple(JetVar(c) if isinstance(c, str) else c for c in point)
    if len(coords) != variety.n or len(tangent) != variety.n:
        raise ValueError("point and tangent must match the ambient dimension")
    tower_vars = set(tower.variables())
    if len(set(coords)) != len(coords) or any(c not in tower_vars for c in coords):
        raise FiberError("coordinates must be distinct tower variables")
    if any(c in spec.parameters for c in coords):
        raise FiberError("a coefficient parameter cannot serve as a generic coordinate")

    tangent = [_to_ratfun(y) for y in tangent]
    binding = {v: RatFun.variable(c) for v, c in zip(variety.variables, coords)}
    for p in variety.parameters():
        binding[p] = RatFun.variable(p)

    for p in variety.gens:
        if not tower.is_zero(_to_ratfun(p.substitute(binding))):
            raise FiberError(f"point does not satisfy {p} in the tower")

    # fiber membership: lifted equation evaluated at (point, tangent)
    for p in variety.gens:
        total = _to_ratfun(coeff_derivative(p, spec.eta).substitute(binding))
        for v, y in zip(variety.variables, tangent):
            total = total + _to_ratfun(p.partial(v).substitute(binding)) * y
        if not tower.is_zero(total):
            raise FiberError("tangent values do not satisfy the lifted equations")

    gen_names = set(tower.gens())
    eta = {p: v for p, v in spec.eta.items()}
    for c, y in zip(coords, tangent):
        if c in gen_names:
            continue
        eta[c] = y
    missing = set(tower.params) - set(eta)
    if missing:
        names = ", ".join(sorted(str(v) for v in missing))
        raise UndeclaredParameterError(f"tower transcendentals without derivative values: {names}")

    extended = tower.with_eta(eta)
    images = {stage.gen: stage.dvalue for stage in extended.stages}
    for c, y in zip(coords, tangent):
        if c in gen_names and not extended.equal(images[c], y):
            raise FiberError(f"prescribed value for {c} is not the forced derivative")
    return DerSpec(spec.name, eta, images)
