"""Syntactic axiom-instance transforms over definable-set descriptions.

A definable-set description is a list of coordinate variables, polynomial
(in)equation atoms over them, and a projection target.  The transforms
here only rearrange such data; they never attempt to decide dimension of
a general definable set.  The one dimension statement produced is the
certificate for triangular systems, where the count of free coordinates
is forced by the shape of the equations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .algebra import JetVar, Poly, RatFun, _to_ratfun
from .config import Configuration
from .errors import EngineError, NotTriangularError
from .jet import JetAtom
from .monoid import InitialSet, MonoidElem, minimal_leaders


@dataclass(frozen=True)
class DefinableSetDesc:
    """Coordinates, polynomial atoms, and a projection target."""

    indices: tuple[JetVar, ...]
    atoms: tuple[JetAtom, ...]
    projection: tuple[JetVar, ...]

    def __post_init__(self):
        index_set = set(self.indices)
        if len(index_set) != len(self.indices):
            raise EngineError("duplicate coordinates")
        for atom in self.atoms:
            extra = atom.poly.variables() - index_set
            if extra:
                names = ", ".join(sorted(str(v) for v in extra))
                raise EngineError(f"atom mentions undeclared coordinates: {names}")
        if not set(self.projection) <= index_set:
            raise EngineError("projection target must be a subset of the coordinates")

    def contains(self, point: Mapping[JetVar, Union[int, Fraction]]) -> bool:
        binding = {v: Fraction(point[v]) for v in self.indices}
        for atom in self.atoms:
            value = _to_ratfun(atom.poly.evaluate(binding))
            if atom.rel == "=" and not value.is_zero:
                return False
            if atom.rel == "!=" and value.is_zero:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "indices": [str(v) for v in self.indices],
            "atoms": [{"poly": str(a.poly), "rel": a.rel} for a in self.atoms],
            "projection": [str(v) for v in self.projection],
        }


@dataclass(frozen=True)
class WideFromDeepResult:
    wide: DefinableSetDesc
    x_vars: tuple[JetVar, ...]
    y_vars: tuple[JetVar, ...]
    projection_note: str
    jet_recovery: tuple[tuple[JetVar, JetVar], ...]  # (y_i, x_{i+1}) couplings


def _fresh_base(taken: set[str], seed: str = "y") -> str:
    base = seed
    while any(name == base or name.startswith(base + "_") for name in taken):
        base += seed
    return base


def wide_from_deep(deep: DefinableSetDesc, n: int) -> WideFromDeepResult:
    """Turn a jet-style description in n+1 coordinates into a one-step one.

    The first n coordinates survive as positions, the last becomes the n-th
    velocity, and coupling equations y_i = x_{i+1} make the velocities
    reproduce the shifted positions, so a point of the new set encodes the
    depth-n jet of its first coordinate.
    """
    if len(deep.indices) != n + 1:
        raise EngineError(f"expected {n + 1} coordinates, got {len(deep.indices)}")
    x_vars = deep.indices[:n]
    taken = {v.base for v in deep.indices}
    y_base = _fresh_base(taken)
    y_vars = tuple(JetVar(f"{y_base}{i + 1}") for i in range(n))

    rename = {deep.indices[n]: Poly.variable(y_vars[n - 1])}
    atoms = [JetAtom(_to_ratfun(a.poly.substitute(rename)).to_poly(), a.rel) for a in deep.atoms]
    couplings = []
    for i in range(n - 1):
        atoms.append(JetAtom(Poly.variable(y_vars[i]) - Poly.variable(x_vars[i + 1]), "="))
        couplings.append((y_vars[i], x_vars[i + 1]))

    wide = DefinableSetDesc(tuple(x_vars) + y_vars, tuple(atoms), tuple(x_vars))
    note = (
        "projection to ("
        + ", ".join(str(v) for v in x_vars)
        + ") equals the projection of the input to its first n coordinates"
    )
    return WideFromDeepResult(wide, tuple(x_vars), y_vars, note, tuple(couplings))


@dataclass(frozen=True)
class NcNormalizeResult:
    v_prime: InitialSet
    z_prime: DefinableSetDesc
    added: frozenset[MonoidElem]
    projection_note: str


def nc_normalize(initial: InitialSet, desc: DefinableSetDesc) -> NcNormalizeResult:
    """Extend word coordinates so the maximal ones are exactly the minimal leaders.

    The index set grows by the minimal elements of the complement of its
    free part; constraints are pulled back unchanged, so projections to the
    free part are preserved.
    """
    bases = {v.base for v in desc.indices}
    if len(bases) != 1:
        raise EngineError("word coordinates must share one base name")
    base = bases.pop()
    have = {v.index for v in desc.indices}
    if have != set(initial.elements):
        raise EngineError("coordinates do not match the initial set")

    maximal = initial.maximal_elements()
    free = InitialSet(initial.kind, initial.k, initial.elements - maximal)
    leaders = minimal_leaders(free).elements
    added = leaders - initial.elements
    v_prime = InitialSet(initial.kind, initial.k, initial.elements | leaders)

    new_indices = tuple(
        sorted(
            {JetVar(base, el) for el in v_prime.elements},
            key=lambda v: v.sort_key,
        )
    )
    projection = tuple(
        sorted((JetVar(base, el) for el in free.elements), key=lambda v: v.sort_key)
    )
    z_prime = DefinableSetDesc(new_indices, desc.atoms, projection)
    note = "projection to the free coordinates is unchanged"
    return NcNormalizeResult(v_prime, z_prime, frozenset(added), note)


# ----------------------------------------------------------------------
# triangular dimension certificates


@dataclass(frozen=True)
class TriangularSystem:
    """Equations with designated main variables over strictly smaller ones."""

    ambient: tuple[JetVar, ...]
    equations: tuple[tuple[JetVar, Poly], ...]


@dataclass(frozen=True)
class DimensionCertificate:
    free_count: int
    solve_order: tuple[JetVar, ...]
    free_vars: tuple[JetVar, ...]

    def to_dict(self) -> dict:
        return {
            "dimension": self.free_count,
            "solve_order": [str(v) for v in self.solve_order],
            "free": [str(v) for v in self.free_vars],
        }


def triangular_dimension_certificate(
    system: Union[Configuration, TriangularSystem],
) -> DimensionCertificate:
    """Count free coordinates of a triangular system, with the solve order.

    Each equation must involve its main variable with positive degree, a
    not-identically-zero separant, and otherwise only variables strictly
    below the main in the coordinate order.  Anything else is rejected:
    dimensions of general systems are out of scope.
    """
    if isinstance(system, Configuration):
        mains = [system.jet_var(pi) for pi in system.leaders]
        ambient = set(mains)
        for p in system.relations.values():
            ambient |= {v for v in p.variables() if v.index is not None}
        ambient_order = sorted(ambient, key=lambda v: v.sort_key)
        equations = [
            (system.jet_var(pi), system.relations[pi])
            for pi in sorted(system.leaders, key=lambda e: e.sort_key)
        ]
        system = TriangularSystem(tuple(ambient_order), tuple(equations))

    ambient = list(system.ambient)
    position = {v: i for i, v in enumerate(ambient)}
    mains = [m for m, _ in system.equations]
    if len(set(mains)) != len(mains):
        raise NotTriangularError("two equations share a main variable")
    for m, p in system.equations:
        if m not in position:
            raise NotTriangularError(f"main variable {m} is not an ambient coordinate")
        if not p.depends_on(m):
            raise NotTriangularError(f"equation for {m} does not involve it")
        if p.partial(m).is_zero:
            raise NotTriangularError(f"equation for {m} has identically zero separant")
        for v in p.variables():
            if v == m or v not in position:
                continue
            if position[v] >= position[m]:
                raise NotTriangularError(
                    f"equation for {m} mentions {v}, which is not below it"
                )
    free = [v for v in ambient if v not in set(mains)]
    order = sorted(mains, key=lambda v: position[v])
    return DimensionCertificate(len(free), tuple(order), tuple(free))
