"""Exact arithmetic over Q: sparse multivariate polynomials and fractions.

Variables are `JetVar`s: a base name plus an optional monoid index, so the
same engine serves plain parameters (no index), jet variables indexed by
words, and jet variables indexed by exponent tuples.  Coefficients are
`fractions.Fraction` throughout; nothing here is ever approximate.

Rational functions are kept as normalized numerator/denominator pairs.
Equality is decided by cross-multiplication, so no multivariate gcd engine
is needed; construction only removes rational content, fixes the sign of
the denominator, and cancels the denominator when it happens to divide the
numerator exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from math import gcd

from .errors import PoleError, UncoveredVariableError
from .monoid import MonoidElem


@dataclass(frozen=True)
class JetVar:
    """A variable: base name plus an optional monoid index.

    Plain variables (index None) play the role of parameters and auxiliary
    unknowns; indexed variables stand for iterated derivatives.
    """

    base: str
    index: Optional[MonoidElem] = None

    @property
    def sort_key(self):
        if self.index is None:
            return (self.base, 0, ())
        return (self.base, 1, self.index.sort_key)

    def __str__(self) -> str:
        if self.index is None:
            return self.base
        return f"{self.base}[{self.index}]"

    def __lt__(self, other: "JetVar") -> bool:
        return self.sort_key < other.sort_key


def var(name: str, index: Optional[MonoidElem] = None) -> "Poly":
    return Poly.variable(JetVar(name, index))


Coefficient = Union[int, Fraction]


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"not an exact coefficient: {c!r}")


@dataclass(frozen=True)
class Monomial:
    """A product of variable powers; exponents are positive, variables sorted."""

    powers: tuple[tuple[JetVar, int], ...]

    @staticmethod
    def make(powers: Mapping[JetVar, int]) -> "Monomial":
        items = tuple(
            sorted(((v, e) for v, e in powers.items() if e != 0), key=lambda p: p[0].sort_key)
        )
        if any(e < 0 for _, e in items):
            raise ValueError(f"negative exponent in monomial: {items}")
        return Monomial(items)

    @staticmethod
    def one() -> "Monomial":
        return Monomial(())

    @staticmethod
    def of(v: JetVar, e: int = 1) -> "Monomial":
        return Monomial.make({v: e})

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.powers)

    def deg_in(self, v: JetVar) -> int:
        for w, e in self.powers:
            if w == v:
                return e
        return 0

    def variables(self) -> set[JetVar]:
        return {v for v, _ in self.powers}

    def __mul__(self, other: "Monomial") -> "Monomial":
        d = dict(self.powers)
        for v, e in other.powers:
            d[v] = d.get(v, 0) + e
        return Monomial.make(d)

    def divides(self, other: "Monomial") -> bool:
        other_d = dict(other.powers)
        return all(other_d.get(v, 0) >= e for v, e in self.powers)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        d = dict(self.powers)
        for v, e in other.powers:
            d[v] = d.get(v, 0) - e
        return Monomial.make(d)

    def without(self, v: JetVar) -> "Monomial":
        return Monomial(tuple((w, e) for w, e in self.powers if w != v))

    def gcd(self, other: "Monomial") -> "Monomial":
        other_d = dict(other.powers)
        return Monomial.make({v: min(e, other_d.get(v, 0)) for v, e in self.powers})

    def order_key(self, all_vars: Sequence[JetVar]):
        d = dict(self.powers)
        return (self.degree, tuple(d.get(v, 0) for v in all_vars))


class Poly:
    """Sparse multivariate polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Fraction]] = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = _as_fraction(c)
                if c != 0:
                    clean[m] = c
        self.terms = clean

    # ------------------------------------------------------------------
    # constructors

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def const(c) -> "Poly":
        c = _as_fraction(c)
        return Poly({Monomial.one(): c}) if c != 0 else Poly()

    @staticmethod
    def variable(v: JetVar) -> "Poly":
        return Poly({Monomial.of(v): Fraction(1)})

    # ------------------------------------------------------------------
    # structure

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(m.degree == 0 for m in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError(f"not a constant: {self}")
        return next(iter(self.terms.values()))

    def variables(self) -> set[JetVar]:
        out: set[JetVar] = set()
        for m in self.terms:
            out |= m.variables()
        return out

    def total_degree(self) -> int:
        return max((m.degree for m in self.terms), default=0)

    def deg_in(self, v: JetVar) -> int:
        return max((m.deg_in(v) for m in self.terms), default=0)

    def depends_on(self, v: JetVar) -> bool:
        return any(m.deg_in(v) > 0 for m in self.terms)

    def sorted_vars(self) -> list[JetVar]:
        return sorted(self.variables(), key=lambda v: v.sort_key)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        # degree first, ties broken on the highest variable: x[d1] before x[0]
        all_vars = self.sorted_vars()[::-1]
        return sorted(self.terms.items(), key=lambda t: t[0].order_key(all_vars), reverse=True)

    def leading_term(self) -> tuple[Monomial, Fraction]:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        return self.sorted_terms()[0]

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if self.is_zero:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator))
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def monomial_content(self) -> Monomial:
        """The largest monomial dividing every term."""
        out = None
        for m in self.terms:
            out = m if out is None else out.gcd(m)
            if not out.powers:
                break
        return out if out is not None else Monomial.one()

    def divide_monomial(self, m: Monomial) -> "Poly":
        return Poly({mm / m: c for mm, c in self.terms.items()})

    # ------------------------------------------------------------------
    # arithmetic

    def _coerce(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return None

    def __add__(self, other):
        if isinstance(other, RatFun):
            return NotImplemented
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, RatFun):
            return NotImplemented
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RatFun):
            return NotImplemented
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                s = out.get(m, Fraction(0)) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        return RatFun(self, other)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, RatFun):
            return RatFun(self) == other
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # ------------------------------------------------------------------
    # calculus and substitution

    def partial(self, v: JetVar) -> "Poly":
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            e = m.deg_in(v)
            if e == 0:
                continue
            d = dict(m.powers)
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            mm = Monomial.make(d)
            s = out.get(mm, Fraction(0)) + c * e
            if s == 0:
                out.pop(mm, None)
            else:
                out[mm] = s
        return Poly(out)

    def substitute(self, binding: Mapping[JetVar, "Poly | RatFun | int | Fraction"]):
        """Replace the bound variables, leaving the others alone."""
        result = None
        for m, c in self.terms.items():
            term = Poly.const(c)
            for v, e in m.powers:
                if v in binding:
                    repl = binding[v]
                    if isinstance(repl, (int, Fraction)):
                        repl = Poly.const(repl)
                    factor = repl ** e
                else:
                    factor = Poly({Monomial.of(v, e): Fraction(1)})
                term = factor * term
            result = term if result is None else result + term
        if result is None:
            return Poly.zero()
        return result

    def evaluate(self, binding: Mapping[JetVar, "Poly | RatFun | int | Fraction"]) -> "RatFun":
        missing = self.variables() - set(binding)
        if missing:
            names = ", ".join(sorted(str(v) for v in missing))
            raise UncoveredVariableError(f"binding misses variables: {names}")
        return _to_ratfun(self.substitute(binding))

    def as_univariate(self, v: JetVar) -> dict[int, "Poly"]:
        """Coefficient map degree -> Poly of self viewed as univariate in v."""
        out: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            e = m.deg_in(v)
            out.setdefault(e, {})[m.without(v)] = c
        return {e: Poly(t) for e, t in out.items()}

    def leading_coeff_in(self, v: JetVar) -> "Poly":
        coeffs = self.as_univariate(v)
        if not coeffs:
            return Poly.zero()
        return coeffs[max(coeffs)]

    # ------------------------------------------------------------------
    # printing: monomials in decreasing (degree, exponents) order

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        pieces = []
        for m, c in self.sorted_terms():
            factors = [f"{v}^{e}" if e > 1 else str(v) for v, e in m.powers]
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            if not pieces:
                pieces.append(body if c > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"Poly({self})"


def divide_exact(a: Poly, b: Poly) -> Optional[Poly]:
    """Exact quotient a/b, or None when b does not divide a."""
    if b.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero:
        return Poly.zero()
    lead_m, lead_c = b.leading_term()
    quotient = Poly.zero()
    rest = a
    while not rest.is_zero:
        m, c = rest.leading_term()
        if not lead_m.divides(m):
            return None
        t = Poly({m / lead_m: c / lead_c})
        quotient = quotient + t
        rest = rest - t * b
    return quotient


class RatFun:
    """A fraction of polynomials; equality is cross-multiplication equality."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if isinstance(num, (int, Fraction)):
            num = Poly.const(num)
        if den is None:
            den = Poly.const(1)
        elif isinstance(den, (int, Fraction)):
            den = Poly.const(den)
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if num.is_zero:
            self.num, self.den = Poly.zero(), Poly.const(1)
            return
        if den.is_constant:
            c = den.constant_value()
            self.num = num * Fraction(c.denominator, c.numerator)
            self.den = Poly.const(1)
            return
        shared = num.monomial_content().gcd(den.monomial_content())
        if shared.powers:
            num = num.divide_monomial(shared)
            den = den.divide_monomial(shared)
        if den.is_constant:
            c = den.constant_value()
            self.num = num * Fraction(c.denominator, c.numerator)
            self.den = Poly.const(1)
            return
        q = divide_exact(num, den)
        if q is not None:
            self.num, self.den = q, Poly.const(1)
            return
        scale = den.content()
        if den.leading_term()[1] < 0:
            scale = -scale
        inv = Fraction(scale.denominator, scale.numerator)
        self.num = num * inv
        self.den = den * inv

    # ------------------------------------------------------------------

    @staticmethod
    def const(c) -> "RatFun":
        return RatFun(Poly.const(c))

    @staticmethod
    def variable(v: JetVar) -> "RatFun":
        return RatFun(Poly.variable(v))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def variables(self) -> set[JetVar]:
        return self.num.variables() | self.den.variables()

    def to_poly(self) -> Poly:
        if not self.den.is_constant:
            raise ValueError(f"not a polynomial: {self}")
        return self.num

    @property
    def is_polynomial(self) -> bool:
        return self.den.is_constant

    # ------------------------------------------------------------------
    # arithmetic

    @staticmethod
    def _coerce(x) -> Optional["RatFun"]:
        if isinstance(x, RatFun):
            return x
        if isinstance(x, Poly):
            return RatFun(x)
        if isinstance(x, (int, Fraction)):
            return RatFun.const(x)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        out = RatFun.__new__(RatFun)
        out.num = -self.num
        out.den = self.den
        return out

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RatFun(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        return RatFun(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if n < 0:
            return RatFun(self.den, self.num) ** (-n)
        return RatFun(self.num ** n, self.den ** n)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero

    def __hash__(self):
        raise TypeError("rational functions are not hashable")

    # ------------------------------------------------------------------

    def partial(self, v: JetVar) -> "RatFun":
        dn = self.num.partial(v)
        dd = self.den.partial(v)
        if dd.is_zero:
            return RatFun(dn, self.den)
        return RatFun(dn * self.den - self.num * dd, self.den * self.den)

    def substitute(self, binding) -> "RatFun":
        num = _to_ratfun(self.num.substitute(binding))
        den = _to_ratfun(self.den.substitute(binding))
        if den.is_zero:
            raise PoleError(f"denominator {self.den} vanishes under substitution", factor=self.den)
        return num / den

    def evaluate(self, binding) -> "RatFun":
        missing = self.variables() - set(binding)
        if missing:
            names = ", ".join(sorted(str(v) for v in missing))
            raise UncoveredVariableError(f"binding misses variables: {names}")
        return self.substitute(binding)

    def __str__(self) -> str:
        if self.den.is_constant:
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def __repr__(self) -> str:
        return f"RatFun({self})"


def _to_ratfun(x) -> RatFun:
    out = RatFun._coerce(x)
    if out is None:
        raise TypeError(f"cannot interpret {x!r} as a rational function")
    return out


def pseudo_remainder(f: Poly, p: Poly, main: JetVar) -> tuple[Poly, Poly, Poly]:
    """Pseudo-division of f by p in the variable `main`.

    Returns (rem, multiplier, quotient) with

        multiplier * f == quotient * p + rem,

    deg_main(rem) < deg_main(p), and multiplier a power of the leading
    coefficient of p in `main`.  The identity is checked on every call
    unless Python runs with -O.
    """
    d = p.deg_in(main)
    if d == 0:
        raise ValueError(f"divisor does not involve {main}")
    lead = p.leading_coeff_in(main)
    rem = f
    quotient = Poly.zero()
    multiplier = Poly.const(1)
    while not rem.is_zero and rem.deg_in(main) >= d:
        e = rem.deg_in(main)
        top = rem.as_univariate(main).get(e, Poly.zero())
        shift = Poly({Monomial.of(main, e - d): Fraction(1)}) if e > d else Poly.const(1)
        rem = lead * rem - top * shift * p
        quotient = lead * quotient + top * shift
        multiplier = multiplier * lead
    assert multiplier * f == quotient * p + rem
    return rem, multiplier, quotient


@dataclass(frozen=True)
class AffineSpace:
    """Solutions of A y + b = 0: rank data, one solution, and a kernel basis."""

    n: int
    rank: int
    consistent: bool
    particular: Optional[tuple[RatFun, ...]]
    kernel: tuple[tuple[RatFun, ...], ...]

    @property
    def dimension(self) -> int:
        """Dimension of the solution set (kernel dimension) when consistent."""
        return self.n - self.rank


def solve_affine(rows: Sequence[Sequence], rhs: Sequence, n: Optional[int] = None) -> AffineSpace:
    """Exact Gauss-Jordan elimination for A y + b = 0 over the fraction field.

    `n` fixes the number of unknowns when the system has no rows.
    """
    m = len(rows)
    if m != len(rhs):
        raise ValueError("matrix and right-hand side sizes differ")
    if n is None:
        n = len(rows[0]) if m else 0
    for row in rows:
        if len(row) != n:
            raise ValueError("ragged matrix")
    a = [[_to_ratfun(x) for x in row] for row in rows]
    b = [_to_ratfun(x) for x in rhs]

    pivots: list[tuple[int, int]] = []
    row_i = 0
    for col in range(n):
        pivot = None
        for r in range(row_i, m):
            if not a[r][col].is_zero:
                pivot = r
                break
        if pivot is None:
            continue
        a[row_i], a[pivot] = a[pivot], a[row_i]
        b[row_i], b[pivot] = b[pivot], b[row_i]
        inv = RatFun.const(1) / a[row_i][col]
        a[row_i] = [x * inv for x in a[row_i]]
        b[row_i] = b[row_i] * inv
        for r in range(m):
            if r != row_i and not a[r][col].is_zero:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[row_i])]
                b[r] = b[r] - factor * b[row_i]
        pivots.append((row_i, col))
        row_i += 1
        if row_i == m:
            break

    rank = len(pivots)
    consistent = all(b[r].is_zero for r in range(rank, m))
    pivot_cols = {col for _, col in pivots}
    free_cols = [c for c in range(n) if c not in pivot_cols]

    particular = None
    if consistent:
        sol = [RatFun.const(0)] * n
        for r, col in pivots:
            sol[col] = -b[r]
        particular = tuple(sol)

    kernel = []
    for fc in free_cols:
        vec = [RatFun.const(0)] * n
        vec[fc] = RatFun.const(1)
        for r, col in pivots:
            vec[col] = -a[r][fc]
        kernel.append(tuple(vec))

    return AffineSpace(n, rank, consistent, particular, tuple(kernel))
