"""Commuting-derivation configurations over exponent-tuple jets.

A configuration prescribes, for each minimal leader pi in an anti-chain of
exponent tuples, a polynomial relation p_pi tying the jet variable x_pi to
strictly smaller free jet variables.  On the locus where every p_pi
vanishes with nonzero separant, the relations force a value for every
higher derivative: the rational functions f computed here say which.

For a single derivation symbol d and a leader pi:

    f_{d,pi} = - (p_pi with coefficients derived
                  + sum over free mu of (dp_pi/dx_mu) * f at d.mu)
               / (dp_pi / dx_pi),

and longer words w extend this through the derivation R_d acting on
rational functions of the jet variables.  A configuration commutes at a
tuple alpha when all its word/leader factorizations produce functions that
agree on the locus; agreement is decided by clearing denominators and
pseudo-reducing against the relations, and disagreement is confirmed, when
possible, by exhibiting a rational point of the locus where the two
functions differ.

Denominators of the computed functions are built only from separants and
initials of the relations, so they are nonzero almost everywhere on the
locus.
"""

from __future__ import annotations

import itertools
import json
import random
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from .algebra import JetVar, Poly, RatFun, _to_ratfun, pseudo_remainder
from .derivation import DerSpec, coeff_derivative
from .errors import ConfigurationError, PoleError, SeparantZeroError
from .jet import DiffModel
from .monoid import COMMUTATIVE, FREE, MonoidElem, antichain_minimal, theta_ball

Value = Union[Poly, RatFun]


@dataclass(frozen=True)
class GFun:
    """A computed jet function together with the factorization it came from."""

    value: RatFun
    witness: Union[tuple[MonoidElem, MonoidElem], str]

    def __str__(self):
        if isinstance(self.witness, str):
            return f"{self.value}  ({self.witness})"
        word, leader = self.witness
        return f"{self.value}  (word {word}, leader {leader})"


@dataclass(frozen=True)
class Witness:
    word1: MonoidElem
    leader1: MonoidElem
    word2: MonoidElem
    leader2: MonoidElem

    def to_dict(self):
        return {
            "word1": str(self.word1),
            "leader1": str(self.leader1),
            "word2": str(self.word2),
            "leader2": str(self.leader2),
        }


@dataclass(frozen=True)
class CommutationCheck:
    alpha: MonoidElem
    status: str  # "commutes" | "violation" | "violation-unconfirmed"
    trivial: bool = False
    witness: Optional[Witness] = None
    reduced_difference: Optional[Poly] = None
    point: Optional[dict] = None

    @property
    def commutes(self) -> bool:
        return self.status == "commutes"

    def to_dict(self):
        out = {"alpha": str(self.alpha), "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.reduced_difference is not None:
            out["reduced_difference"] = str(self.reduced_difference)
        if self.point is not None:
            out["point"] = {str(k): str(v) for k, v in sorted(self.point.items(), key=lambda kv: str(kv[0]))}
        return out


@dataclass(frozen=True)
class CommutationReport:
    kind: str  # "local" | "global"
    checks: tuple[CommutationCheck, ...]

    @property
    def commutes(self) -> bool:
        return all(c.commutes for c in self.checks)

    def first_violation(self) -> Optional[CommutationCheck]:
        for c in self.checks:
            if not c.commutes:
                return c
        return None

    def to_dict(self):
        return {
            "kind": self.kind,
            "commutes": self.commutes,
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


@dataclass(frozen=True)
class RealizeReport:
    ok: bool
    depth: int
    checked: int
    mismatch: Optional[MonoidElem] = None
    expected: Optional[str] = None
    got: Optional[str] = None

    def to_dict(self):
        out = {"ok": self.ok, "depth": self.depth, "checked": self.checked}
        if self.mismatch is not None:
            out["mismatch"] = str(self.mismatch)
            out["expected"] = self.expected
            out["got"] = self.got
        return out


class Configuration:
    """Anti-chain of minimal leaders with one defining relation per leader."""

    def __init__(
        self,
        k: int,
        leaders: Sequence[MonoidElem],
        relations: Mapping[MonoidElem, Poly],
        etas: Optional[Sequence[Mapping[JetVar, Value]]] = None,
        base: str = "x",
    ):
        self.k = k
        self.base = base
        self.leaders = tuple(sorted(leaders, key=lambda e: e.sort_key))
        self.relations = dict(relations)
        if etas is None:
            etas = [{} for _ in range(k)]
        if len(etas) != k:
            raise ConfigurationError(f"need {k} coefficient tables, got {len(etas)}")
        self.etas = tuple(dict(t) for t in etas)
        self._validate()

        params = set()
        for p in self.relations.values():
            params |= {v for v in p.variables() if v.index is None}
        for table in self.etas:
            params |= set(table)
            for value in table.values():
                params |= _to_ratfun(value).variables()
        self.params = tuple(sorted(params, key=lambda v: v.sort_key))
        self.derspecs = tuple(
            DerSpec(f"d{i + 1}", {p: table.get(p, Poly.zero()) for p in self.params}, {})
            for i, table in enumerate(self.etas)
        )

        self._lock = threading.RLock()
        self._word_cache: dict[tuple[tuple[int, ...], MonoidElem], RatFun] = {}
        self._theta_cache: dict[MonoidElem, RatFun] = {}

    # ------------------------------------------------------------------

    def _validate(self):
        for pi in self.leaders:
            if pi.kind != COMMUTATIVE or pi.k != self.k:
                raise ConfigurationError(f"leader {pi} is not an exponent tuple over k={self.k}")
            if pi.is_identity:
                raise ConfigurationError("the identity cannot be a leader")
        if len(set(self.leaders)) != len(self.leaders):
            raise ConfigurationError("duplicate leaders")
        if frozenset(self.leaders) != antichain_minimal(self.leaders):
            raise ConfigurationError("leaders do not form an anti-chain")
        if set(self.relations) != set(self.leaders):
            raise ConfigurationError("relations must be given exactly for the leaders")
        for pi, p in self.relations.items():
            xpi = self.jet_var(pi)
            if not p.depends_on(xpi):
                raise ConfigurationError(f"relation for {pi} does not involve {xpi}")
            for v in p.variables():
                if v.index is None:
                    continue
                if v.base != self.base:
                    raise ConfigurationError(f"foreign jet variable {v} in relation for {pi}")
                mu = v.index
                if mu == pi:
                    continue
                if not self.is_free(mu):
                    raise ConfigurationError(
                        f"relation for {pi} mentions leader variable {v}"
                    )
                if not mu < pi:
                    raise ConfigurationError(
                        f"relation for {pi} mentions {v}, which is not below {pi}"
                    )

    # ------------------------------------------------------------------

    def jet_var(self, mu: MonoidElem) -> JetVar:
        return JetVar(self.base, mu)

    def is_free(self, mu: MonoidElem) -> bool:
        return not any(pi.preceq(mu) for pi in self.leaders)

    @property
    def theta(self) -> MonoidElem:
        out = MonoidElem.identity(COMMUTATIVE, self.k)
        for pi in self.leaders:
            out = out.lub(pi)
        return out

    def separant(self, pi: MonoidElem) -> Poly:
        return self.relations[pi].partial(self.jet_var(pi))

    # ------------------------------------------------------------------
    # the recursion for f

    def f_at(self, alpha: MonoidElem) -> GFun:
        """The canonical function for an exponent tuple.

        Free tuples and leaders are plain variables; for composite leaders
        the representative uses the least leader dividing alpha and the
        word of the quotient with non-increasing generator indices.
        """
        value, witness = self._f_theta(alpha)
        return GFun(value, witness)

    def compute_f(self, word: MonoidElem, pi: MonoidElem) -> GFun:
        if word.kind != FREE or word.k != self.k:
            raise ConfigurationError(f"{word} is not a word over k={self.k} generators")
        if pi not in self.relations:
            raise ConfigurationError(f"{pi} is not a leader")
        return GFun(self._f_word(word.data, pi), (word, pi))

    def _f_theta(self, alpha: MonoidElem):
        if self.is_free(alpha):
            return RatFun.variable(self.jet_var(alpha)), "free variable"
        if alpha in self.relations:
            return RatFun.variable(self.jet_var(alpha)), (MonoidElem.identity(FREE, self.k), alpha)
        pi = min((p for p in self.leaders if p.preceq(alpha)), key=lambda p: p.sort_key)
        word = alpha.minus(pi).canonical_word()
        with self._lock:
            if alpha not in self._theta_cache:
                self._theta_cache[alpha] = self._f_word(word.data, pi)
            value = self._theta_cache[alpha]
        return value, (word, pi)

    def _f_word(self, letters: tuple[int, ...], pi: MonoidElem) -> RatFun:
        with self._lock:
            key = (letters, pi)
            if key in self._word_cache:
                return self._word_cache[key]
            if not letters:
                value = RatFun.variable(self.jet_var(pi))
            elif len(letters) == 1:
                value = self._single_letter(letters[0], pi)
            else:
                inner = self._f_word(letters[1:], pi)
                value = self._r_apply(letters[0], inner)
            self._word_cache[key] = value
            return value

    def _single_letter(self, i: int, pi: MonoidElem) -> RatFun:
        p = self.relations[pi]
        sep = self.separant(pi)
        if sep.is_zero:
            raise SeparantZeroError(f"relation for {pi} has vanishing separant")
        gen = MonoidElem.generator(COMMUTATIVE, self.k, i)
        num = _to_ratfun(coeff_derivative(p, self.derspecs[i - 1].eta))
        for v in sorted(p.variables(), key=lambda v: v.sort_key):
            if v.index is None or v.index == pi:
                continue
            shifted, _ = self._f_theta(gen.compose(v.index))
            num = num + p.partial(v) * shifted
        return -num / _to_ratfun(sep)

    def _f_delta_mu(self, i: int, mu: MonoidElem) -> RatFun:
        if mu in self.relations:
            return self._f_word((i,), mu)
        gen = MonoidElem.generator(COMMUTATIVE, self.k, i)
        value, _ = self._f_theta(gen.compose(mu))
        return value

    def _r_apply(self, i: int, h: RatFun) -> RatFun:
        out = _to_ratfun(coeff_derivative(h, self.derspecs[i - 1].eta))
        for v in sorted(h.variables(), key=lambda v: v.sort_key):
            if v.index is None:
                continue
            out = out + h.partial(v) * self._f_delta_mu(i, v.index)
        return out

    def r_apply(self, i: int, h: Value) -> RatFun:
        """The derivation extending d_i that sends each x_mu to f at d_i.mu."""
        if not 1 <= i <= self.k:
            raise ConfigurationError(f"no derivation d{i} with k={self.k}")
        return self._r_apply(i, _to_ratfun(h))

    def r_apply_word(self, word: MonoidElem, h: Value) -> RatFun:
        out = _to_ratfun(h)
        for letter in reversed(word.data):
            out = self._r_apply(letter, out)
        return out

    # ------------------------------------------------------------------
    # equality on the locus

    def reduce_mod(self, p: Poly) -> Poly:
        """Pseudo-reduce by every relation, highest leader first."""
        for pi in sorted(self.leaders, key=lambda e: e.sort_key, reverse=True):
            xpi = self.jet_var(pi)
            if p.deg_in(xpi) >= self.relations[pi].deg_in(xpi):
                p, _, _ = pseudo_remainder(p, self.relations[pi], xpi)
        return p

    def factorizations(self, alpha: MonoidElem) -> list[tuple[MonoidElem, MonoidElem]]:
        """All (word, leader) pairs whose composite is alpha, deterministically ordered."""
        out = []
        for pi in self.leaders:
            if not pi.preceq(alpha):
                continue
            rest = alpha.minus(pi)
            seen = set()
            for perm in itertools.permutations(rest.canonical_word().data):
                if perm in seen:
                    continue
                seen.add(perm)
                out.append((MonoidElem.word(self.k, perm), pi))
        out.sort(key=lambda wp: (wp[1].sort_key, wp[0].sort_key))
        return out

    def check_commutation_at(
        self,
        alpha: MonoidElem,
        rng: Optional[random.Random] = None,
        retries: int = 40,
    ) -> CommutationCheck:
        """Decide whether all factorizations of alpha agree on the locus."""
        if self.is_free(alpha):
            return CommutationCheck(alpha, "commutes", trivial=True)
        reps = self.factorizations(alpha)
        if len(reps) <= 1:
            return CommutationCheck(alpha, "commutes", trivial=True)
        base_word, base_pi = reps[0]
        base_value = self._f_word(base_word.data, base_pi)
        for word, pi in reps[1:]:
            value = self._f_word(word.data, pi)
            diff = value - base_value
            reduced = self.reduce_mod(diff.num)
            if reduced.is_zero:
                continue
            witness = Witness(word, pi, base_word, base_pi)
            point = self._confirm_witness(value, base_value, rng or random.Random(0), retries)
            status = "violation" if point is not None else "violation-unconfirmed"
            return CommutationCheck(
                alpha,
                status,
                witness=witness,
                reduced_difference=reduced,
                point=point,
            )
        return CommutationCheck(alpha, "commutes")

    def _confirm_witness(self, f1: RatFun, f2: RatFun, rng: random.Random, retries: int):
        needed = f1.variables() | f2.variables()
        for p in self.relations.values():
            needed |= p.variables()
        for _ in range(retries):
            point = self.sample_point(rng, needed)
            if point is None:
                continue
            try:
                v1 = f1.evaluate({v: point[v] for v in f1.variables()})
                v2 = f2.evaluate({v: point[v] for v in f2.variables()})
            except PoleError:
                continue
            if v1 != v2:
                return point
        return None

    def sample_point(self, rng: random.Random, needed: set[JetVar]):
        """A rational point of the locus: random free values, solved leaders.

        Returns None when some relation has no rational root with nonzero
        separant at the drawn free values.
        """
        point: dict[JetVar, Fraction] = {}
        for v in sorted(needed, key=lambda v: v.sort_key):
            if v.index is None or (self.is_free(v.index)):
                point[v] = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
        for pi in sorted(self.leaders, key=lambda e: e.sort_key):
            p = self.relations[pi]
            xpi = self.jet_var(pi)
            lower = {v: point[v] for v in p.variables() if v != xpi and v in point}
            missing = {v for v in p.variables() if v != xpi and v not in point}
            for v in missing:
                point[v] = Fraction(rng.randint(-6, 6), rng.randint(1, 3))
                lower[v] = point[v]
            univ = p.substitute(lower)
            root = _rational_root(_to_ratfun(univ).to_poly(), xpi)
            if root is None:
                return None
            sep_val = self.separant(pi).substitute({**lower, xpi: root})
            if _to_ratfun(sep_val).is_zero:
                return None
            point[xpi] = root
        return point

    # ------------------------------------------------------------------
    # local and global checks

    def local_alphas(self) -> list[MonoidElem]:
        theta = self.theta
        return [a for a in theta_ball(self.k, theta.degree) if a <= theta]

    def check_local(self, rng: Optional[random.Random] = None, jobs: int = 1) -> CommutationReport:
        return self._run_checks("local", self.local_alphas(), rng, jobs)

    def verify_global(
        self,
        degree_bound: int,
        rng: Optional[random.Random] = None,
        jobs: int = 1,
    ) -> CommutationReport:
        return self._run_checks("global", theta_ball(self.k, degree_bound), rng, jobs)

    def _run_checks(self, kind, alphas, rng, jobs) -> CommutationReport:
        seed = rng.randrange(2 ** 31) if rng is not None else 2025
        tasks = [(alpha, random.Random(seed + 7919 * i)) for i, alpha in enumerate(alphas)]
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                checks = list(pool.map(lambda t: self.check_commutation_at(t[0], t[1]), tasks))
        else:
            checks = [self.check_commutation_at(alpha, r) for alpha, r in tasks]
        return CommutationReport(kind, tuple(checks))

    # ------------------------------------------------------------------
    # realization against a concrete model

    def realize_check(self, model: DiffModel, b: Value, depth: int) -> RealizeReport:
        """Compare literal iterated derivatives of b with the functions here.

        The model must interpret the configuration's parameters and extend
        the coefficient tables; b's jets up to the leaders must satisfy
        every relation with nonzero separant.
        """
        b = _to_ratfun(b)
        model_vars = set(model.variables())
        for p in self.params:
            if p not in model_vars:
                raise ConfigurationError(f"model does not interpret parameter {p}")
            for i in range(1, self.k + 1):
                table = self.derspecs[i - 1].eta
                expected = _to_ratfun(table[p])
                if not model.equal(model.apply(i, RatFun.variable(p)), expected):
                    raise ConfigurationError(
                        f"model derivation d{i} disagrees with the coefficient table on {p}"
                    )

        def literal(mu: MonoidElem) -> RatFun:
            return model.apply_word(mu.canonical_word(), b)

        def binding_for(value: RatFun) -> dict:
            out = {}
            for v in value.variables():
                if v.index is None:
                    out[v] = RatFun.variable(v)
                else:
                    out[v] = literal(v.index)
            return out

        for pi in self.leaders:
            p = self.relations[pi]
            rel_val = p.evaluate(binding_for(_to_ratfun(p)))
            if not model.is_zero(rel_val):
                raise ConfigurationError(f"b violates the relation for {pi}")
            sep_val = self.separant(pi).evaluate(binding_for(_to_ratfun(self.separant(pi))))
            if model.is_zero(sep_val):
                raise ConfigurationError(f"separant for {pi} vanishes at b")

        checked = 0
        for mu in theta_ball(self.k, depth):
            g, _ = self._f_theta(mu)
            expected = g.evaluate(binding_for(g))
            got = literal(mu)
            checked += 1
            if not model.equal(expected, got):
                return RealizeReport(
                    False,
                    depth,
                    checked,
                    mismatch=mu,
                    expected=str(model.reduce(expected)),
                    got=str(model.reduce(got)),
                )
        return RealizeReport(True, depth, checked)


def _rational_root(p: Poly, main: JetVar) -> Optional[Fraction]:
    """A rational root of a univariate polynomial, or None."""
    coeffs_by_deg = {e: c.constant_value() for e, c in p.as_univariate(main).items()}
    degree = max(coeffs_by_deg, default=0)
    if degree == 0:
        return None
    if degree == 1:
        return -coeffs_by_deg.get(0, Fraction(0)) / coeffs_by_deg[1]
    # clear denominators, then try divisor-quotient candidates
    denom_lcm = 1
    for c in coeffs_by_deg.values():
        denom_lcm = denom_lcm * c.denominator // _gcd(denom_lcm, c.denominator)
    ints = {e: int(c * denom_lcm) for e, c in coeffs_by_deg.items()}
    a0 = ints.get(0, 0)
    an = ints[degree]
    if a0 == 0:
        return Fraction(0)
    if abs(a0) > 10 ** 9 or abs(an) > 10 ** 9:
        return None

    def divisors(n):
        n = abs(n)
        out = []
        d = 1
        while d * d <= n:
            if n % d == 0:
                out.append(d)
                out.append(n // d)
            d += 1
        return sorted(set(out))

    for num in divisors(a0):
        for den in divisors(an):
            for sign in (1, -1):
                cand = Fraction(sign * num, den)
                if sum(c * cand ** e for e, c in ints.items()) == 0:
                    return cand
    return None


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a
