"""Shared random generators for the test suite.

Everything takes an explicit `random.Random` so failures are reproducible
from the seed printed by the test.
"""

from __future__ import annotations

import random
from fractions import Fraction

from diffalg.algebra import JetVar, Monomial, Poly, RatFun
from diffalg.monoid import COMMUTATIVE, FREE, MonoidElem


def rand_fraction(rng: random.Random, span: int = 5) -> Fraction:
    num = rng.randint(-span, span)
    den = rng.randint(1, 3)
    return Fraction(num, den)


def rand_monoid_elem(rng: random.Random, kind: str, k: int, max_degree: int = 4) -> MonoidElem:
    if kind == FREE:
        n = rng.randint(0, max_degree)
        return MonoidElem.word(k, tuple(rng.randint(1, k) for _ in range(n)))
    exps = [0] * k
    for _ in range(rng.randint(0, max_degree)):
        exps[rng.randrange(k)] += 1
    return MonoidElem.exponents(exps)


def rand_poly(
    rng: random.Random,
    variables: list[JetVar],
    max_terms: int = 4,
    max_degree: int = 4,
    span: int = 5,
) -> Poly:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        powers = {}
        budget = rng.randint(0, max_degree)
        for _ in range(budget):
            v = rng.choice(variables)
            powers[v] = powers.get(v, 0) + 1
        c = rand_fraction(rng, span)
        if c == 0:
            c = Fraction(1)
        m = Monomial.make(powers)
        terms[m] = terms.get(m, Fraction(0)) + c
    return Poly(terms)


def rand_nonzero_poly(rng: random.Random, variables: list[JetVar], **kw) -> Poly:
    while True:
        p = rand_poly(rng, variables, **kw)
        if not p.is_zero:
            return p


def rand_ratfun(rng: random.Random, variables: list[JetVar], **kw) -> RatFun:
    num = rand_poly(rng, variables, **kw)
    den = rand_nonzero_poly(rng, variables, **kw)
    return RatFun(num, den)
