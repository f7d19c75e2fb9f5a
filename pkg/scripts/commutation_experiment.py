#!/usr/bin/env python3
"""Sweep random two-derivation configurations and tabulate commutation.

Proportional pairs x[d1] = q(x[0]), x[d2] = c*q(x[0]) should always pass the
local check and the global re-verification; independently drawn pairs should
fail at d1 d2 with a confirmed point witness most of the time.

    python3 scripts/commutation_experiment.py --count 25 --degree 5 --seed 7
"""

import argparse
import random
import time
from fractions import Fraction

from diffalg.algebra import JetVar, Poly
from diffalg.config import Configuration
from diffalg.monoid import MonoidElem


def theta(*exps):
    return MonoidElem.exponents(exps)


def rand_q(rng, max_degree=3):
    x0 = JetVar("x", theta(0, 0))
    p = Poly.zero()
    for d in range(max_degree + 1):
        if rng.random() < 0.55:
            p = p + Poly.const(rng.randint(-4, 4)) * Poly.variable(x0) ** d
    if p.is_zero:
        p = Poly.variable(x0)
    return p


def pair_config(q1, q2):
    return Configuration(
        2,
        [theta(1, 0), theta(0, 1)],
        {
            theta(1, 0): Poly.variable(JetVar("x", theta(1, 0))) - q1,
            theta(0, 1): Poly.variable(JetVar("x", theta(0, 1))) - q2,
        },
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=25, help="configurations per family")
    parser.add_argument("--degree", type=int, default=5, help="global verification degree")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    x0 = JetVar("x", theta(0, 0))

    print(f"{'family':<14} {'local':>6} {'global':>7} {'confirmed':>10} {'time/s':>8}")

    started = time.monotonic()
    local_ok = global_ok = 0
    for _ in range(args.count):
        q = rand_q(rng)
        scale = Fraction(rng.randint(1, 5))
        cfg = pair_config(q, Poly.const(scale) * q)
        if cfg.check_local(random.Random(rng.randrange(2 ** 30))).commutes:
            local_ok += 1
            if cfg.verify_global(args.degree, random.Random(rng.randrange(2 ** 30))).commutes:
                global_ok += 1
    elapsed = time.monotonic() - started
    print(f"{'proportional':<14} {local_ok:>3}/{args.count:<3} {global_ok:>4}/{local_ok:<3} {'-':>10} {elapsed:>8.2f}")

    started = time.monotonic()
    failed = confirmed = 0
    for _ in range(args.count):
        while True:
            q1, q2 = rand_q(rng), rand_q(rng)
            if not (q1.partial(x0) * q2 - q2.partial(x0) * q1).is_zero:
                break
        cfg = pair_config(q1, q2)
        report = cfg.check_local(random.Random(rng.randrange(2 ** 30)))
        if not report.commutes:
            failed += 1
            if report.first_violation().status == "violation":
                confirmed += 1
    elapsed = time.monotonic() - started
    print(f"{'independent':<14} {args.count - failed:>3}/{args.count:<3} {'-':>7} {confirmed:>4}/{failed:<4} {elapsed:>8.2f}")


if __name__ == "__main__":
    main()
