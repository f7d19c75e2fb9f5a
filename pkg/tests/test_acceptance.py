"""Acceptance suite: one test per criterion, exact checks throughout.

Every assertion is exact (Fraction arithmetic); there are no numeric
tolerances to tune.  Each criterion prints a PASS/FAIL line; run with
`pytest tests/test_acceptance.py -v -s` to see them.
"""

import itertools
import json
import os
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from conftest import rand_poly
from diffalg.algebra import JetVar, Poly, RatFun, var
from diffalg.axioms import DefinableSetDesc, wide_from_deep
from diffalg.cli import main as cli_main
from diffalg.config import Configuration
from diffalg.derivation import (
    DerSpec,
    Tower,
    apply_derivation,
    extend_to_algebraic,
    implicit_delta,
    partner_var,
    twisted_lift,
)
from diffalg.errors import EngineError, ParseError
from diffalg.jet import DiffModel, JetAtom, jet_binding, oracle_eval, rewrite_term, term_str
from diffalg.monoid import COMMUTATIVE, FREE, MonoidElem
from diffalg.parsing import (
    parse_config,
    parse_definable_json,
    parse_derspec,
    parse_poly,
    parse_ratfun,
    parse_term,
    parse_triangular,
    parse_variety,
)
from diffalg.prolong import VarietyPresentation, extend_at_point, reg_rank_at, tangent_space_at

from test_jet import rand_term

CORPUS = os.path.join(os.path.dirname(__file__), "..", "corpus")

X, Y, Z, W, T, C, U, A = (JetVar(n) for n in ("x", "y", "z", "w", "t", "c", "u", "a"))
x, y, z, w, t, c, u, a = (var(n) for n in ("x", "y", "z", "w", "t", "c", "u", "a"))


@contextmanager
def criterion(number: int, name: str):
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {number} ({name}): FAIL")
        raise
    print(f"[acceptance] criterion {number} ({name}): PASS")


def theta(*exps):
    return MonoidElem.exponents(exps)


def xj(*exps):
    return Poly.variable(JetVar("x", theta(*exps)))


def test_criterion_1_derivation_laws():
    with criterion(1, "derivation laws"):
        rng = random.Random(10001)
        vars_ = [X, Y, Z, W]
        started = time.monotonic()
        for _ in range(1000):
            nv = rng.randint(1, 4)
            active = vars_[:nv]
            p = rand_poly(rng, active, max_terms=4, max_degree=4)
            q = rand_poly(rng, active, max_terms=4, max_degree=4)
            eta = {T: rand_poly(rng, [T], max_terms=2, max_degree=2)}
            images = {v: rand_poly(rng, active + [T], max_terms=2, max_degree=2) for v in active}
            spec = DerSpec(eta=eta, images=images)

            dp = apply_derivation(p, spec)
            dq = apply_derivation(q, spec)
            assert apply_derivation(p * q, spec) == dp * q + p * dq
            assert apply_derivation(p + q, spec) == dp + dq

            lift, _ = twisted_lift(p, spec)
            binding = {v: Poly.variable(v) for v in lift.variables()}
            for v in active:
                binding[partner_var(v)] = images[v]
            assert lift.substitute(binding) == dp
        elapsed = time.monotonic() - started
        assert elapsed < 60, f"took {elapsed:.1f}s"


def test_criterion_2_algebraic_extension_consistency():
    with criterion(2, "algebraic extension consistency"):
        rng = random.Random(10002)
        for trial in range(100):
            degree = 2 if trial % 2 == 0 else 3
            shift = rand_poly(rng, [T], max_terms=2, max_degree=2)
            h = rand_poly(rng, [T], max_terms=3, max_degree=4)
            # a fresh top term of t-degree not divisible by the root degree
            # keeps the defining polynomial irreducible over Q(t)
            target = h.deg_in(T) + 1
            while target % degree == 0:
                target += 1
            h = h + t ** target
            minpoly = (c + shift) ** degree - h

            base = Tower([T], {T: Poly.const(1)})
            tower = extend_to_algebraic(base, minpoly, C)
            stage = tower.stages[0]

            value = apply_derivation(RatFun(minpoly), tower.derspec())
            assert tower.is_zero(value)

            forced = implicit_delta(minpoly, C, base.derspec())
            assert tower.equal(forced, stage.dvalue)

            elem = RatFun(c + t)
            prod = tower.apply(elem * elem)
            assert tower.equal(prod, 2 * elem * tower.apply(elem))


def test_criterion_3_jet_oracle_equivalence():
    with criterion(3, "jet oracle equivalence"):
        model = DiffModel.on_parameters([T], [{T: Poly.const(1)}, {T: Poly.const(2)}])
        sigma = {"x": RatFun(t * t), "y": RatFun(t + 1, t), "t": RatFun(t)}
        rng = random.Random(10003)
        failures = 0
        for _ in range(500):
            term = rand_term(rng, depth=5)
            jetpoly = rewrite_term(term, COMMUTATIVE, k=2)
            binding = jet_binding(model, sigma, sorted(jetpoly.variables(), key=lambda v: v.sort_key))
            via_jets = jetpoly.evaluate(binding)
            direct = oracle_eval(term, model, sigma, mode=COMMUTATIVE)
            if not model.equal(via_jets, direct):
                failures += 1
        assert failures == 0


def _pair_config(q1: Poly, q2: Poly) -> Configuration:
    return Configuration(
        2,
        [theta(1, 0), theta(0, 1)],
        {theta(1, 0): xj(1, 0) - q1, theta(0, 1): xj(0, 1) - q2},
    )


def test_criterion_4_configuration_calculus():
    with criterion(4, "configuration calculus"):
        rng = random.Random(10004)
        x0 = JetVar("x", theta(0, 0))

        for _ in range(50):
            q = rand_poly(rng, [x0], max_terms=3, max_degree=3)
            scale = Fraction(rng.randint(1, 6), rng.randint(1, 3))
            cfg = _pair_config(q, Poly.const(scale) * q)
            assert cfg.check_local(random.Random(rng.randrange(2 ** 30))).commutes
            glob = cfg.verify_global(6, random.Random(rng.randrange(2 ** 30)))
            assert glob.commutes

        confirmed = 0
        flagged = 0
        for _ in range(50):
            while True:
                q1 = rand_poly(rng, [x0], max_terms=3, max_degree=3)
                q2 = rand_poly(rng, [x0], max_terms=3, max_degree=3)
                wronskian = q1.partial(x0) * q2 - q2.partial(x0) * q1
                if not wronskian.is_zero:
                    break
            cfg = _pair_config(q1, q2)
            report = cfg.check_local(random.Random(rng.randrange(2 ** 30)))
            assert not report.commutes
            bad = report.first_violation()
            assert bad.alpha == theta(1, 1)
            if bad.status == "violation":
                confirmed += 1
            else:
                assert bad.status == "violation-unconfirmed"
                flagged += 1
        assert confirmed >= 45, f"only {confirmed} confirmed witnesses"
        assert confirmed + flagged == 50


def test_criterion_5_iteration_identity():
    with criterion(5, "iteration identity"):
        rng = random.Random(10005)
        x0 = JetVar("x", theta(0, 0))
        words = [MonoidElem.word(2, ls) for n in range(4) for ls in itertools.product((1, 2), repeat=n)]
        small_words = [w for w in words if w.degree <= 2]

        for trial in range(20):
            q1 = rand_poly(rng, [x0], max_terms=2, max_degree=2)
            q2 = rand_poly(rng, [x0], max_terms=2, max_degree=2)
            if trial % 4 == 0:
                # a quadratic leader relation brings real denominators in
                relations = {
                    theta(1, 0): xj(1, 0) ** 2 - q1 * q1 - 1,
                    theta(0, 1): xj(0, 1) - q2,
                }
                cfg = Configuration(2, [theta(1, 0), theta(0, 1)], relations)
            else:
                cfg = _pair_config(q1, q2)
            for w_elem in rng.sample(words, 6):
                for v_elem in rng.sample(small_words, 3):
                    for pi in cfg.leaders:
                        lhs = cfg.r_apply_word(w_elem, cfg.compute_f(v_elem, pi).value)
                        rhs = cfg.compute_f(w_elem.compose(v_elem), pi).value
                        diff = lhs - rhs
                        assert cfg.reduce_mod(diff.num).is_zero


def test_criterion_6_realization_oracle():
    with criterion(6, "realization oracle"):
        # main instance: scaling flows to depth 5
        model = DiffModel.on_parameters([U], [{U: u}, {U: 2 * u}])
        cfg = _pair_config(xj(0, 0), 2 * xj(0, 0))
        assert cfg.realize_check(model, RatFun(u), depth=5).ok

        # constant flows: b = t with dx = 1, dx = 3
        model_b = DiffModel.on_parameters([T], [{T: Poly.const(1)}, {T: Poly.const(3)}])
        cfg_b = _pair_config(Poly.const(1), Poly.const(3))
        assert cfg_b.realize_check(model_b, RatFun(t), depth=4).ok

        # scaling flow on b = u^2: derivatives are 2x and 6x
        model_c = DiffModel.on_parameters([U], [{U: u}, {U: 3 * u}])
        cfg_c = _pair_config(2 * xj(0, 0), 6 * xj(0, 0))
        assert cfg_c.realize_check(model_c, RatFun(u * u), depth=4).ok

        # quadratic flow: d1 = u^2 d/du realizes x' = x^2
        model_d = DiffModel.on_parameters([U], [{U: u * u}, {U: 2 * u * u}])
        cfg_d = _pair_config(xj(0, 0) ** 2, 2 * xj(0, 0) ** 2)
        assert cfg_d.realize_check(model_d, RatFun(u), depth=4).ok


def test_criterion_7_prolongation():
    with criterion(7, "prolongation"):
        circle = VarietyPresentation((X, Y), (x * x + y * y - 1,))
        cusp = VarietyPresentation((X, Y), (y * y - x ** 3,))

        assert tangent_space_at(circle, DerSpec(), (RatFun.const(1), RatFun.const(0))).dimension == 1
        assert reg_rank_at(cusp, (RatFun.const(1), RatFun.const(1)), d=1).in_reg
        assert reg_rank_at(cusp, (RatFun.const(0), RatFun.const(0))).dimension == 2

        # the twisted fiber of x^2 = c reproduces the forced derivative 1/(2a)
        parabola = VarietyPresentation((X,), (x * x - c,))
        spec = DerSpec(eta={C: Poly.const(1)})
        tower = Tower([C], {C: Poly.const(1)}).extend(a * a - c, A)
        space = tangent_space_at(parabola, spec, (RatFun.variable(A),), tower=tower)
        (sol,) = space.particular
        assert sol == RatFun(Poly.const(1), 2 * a)
        assert tower.equal(sol, tower.stages[0].dvalue)

        rng = random.Random(10007)
        for _ in range(50):
            n = rng.randint(2, 4)
            trans = [JetVar(f"t{i}") for i in range(1, n)]
            coords = trans + [C]
            ambient = [JetVar(f"x{i}") for i in range(1, n + 1)]
            h = rand_poly(rng, trans, max_terms=3, max_degree=2)
            tdeg = h.deg_in(trans[0])
            if tdeg % 2 == 0:
                h = h + Poly.variable(trans[0]) ** (tdeg + 1)
            minpoly = c * c - h
            tower = Tower(trans, {}).extend(minpoly, C)

            to_coords = {JetVar(f"x{i}"): Poly.variable(coords[i - 1]) for i in range(1, n + 1)}
            gen_poly = minpoly.substitute({C: Poly.variable(ambient[-1])}).substitute(
                {trans[i - 1]: Poly.variable(ambient[i - 1]) for i in range(1, n)}
            )
            variety = VarietyPresentation(tuple(ambient), (gen_poly,))

            tangent = [RatFun.const(rng.randint(-3, 3)) for _ in range(n - 1)]
            forced = Poly.zero()
            for i in range(1, n):
                forced = forced + gen_poly.partial(ambient[i - 1]).substitute(to_coords) * tangent[i - 1].num
            last = RatFun(-forced, 2 * c)
            spec = extend_at_point(variety, DerSpec(), tower, tuple(coords), tuple(tangent) + (last,))
            for g in variety.gens:
                assert tower.is_zero(apply_derivation(RatFun(g.substitute(to_coords)), spec))


def test_criterion_8_axiom_transforms():
    with criterion(8, "axiom transforms"):
        rng = random.Random(10008)
        z_vars = (JetVar("z1"), JetVar("z2"), JetVar("z3"))
        values = [Fraction(v) for v in (-2, -1, 0, 1, 2)]
        for _ in range(20):
            atoms = []
            for _ in range(rng.randint(1, 2)):
                p = rand_poly(rng, list(z_vars), max_terms=3, max_degree=2)
                atoms.append(JetAtom(p, rng.choice(["=", "!="])))
            deep = DefinableSetDesc(z_vars, tuple(atoms), z_vars[:2])
            result = wide_from_deep(deep, 2)
            wide = result.wide
            for point in itertools.product(values, repeat=3):
                deep_point = dict(zip(deep.indices, point))
                wide_point = dict(zip(result.x_vars, point[:2]))
                for y_var, x_next in result.jet_recovery:
                    wide_point[y_var] = wide_point[x_next]
                wide_point[result.y_vars[-1]] = point[2]
                assert wide.contains(wide_point) == deep.contains(deep_point)


def _cli(capsys, *argv):
    code = cli_main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_criterion_9_cli_contract(capsys, tmp_path):
    with criterion(9, "cli contract"):
        corpus_files = sorted(os.listdir(CORPUS))
        assert len(corpus_files) >= 10

        # parse/print round trips over the whole corpus
        for name in corpus_files:
            path = os.path.join(CORPUS, name)
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
            if name.endswith(".cfg"):
                cfg = parse_config(text)
                for p in cfg.relations.values():
                    assert str(parse_poly(str(p), COMMUTATIVE, cfg.k)) == str(p)
            elif name.endswith(".variety"):
                data = parse_variety(text)
                for p in data.gens:
                    assert str(parse_poly(str(p))) == str(p)
                if data.point:
                    for coord in data.point:
                        assert str(parse_ratfun(str(coord))) == str(coord)
            elif name.endswith(".zjson"):
                desc = parse_definable_json(text)
                again = parse_definable_json(json.dumps(desc.to_dict()))
                assert again.to_dict() == desc.to_dict()
            elif name.endswith(".term"):
                term = parse_term(text)
                assert term_str(parse_term(term_str(term))) == term_str(term)
            elif name.endswith(".tri"):
                system = parse_triangular(text)
                for _, p in system.equations:
                    assert str(parse_poly(str(p))) == str(p)
            elif name.endswith(".txt"):
                spec = parse_derspec(text)
                again = parse_derspec(str(spec))
                assert str(again) == str(spec)

        # byte determinism across invocations
        for argv in (
            ["config-check", os.path.join(CORPUS, "noncomm.cfg"), "--global-degree", "4", "--json"],
            ["config-check", os.path.join(CORPUS, "commuting.cfg"), "--jobs", "3", "--json"],
            ["prolong", os.path.join(CORPUS, "circle.variety")],
            ["jet", "d1(x * d1(x))", "--json"],
            ["axiom-wide", os.path.join(CORPUS, "product.zjson"), "--n", "2"],
            ["dim-cert", os.path.join(CORPUS, "chain.tri"), "--json"],
        ):
            code1, out1, _ = _cli(capsys, *argv)
            code2, out2, _ = _cli(capsys, *argv)
            assert code1 == code2 == 0
            assert out1 == out2

        # exit codes under fault injection
        faults = {
            "syntax.cfg": ("k = 2\nP: d1\np[d1] = x[\neta: none\n", 2),
            "semantic.cfg": ("k = 2\nP: d1, d2\np[d1] = x[0]\np[d2] = x[d2] - x[0]\neta: none\n", 1),
            "syntax.tri": ("x1 :: x1\n", 2),
            "bad.zjson": ("{not json", 2),
        }
        for name, (content, expected) in faults.items():
            path = tmp_path / name
            path.write_text(content)
            if name.endswith(".cfg"):
                code, _, _ = _cli(capsys, "config-check", str(path))
            elif name.endswith(".tri"):
                code, _, _ = _cli(capsys, "dim-cert", str(path))
            else:
                code, _, _ = _cli(capsys, "axiom-wide", str(path), "--n", "2")
            assert code == expected, f"{name}: expected exit {expected}, got {code}"

        code, _, _ = _cli(capsys, "config-check", str(tmp_path / "missing.cfg"))
        assert code == 1
