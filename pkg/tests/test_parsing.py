from fractions import Fraction

import pytest

from diffalg.algebra import JetVar, Poly, RatFun, var
from diffalg.errors import ParseError
from diffalg.jet import TDer, TMul, TVar, term_str
from diffalg.monoid import COMMUTATIVE, FREE, MonoidElem
from diffalg.parsing import (
    parse_config,
    parse_definable_json,
    parse_derspec,
    parse_expression,
    parse_index_text,
    parse_poly,
    parse_ratfun,
    parse_term,
    parse_term_atom,
    parse_triangular,
    parse_variety,
)


def test_parse_poly_example():
    got = parse_poly("x[d1]^2 - x[0]")
    x0 = Poly.variable(JetVar("x", MonoidElem.exponents((0,))))
    xd1 = Poly.variable(JetVar("x", MonoidElem.exponents((1,))))
    assert got == xd1 * xd1 - x0


def test_parse_poly_with_k_and_free_mode():
    got = parse_poly("x[d2 d1] * x[0]", mode=FREE, k=2)
    assert JetVar("x", MonoidElem.word(2, (2, 1))) in got.variables()


def test_parse_term_example():
    got = parse_term("d1(x * d1(x))")
    assert got == TDer(1, TMul(TVar("x"), TDer(1, TVar("x"))))


def test_parse_term_atom():
    lhs, rel, rhs = parse_term_atom("d1(x) != x")
    assert rel == "!="
    assert lhs == TDer(1, TVar("x"))
    assert rhs == TVar("x")


def test_parse_error_positions():
    with pytest.raises(ParseError) as err:
        parse_poly("x[")
    assert err.value.column == 2

    with pytest.raises(ParseError) as err:
        parse_poly("x + @")
    assert err.value.column == 5

    with pytest.raises(ParseError):
        parse_poly("x y")  # trailing garbage

    with pytest.raises(ParseError):
        parse_poly("d1 + 1")  # reserved name used as a variable


def test_parse_rationals_and_division():
    assert parse_expression("1/2*x") == RatFun(var("x"), 2)
    assert parse_ratfun("1/(2*x)") == RatFun(Poly.const(1), 2 * var("x"))
    with pytest.raises(ParseError):
        parse_poly("1/(2*x)")  # a proper fraction is not a polynomial


def test_parse_index_text():
    assert parse_index_text("d1^2 d2", COMMUTATIVE, 2) == MonoidElem.exponents((2, 1))
    assert parse_index_text("d1 d2 d1", FREE, 2) == MonoidElem.word(2, (1, 2, 1))
    assert parse_index_text("0", COMMUTATIVE, 2) == MonoidElem.identity(COMMUTATIVE, 2)


def test_parse_derspec_round_trip():
    text = "eta: t -> 1; d: x -> u, y -> v"
    spec = parse_derspec(text)
    assert spec.eta[JetVar("t")] == RatFun.const(1)
    assert spec.images[JetVar("x")] == RatFun(var("u"))
    again = parse_derspec(str(spec))
    assert again.eta == spec.eta and again.images == spec.images


def test_parse_config():
    cfg = parse_config(
        """
        k = 2
        P: d1, d2
        p[d1] = x[d1] - x[0]^2
        p[d2] = x[d2] - 2*x[0]
        eta: none
        """
    )
    assert cfg.k == 2
    assert len(cfg.leaders) == 2
    assert cfg.theta == MonoidElem.exponents((1, 1))


def test_parse_config_with_parameter_tables():
    cfg = parse_config(
        """
        k = 2
        P: d1, d2
        p[d1] = x[d1] - c*x[0]
        p[d2] = x[d2] - x[0]
        eta[d1]: c -> 1
        eta[d2]: c -> 0
        """
    )
    assert cfg.etas[0][JetVar("c")] == RatFun.const(1)
    assert cfg.etas[1][JetVar("c")] == RatFun.const(0)


def test_parse_config_errors():
    with pytest.raises(ParseError):
        parse_config("P: d1")  # k missing
    with pytest.raises(ParseError):
        parse_config("k = 2\nP: d1\nnonsense here")


def test_parse_variety():
    data = parse_variety(
        """
        # circle
        x^2 + y^2 - 1
        point: 1, 0
        """
    )
    assert data.variables == (JetVar("x"), JetVar("y"))
    assert len(data.gens) == 1
    assert data.point == (RatFun.const(1), RatFun.const(0))


def test_parse_variety_with_derivation_and_vars():
    data = parse_variety(
        """
        vars: x
        derivation: eta: c -> 1
        x^2 - c
        """
    )
    assert data.variables == (JetVar("x"),)
    assert data.spec.eta[JetVar("c")] == RatFun.const(1)


def test_parse_triangular():
    system = parse_triangular(
        """
        ambient: x0, x1
        x1 : x1 - x0^2
        """
    )
    assert system.ambient == (JetVar("x0"), JetVar("x1"))
    assert system.equations[0][0] == JetVar("x1")


def test_parse_definable_json():
    desc = parse_definable_json(
        '{"indices": ["z1", "z2"], "atoms": [{"poly": "z2 - z1", "rel": "="}], "projection": ["z1"]}'
    )
    assert len(desc.indices) == 2
    with pytest.raises(ParseError):
        parse_definable_json("not json")
    with pytest.raises(ParseError):
        parse_definable_json('{"indices": []}')


# ----------------------------------------------------------------------
# canonical-form round trips: print . parse . print == print


POLY_SAMPLES = [
    "x[d1]^2 - x[0]",
    "2*x[0]*x[d1 d2] + 1/2",
    "x[d1^2] - x[d1]*x[0]",
    "c*x[0]^3 - c^2",
]


@pytest.mark.parametrize("text", POLY_SAMPLES)
def test_poly_print_parse_round_trip(text):
    once = str(parse_poly(text))
    assert str(parse_poly(once)) == once


def test_term_print_parse_round_trip():
    for text in ["d1(x * d1(x))", "d2(d1(x)) + -x * (x + 1)", "1/2 * x + d1(t)"]:
        term = parse_term(text)
        once = term_str(term)
        assert parse_term(once) == term
        assert term_str(parse_term(once)) == once


def test_ratfun_print_parse_round_trip():
    for text in ["(x + 1) / (x - 1)", "-x^2 / t^2", "(2*t*u*x - x^2) / (t^2)"]:
        once = str(parse_ratfun(text))
        assert str(parse_ratfun(once)) == once
