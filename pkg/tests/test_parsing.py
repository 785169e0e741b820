import random

import pytest

from thetapencil.algebra import ThetaElement as T
from thetapencil.algebra import random_element
from thetapencil.coeffs import CoeffField
from thetapencil.homotopy import delta_minus1
from thetapencil.parsing import ParseError, parse, parse_ast, tokenize
from thetapencil.pencil import Pencil


def test_delta_minus1_image():
    pen = Pencil(n=1)
    F = pen.field
    img = delta_minus1(pen).apply(T.u(F, 1, 1))
    assert parse("(-L + u1)*f1*th1_2", 1, field=F) == img
    assert parse(str(img), 1, field=F) == img


def test_small_fixtures():
    assert parse("th1_0*th1_0", 1).is_zero()
    x = parse("1/2*f1^2", 1)
    F = x.field
    assert x == T.coeff(F.f(1) ** 2 / 2)
    assert parse("-th1_1 + 3*u1_2*th1_0", 1) == T.u(F, 1, 2) * T.theta(F, 1, 0).scale(3) - T.theta(F, 1, 1)
    assert parse("th2_0*th1_0", 2) == -parse("th1_0*th2_0", 2)
    assert parse("f1_d{1,1}", 1).terms  # second jet of the generic function
    assert parse("log_u1", 1).field.logs


def test_substitution():
    F = CoeffField.concrete(1)
    x = parse("f1_d{1}*th1_0", 1, fs=[F.u(1) ** 3])
    assert x == T.theta(F, 1, 0).scale(3 * F.u(1) ** 2)


@pytest.mark.parametrize("n", [1, 2])
def test_round_trip(n):
    rng = random.Random(n)
    F = CoeffField.concrete(n)
    pool = [F.u(1), F.one() / 3, -F.u(n) ** 2, 1 / (F.u(1) + 2)]
    for p in range(3):
        for d in range(4):
            x = random_element(F, p, d, rng=rng, lam_max=2, coeff_pool=pool)
            assert parse(str(x), n, field=F) == x, str(x)


def test_round_trip_generic():
    G = CoeffField.generic(2)
    x = random_element(G, 2, 2, rng=random.Random(5), coeff_pool=[G.f(1), G.f(2, (1, 0)), G.u(2)])
    assert parse(str(x), 2, field=G) == x


def test_error_positions():
    with pytest.raises(ParseError) as e:
        parse("th1_0 + $", 1)
    assert (e.value.line, e.value.col) == (1, 9)
    with pytest.raises(ParseError) as e:
        parse("th1_0 +\n  u1_1 * (th1_1", 1)
    assert e.value.line == 2
    with pytest.raises(ParseError) as e:
        parse_ast("u1 u1", 1)
    assert e.value.col == 4
    with pytest.raises(ParseError):
        parse("", 1)
    with pytest.raises(ParseError):
        parse("u1^", 1)


def test_index_range():
    with pytest.raises(ParseError) as e:
        parse("th3_0", 2)
    assert e.value.col == 1 and "out of range" in str(e.value)
    with pytest.raises(ParseError):
        parse("f1_d{2}", 1)


def test_bad_division():
    with pytest.raises(ValueError):
        parse("u1/th1_0", 1)
    with pytest.raises(ZeroDivisionError):
        parse("u1/(u1 - u1)", 1)


def test_tokenize_kinds():
    kinds = [m.lastgroup for m, _ in tokenize("th1_2*f2_d{1,2} - L")]
    assert kinds == ["theta", "op", "fjet", "op", "lam"]
