from fractions import Fraction

import pytest

from thetapencil.coeffs import CoeffField, LambdaCoeff, ZeroDivisionCoeffError, multi_indices, polar_free_divide


@pytest.fixture
def G():
    return CoeffField.generic(2, 2)


def test_field_identities(G):
    u1, u2 = G.u(1), G.u(2)
    f1 = G.f(1)
    assert ((u1 - u2) / (u1 - u2)).is_one()
    assert (f1 * (1 / f1)).is_one()
    assert (u1 ** 2 - u2 ** 2) / (u1 - u2) == u1 + u2


def test_d_du(G):
    u1 = G.u(1)
    f1, f2 = G.f(1), G.f(2)
    assert (u1 * f2).d_du(1) == f2 + u1 * G.f(2, (1, 0))
    assert u1.d_du(2).is_zero()
    assert (1 / f1).d_du(1) == -G.f(1, (1, 0)) / (f1 * f1)


def test_jets_grow_field():
    G = CoeffField.generic(1, 2)
    g = G.f(1, (2,)).d_du(1)
    assert g == G.f(1, (3,))
    assert g.field.jet_order >= 3


def test_polar_free_divide(G):
    u1, u2 = G.u(1), G.u(2)
    zero, one = G.zero(), G.one()
    assert polar_free_divide(LambdaCoeff(G, [zero, zero, one]), 1) == LambdaCoeff(G, [u1, one])
    assert polar_free_divide(LambdaCoeff(G, [G.const(7)]), 1) == LambdaCoeff(G, [])
    assert polar_free_divide(LambdaCoeff(G, [-u2, one]), 1) == LambdaCoeff(G, [one])


def test_division_by_zero():
    F = CoeffField.concrete(1)
    with pytest.raises(ZeroDivisionError):
        F.u(1) / (F.u(1) - F.u(1))
    assert issubclass(ZeroDivisionCoeffError, ZeroDivisionError)


def test_concrete_and_logs():
    F = CoeffField.concrete(1, logs=True)
    L = F.log_u(1)
    assert L.d_du(1) == 1 / F.u(1)
    assert (F.u(1) * L).d_du(1) == L + 1
    with pytest.raises(ValueError):
        CoeffField.concrete(1).log_u(1)


def test_constants_and_render():
    F = CoeffField.concrete(2)
    c = F.const(Fraction(3, 4))
    assert c.is_constant() and c.constant_value() == Fraction(3, 4)
    assert str(F.u(1) ** 2 - 3 * F.u(2)) == "u1^2 - 3*u2"
    assert str(F.u(1) / F.u(2)) == "u1/(u2)"


def test_multi_indices():
    assert multi_indices(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert multi_indices(1, 3) == [(3,)]
