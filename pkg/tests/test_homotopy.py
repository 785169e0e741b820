import itertools
import random
from fractions import Fraction

import pytest

from thetapencil.algebra import ThetaElement as T, graded_commutator, jet_monomials, key_deg_theta1
from thetapencil.homotopy import (
    BElement,
    D_op,
    NotInBError,
    d_hat,
    delta_01,
    delta_01_prime,
    delta_0,
    delta_minus1,
    homotopy_h,
    inclusion_i,
    projection_p,
    projection_p_is,
    tag_monomial,
    to_B,
    weight,
    weight_basis,
)
from thetapencil.pencil import Pencil, generator_element, generators


@pytest.fixture(scope="module")
def pen1():
    return Pencil(n=1)


@pytest.fixture(scope="module")
def pen2():
    return Pencil(n=2)


def test_delta_minus1_values(pen1):
    F = pen1.field
    Dm1 = delta_minus1(pen1)
    expect = (T.coeff(F.u(1)) - T.lam(F)) * T.theta(F, 1, 2).scale(pen1.fs[0])
    assert Dm1(T.u(F, 1, 1)) == expect
    assert Dm1(T.coeff(F.u(1))).is_zero()


def test_delta_minus1_squares_to_zero(pen2):
    Dm1 = delta_minus1(pen2)
    for g in generators(2, 4):
        x = generator_element(pen2.field, g)
        assert Dm1(Dm1(x)).is_zero()


def test_delta0_leading_term(pen1):
    F = pen1.field
    x = delta_0(pen1)(T.coeff(F.u(1)))
    lead = (T.coeff(F.u(1)) - T.lam(F)) * T.theta(F, 1, 1).scale(pen1.fs[0])
    assert x.filter(lambda k: not k[1]) == lead


def test_delta01_raises_theta1_degree(pen2):
    rng = random.Random(11)
    D01 = delta_01(pen2)
    keys = [k for p in range(4) for d in range(4) for k in jet_monomials(2, p, d)]
    for key in rng.sample(keys, 50):
        y = D01(T.monomial(pen2.field, key))
        assert all(key_deg_theta1(k) == key_deg_theta1(key) + 1 for k in y.terms)


def test_anticommutator(pen2):
    Dm1, D01 = delta_minus1(pen2), delta_01(pen2)
    for g in generators(2, 4):
        assert graded_commutator(Dm1, D01, generator_element(pen2.field, g)).is_zero()


def test_h_kills_monomials_without_theta(pen1):
    F = pen1.field
    h = homotopy_h(pen1, 1, 1)
    assert h(T.u(F, 1, 1) * T.theta(F, 1, 0)).is_zero()


def test_homotopy_identity_u11(pen1):
    F = pen1.field
    Dm1 = delta_minus1(pen1)
    x = T.u(F, 1, 1)
    h, p = homotopy_h(pen1, 1, 1), projection_p_is(pen1, 1, 1)
    # both sides by hand: h(u11) = 0 and h(D_-1 u11) = u11, p(u11) = 0
    assert h(x).is_zero()
    assert h(Dm1(x)) == x
    assert p(x).is_zero()
    assert p(T.theta(F, 1, 0)) == T.theta(F, 1, 0)


def test_p_fixtures(pen2):
    F = pen2.field
    p = projection_p(pen2)
    x = T.theta(F, 1, 0) * T.theta(F, 2, 1) * T.lam(F, 3)
    assert p(x) == x
    assert p((T.lam(F) - T.coeff(F.u(1))) * T.theta(F, 1, 2)).is_zero()
    assert p(T.u(F, 1, 1) * T.theta(F, 2, 2)).is_zero()


def test_tags():
    assert tag_monomial((0, (), ((0, 1), (1, 2)))) == "C"
    assert tag_monomial((0, ((1, 1),), ((2, 1),))) == ("C", 1)
    assert tag_monomial((0, ((1, 1),), ((2, 2),))) == "M"


def test_B_round_trip(pen2):
    F = pen2.field
    y = T.theta(F, 1, 0) * T.lam(F) + d_hat(F, 2)(T.u(F, 2, 1) * T.theta(F, 2, 2))
    b = to_B(y)
    assert inclusion_i(b) == y
    with pytest.raises(NotInBError):
        to_B(T.u(F, 1, 1) * T.theta(F, 2, 2))


def test_delta01_prime(pen1):
    F = pen1.field
    A, raw = delta_01_prime(pen1), delta_01_prime(pen1, raw=True)
    one = BElement(F, T.one(F), {})
    assert A(one).is_zero()
    b = BElement(F, T.theta(F, 1, 0), {})
    assert A(b) == raw(b)
    b = BElement(F, T.theta(F, 1, 0) * T.lam(F), {1: d_hat(F, 1)(T.u(F, 1, 1) * T.theta(F, 1, 2))})
    assert A(b) == raw(b)


def test_d_hat_and_D(pen1):
    F = pen1.field
    f = pen1.fs[0]
    dh = d_hat(F, 1)
    assert dh(T.u(F, 1, 1)) == T.theta(F, 1, 2)
    assert weight((0, ((1, 1),), ()), 1) == Fraction(3, 2)
    Di = D_op(pen1, 1, 1)
    assert Di(T.theta(F, 1, 2)) == T.theta(F, 1, 2).scale(f * Fraction(1, 2))
    x = T.u(F, 1, 2)
    assert graded_commutator(Di, dh, x) == -T.theta(F, 1, 3).scale(f)


def _brute_weight_basis(i, w, smax=8):
    # all monomials in u^{i,1..smax} (degree <= 4) and distinct theta_i^{2..smax}
    out = set()
    ev_gens = [(i, s) for s in range(1, smax + 1)]
    od_gens = [(s, i) for s in range(2, smax + 1)]
    for r in range(0, 5):
        for ev in itertools.combinations_with_replacement(ev_gens, r):
            for q in range(0, 4):
                for od in itertools.combinations(od_gens, q):
                    key = (0, tuple(sorted(ev)), tuple(sorted(od)))
                    if (ev or od) and weight(key, i) == w:
                        out.add(key)
    return out


@pytest.mark.parametrize("w2", range(1, 7))
def test_weight_basis_enumeration(w2):
    w = Fraction(w2, 2)
    assert set(weight_basis(1, w)) == _brute_weight_basis(1, w)


def test_weight_basis_small():
    assert weight_basis(1, Fraction(1, 2)) == [(0, (), ((2, 1),))]
    w2 = weight_basis(1, 2)
    assert (0, ((1, 2),), ()) in w2 and (0, (), ((2, 1), (4, 1))) in w2
    assert (0, (), ((2, 1), (3, 1))) not in w2
