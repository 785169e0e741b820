from fractions import Fraction

from thetapencil.algebra import ThetaElement as T
from thetapencil.coeffs import CoeffField
from thetapencil.pencil import Pencil, bivector_density, christoffel, generators, square_checks


def test_christoffel():
    G = CoeffField.generic(1)
    f = G.f(1)
    assert christoffel([f], 1, 1, 1) == f.d_du(1) * Fraction(1, 2)
    F = CoeffField.concrete(1)
    assert christoffel([F.one()], 1, 1, 1).is_zero()
    G2 = CoeffField.generic(2)
    f1, f2 = G2.f(1), G2.f(2)
    assert christoffel([f1, f2], 1, 2, 2) == (f1 / f2) * f2.d_du(1) * Fraction(1, 2)


def test_bivectors_f1():
    F = CoeffField.concrete(1)
    pen = Pencil([F.one()])
    t0, t1 = T.theta(F, 1, 0), T.theta(F, 1, 1)
    assert pen.P1() == (t0 * t1).scale(Fraction(1, 2))
    assert pen.P2() == (t0 * t1).scale(F.u(1) * Fraction(1, 2))


def test_bivector_cross_term():
    G = CoeffField.generic(2)
    f1, f2 = G.f(1), G.f(2)
    P = bivector_density([f1, f2])
    key = (0, ((2, 1),), ((0, 1), (0, 2)))
    # coefficient of u^{2,1} th1 th2 is 1/2 (f1/f2) d_1 f2
    assert P.coefficient(key) == f1 / f2 * f2.d_du(1) * Fraction(1, 2)


def test_D_f1():
    F = CoeffField.concrete(1)
    pen = Pencil([F.one()])
    assert pen.D1(T.coeff(F.u(1))) == T.theta(F, 1, 1)
    assert pen.D1(T.theta(F, 1, 0)).is_zero()
    # D2 carries the connection term 1/2 u_x th0 of the metric g = u
    expect = (T.coeff(F.u(1)) - T.lam(F)) * T.theta(F, 1, 1) + (T.u(F, 1, 1) * T.theta(F, 1, 0)).scale(Fraction(1, 2))
    assert pen.Dl(T.coeff(F.u(1))) == expect
    assert pen.Dl(T.one(F)).is_zero()


def test_higher_images_by_d_x():
    pen = Pencil(n=2)
    for i in (1, 2):
        for s in range(3):
            assert pen.D1.image(("u", i, s + 1)) == pen.D1.image(("u", i, s)).d_x()
            assert pen.D2.image(("th", i, s + 1)) == pen.D2.image(("th", i, s)).d_x()


def test_Dl_at_u_kills_leading_term():
    pen = Pencil(n=1)
    x = pen.Dl(T.u(pen.field, 1, 1))
    lowest = x.filter(lambda k: not k[1])  # the part without u-jets
    assert lowest.eval_lambda_at_u(1).is_zero()


def test_squares_flat():
    F = CoeffField.concrete(2)
    u1, u2 = F.u(1), F.u(2)
    pen = Pencil([1 / (u1 - u2), 1 / (u2 - u1)])
    for g in generators(2, 2):
        assert all(v.is_zero() for _, v in square_checks(pen, g))


def test_squares_nonflat_detected():
    F = CoeffField.concrete(2)
    pen = Pencil([F.u(2), F.u(1)])
    assert any(not v.is_zero() for g in generators(2, 1) for _, v in square_checks(pen, g))
