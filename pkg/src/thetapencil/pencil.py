"""Semisimple pencils of hydrodynamic type in canonical coordinates.

The first metric is diagonal, g_1 = diag(f^1, ..., f^n); the second is
g_2 = diag(u^1 f^1, ..., u^n f^n).  ``build_D(fs)`` gives the odd derivation
of the density algebra associated with the bivector of diag(fs).
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import SuperDerivation, ThetaElement
from .coeffs import CoeffField

__all__ = [
    "Pencil",
    "build_D",
    "bivector_density",
    "variational_D",
    "christoffel",
    "generators",
    "generator_element",
    "square_checks",
]


def _th(field, i, s):
    return ThetaElement.theta(field, i, s)


def _u1(field, j):
    return ThetaElement.u(field, j, 1)


def christoffel(fs, i, j, k):
    """Contravariant symbol Gamma^{ij}_k of diag(fs) (canonical coordinates)."""
    field = fs[0].field
    out = field.zero()
    if i == j:
        out = out + fs[i - 1].d_du(k)
    if j == k:
        out = out + fs[i - 1] * fs[j - 1].d_du(i) / fs[j - 1]
    if i == k:
        out = out - fs[j - 1] * fs[i - 1].d_du(j) / fs[i - 1]
    return out * field.const(Fraction(1, 2))


def bivector_density(fs):
    """Density of the bivector of diag(fs):
    1/2 (f^i th_i th_i^1 + (f^i / f^j) d_i f^j u^{j,1} th_i th_j)."""
    field = fs[0].field
    n = field.n
    half = field.const(Fraction(1, 2))
    out = ThetaElement.zero(field)
    for i in range(1, n + 1):
        out = out + (_th(field, i, 0) * _th(field, i, 1)).scale(fs[i - 1])
        for j in range(1, n + 1):
            if i == j:
                continue
            c = fs[i - 1] * fs[j - 1].d_du(i) / fs[j - 1]
            if not c.is_zero():
                out = out + (_u1(field, j) * _th(field, i, 0) * _th(field, j, 0)).scale(c)
    return out.scale(half)


def _X(fs, i):
    """Image of the coefficient direction u^i."""
    field = fs[0].field
    n = field.n
    fi = fs[i - 1]
    out = _th(field, i, 1).scale(fi)
    acc = ThetaElement.zero(field)
    for j in range(1, n + 1):
        fj = fs[j - 1]
        c1 = fi.d_du(j)
        if not c1.is_zero():
            acc = acc + (_u1(field, j) * _th(field, i, 0)).scale(c1)
        c2 = fi * fj.d_du(i) / fj
        if not c2.is_zero():
            acc = acc + (_u1(field, j) * _th(field, j, 0)).scale(c2)
        c3 = fj * fi.d_du(j) / fi
        if not c3.is_zero():
            acc = acc - (_u1(field, i) * _th(field, j, 0)).scale(c3)
    return out + acc.scale(field.const(Fraction(1, 2)))


def _Y(fs, i):
    """Image of theta_i^0."""
    field = fs[0].field
    n = field.n
    fi = fs[i - 1]
    acc = ThetaElement.zero(field)
    # a_k = f^k d_k f^i / f^i for fixed i, and its analogues
    for j in range(1, n + 1):
        fj = fs[j - 1]
        c = fj.d_du(i)
        if not c.is_zero():
            acc = acc + (_th(field, j, 0) * _th(field, j, 1)).scale(c)
        c = fj * fi.d_du(j) / fi
        if not c.is_zero():
            acc = acc + (_th(field, i, 0) * _th(field, j, 1)).scale(c)
            acc = acc - (_th(field, j, 0) * _th(field, i, 1)).scale(c)
    for j in range(1, n + 1):
        fj = fs[j - 1]
        for k in range(1, n + 1):
            fk = fs[k - 1]
            c = (fk * fj.d_du(k) / fj).d_du(i)
            if not c.is_zero():
                acc = acc + (_u1(field, j) * _th(field, k, 0) * _th(field, j, 0)).scale(c)
            c = (fk * fi.d_du(k) / fi).d_du(j)
            if not c.is_zero():
                acc = acc - (_u1(field, j) * _th(field, k, 0) * _th(field, i, 0)).scale(c)
    return acc.scale(field.const(Fraction(1, 2)))


def build_D(fs, name="D"):
    """The odd derivation D(f^1, ..., f^n) as a :class:`SuperDerivation`.

    Images of u^{i,s} and theta_i^s are d_x^s of the images of u^i and
    theta_i^0, built lazily and memoised.
    """
    fs = list(fs)
    field = fs[0].field
    for f in fs:
        if f.is_zero():
            raise ValueError("the functions f^i must be non-vanishing")
    base = {}

    def fn(gen):
        kind, i, s = gen
        if s == 0:
            img = _X(fs, i) if kind == "u" else _Y(fs, i)
            base[gen] = img
            return img
        return D.image((kind, i, s - 1)).d_x()

    D = SuperDerivation(field, 1, image_fn=fn, name=name)
    D.functions = fs
    return D


def variational_D(P, name="D_P"):
    """Odd derivation of a local bivector with density P, from its variational derivatives:
    u^{i,s} -> d_x^s(delta P / delta theta_i), theta_i^s -> d_x^s(delta P / delta u^i)."""
    field = P.field

    def fn(gen):
        kind, i, s = gen
        if s == 0:
            return P.variational_theta(i) if kind == "u" else P.variational_u(i)
        return D.image((kind, i, s - 1)).d_x()

    D = SuperDerivation(field, 1, image_fn=fn, name=name)
    return D


class Pencil:
    """A semisimple pencil given by the functions f^1..f^n.

    ``fs`` is a list of coefficients; when omitted the generic symbols f^i
    of a generic coefficient field are used.
    """

    def __init__(self, fs=None, n=None, field=None):
        if fs is None:
            if n is None:
                raise ValueError("give fs or n")
            field = field or CoeffField.generic(n)
            fs = [field.f(i) for i in range(1, n + 1)]
        fs = [fs[0].field.coerce(f) if not hasattr(f, "field") else f for f in fs]
        # put every function in a common field
        field = fs[0].field
        for f in fs[1:]:
            if f.field.rank() > field.rank():
                field = f.field
        self.fs = [f.promote(field) for f in fs]
        self.field = field
        self.n = field.n
        self.fs2 = [f * field.u(i + 1) for i, f in enumerate(self.fs)]
        self.D1 = build_D(self.fs, "D1")
        self.D2 = build_D(self.fs2, "D2")
        self.Dl = self.D2 - self.D1.times_lambda()
        self.Dl.name = "D_lambda"

    @property
    def is_generic(self):
        return self.field.is_generic

    def P1(self):
        return bivector_density(self.fs)

    def P2(self):
        return bivector_density(self.fs2)

    def D_lambda(self, lam=None):
        """D_2 - lambda D_1 with lambda symbolic, or evaluated at a coefficient."""
        if lam is None:
            return self.Dl
        return self.D2 - self.D1.scaled(lam)

    def __repr__(self):
        return "Pencil(%s)" % ", ".join(str(f) for f in self.fs)


def generators(n, deg):
    """Generators ``(kind, i, s)`` with s <= deg; ("u", i, 0) is the coefficient u^i."""
    return [(kind, i, s) for kind in ("u", "th") for i in range(1, n + 1) for s in range(deg + 1)]


def generator_element(field, gen):
    kind, i, s = gen
    return ThetaElement.u(field, i, s) if kind == "u" else ThetaElement.theta(field, i, s)


def square_checks(pencil, gen):
    """The three identities D1^2 = 0, D2^2 = 0, D1 D2 + D2 D1 = 0 on one generator.

    Returns ``[(name, value)]`` with the (ideally zero) left-hand sides.
    """
    x = generator_element(pencil.field, gen)
    a, b = pencil.D1(x), pencil.D2(x)
    return [
        ("D1^2", pencil.D1(a)),
        ("D2^2", pencil.D2(b)),
        ("D1D2+D2D1", pencil.D1(b) + pencil.D2(a)),
    ]
