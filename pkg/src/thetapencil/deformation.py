"""Miura transformations and the order-by-order extension of deformations.

An eps-expansion is a dict ``{k: LocalFunctional}``; the bivector term of
eps^k has standard degree k + 1.  A Miura generator of the second kind is a
dict ``{k: LocalFunctional}`` of one-vectors X_k of standard degree k >= 1.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from . import linalg
from .algebra import ThetaElement, jet_monomials
from .cohomology import WindowError, _exponents, coordinates
from .functionals import LocalFunctional, is_reducible, schouten

__all__ = [
    "GradingError",
    "ExtensionError",
    "miura_apply",
    "extension_rhs",
    "extension_step",
    "extend",
    "one_vector_basis",
    "scalar_deformation",
    "deformation_cocycle",
]


class GradingError(ValueError):
    pass


class ExtensionError(WindowError):
    """No solution inside the coefficient window; carries the residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def _check_expansion(P, p, shift, name):
    for k, term in P.items():
        dens = term.density
        if dens.is_zero():
            continue
        if dens.gradings() != {(p, k + shift)}:
            raise GradingError("%s term eps^%d has bidegrees %s, expected (%d, %d)"
                               % (name, k, sorted(dens.gradings()), p, k + shift))


def _ad(X, S, K):
    out = {}
    for a, x in X.items():
        for b, s in S.items():
            if a + b > K or x.is_zero() or s.is_zero():
                continue
            t = schouten(x, s)
            out[a + b] = out[a + b] + t if a + b in out else t
    return out


def miura_apply(X, P, K):
    """exp(ad_X) P truncated at eps^K, with ad_X = [X, .]."""
    if any(k < 1 for k in X):
        raise GradingError("second kind generators start at eps^1")
    _check_expansion(X, 1, 0, "generator")
    _check_expansion(P, 2, 1, "bivector")
    result = {k: v for k, v in P.items() if k <= K}
    term = dict(result)
    for m in range(1, K + 1):
        term = _ad(X, term, K)
        if not term:
            break
        for k, v in term.items():
            v = v.scale(Fraction(1, factorial(m)))
            result[k] = result[k] + v if k in result else v
        # keep the unscaled iterate; the factorial is applied on accumulation
    return result


def one_vector_basis(field, d, N, lower=None):
    """Densities c(u) m spanning the one-vectors of standard degree d.

    ``m`` runs over canonical (irreducible) jet monomials and ``c`` over the
    monomials of total degree <= N (exponents >= ``lower``).
    """
    n = field.n
    lower = lower or (0,) * n
    keys = [k for k in jet_monomials(n, 1, d) if not is_reducible(k)]
    out = []
    for k in keys:
        for tot in range(sum(lower), N + 1):
            for e in _exponents(n, tot - sum(lower)):
                alpha = tuple(a + b for a, b in zip(e, lower))
                c = field.one()
                for j, a in enumerate(alpha, start=1):
                    if a:
                        c = c * (field.u(j) ** a if a > 0 else 1 / field.u(j) ** (-a))
                out.append(ThetaElement(field, {k: c}))
    return out


def extension_rhs(terms, m):
    """1/2 sum_{a+b=2m+2, a,b>=2} [P^a, P^b]."""
    field = next(iter(terms.values())).field
    total = LocalFunctional.zero(field)
    for a in range(2, 2 * m + 1, 2):
        b = 2 * m + 2 - a
        if a in terms and b in terms:
            total = total + schouten(terms[a], terms[b]).scale(Fraction(1, 2))
    return total


def extension_step(pencil, terms, m, N=0):
    """The next term P^{2m+2} of the second bracket (first bracket undeformed).

    Solves d1 d2 Q = RHS for a one-vector Q of standard degree 2m+2 in the
    coefficient window of degree N and returns ``(P^{2m+2}, Q)`` with
    P^{2m+2} = d1 Q.  Both residuals are checked before returning.
    """
    P1 = LocalFunctional(pencil.P1())
    P2 = LocalFunctional(pencil.P2())
    for k, t in terms.items():
        if k % 2 or not t.density.is_zero() and t.density.gradings() != {(2, k + 1)}:
            raise GradingError("term eps^%d must be a bivector of degree %d" % (k, k + 1))
    if 2 in terms and (not schouten(P1, terms[2]).is_zero() or not schouten(P2, terms[2]).is_zero()):
        raise GradingError("the eps^2 term is not in ker d1 and ker d2")
    rhs = extension_rhs(terms, m)
    if not schouten(P1, rhs).is_zero() or not schouten(P2, rhs).is_zero():
        raise ExtensionError("right-hand side is not in ker d1 and ker d2 (input is not a deformation)", rhs)
    field = pencil.field
    basis = one_vector_basis(field, 2 * m + 2, N)
    cols = []
    for q in basis:
        img = schouten(P1, schouten(P2, LocalFunctional(q, canonical=True)))
        cols.append(coordinates(img.density))
    target = coordinates(rhs.density)
    x = linalg.solve(cols, target) if target else [Fraction(0)] * len(basis)
    if x is None:
        raise ExtensionError("no solution of d1 d2 Q = RHS in the window N=%d" % N, rhs)
    Q = ThetaElement.zero(field)
    for v, q in zip(x, basis):
        if v:
            Q = Q + q.scale(v)
    Q = LocalFunctional(Q)
    P_next = schouten(P1, Q)
    r1 = schouten(P1, P_next)
    r2 = schouten(P2, P_next) + rhs
    if not r1.is_zero() or not r2.is_zero():
        raise AssertionError("extension residuals do not vanish: %s, %s" % (r1, r2))
    return P_next, Q


def extend(pencil, P2_2, steps, N=0):
    """Run ``steps`` extension steps starting from the eps^2 term."""
    terms = {2: P2_2}
    for m in range(1, steps + 1):
        terms[2 * m + 2], _ = extension_step(pencil, terms, m, N)
    return terms


def scalar_deformation(pencil, c):
    """n = 1: the eps^2 term int 3/2 c f^2 theta theta_3 (central invariant c when constant)."""
    if pencil.n != 1:
        raise ValueError("scalar deformation needs n = 1")
    field = pencil.field
    f = pencil.fs[0]
    c = field.coerce(c) if not hasattr(c, "field") else c
    dens = (ThetaElement.theta(field, 1, 0) * ThetaElement.theta(field, 1, 3)).scale(c * f * f * Fraction(3, 2))
    return LocalFunctional(dens)


def deformation_cocycle(pencil, c, N=2):
    """n = 1: an eps^2 term in ker d1 and ker d2 with central invariant ``c``.

    Starts from :func:`scalar_deformation` and adds jet-dependent bivectors of
    degree 3 (coefficients u^a, a <= N) until both cocycle conditions hold.
    The corrections carry a u-jet, so the delta^(3) coefficient and with it
    the central invariant stay as they were.
    """
    field = pencil.field
    P1 = LocalFunctional(pencil.P1())
    P2 = LocalFunctional(pencil.P2())
    lead = scalar_deformation(pencil, c)
    keys = [k for k in jet_monomials(1, 2, 3) if k[1] and not is_reducible(k)]
    basis = []
    for k in keys:
        for a in range(N + 1):
            basis.append(ThetaElement(field, {k: field.u(1) ** a if a else field.one()}))

    def tagged(x):
        out = {}
        for tag, P in ((1, P1), (2, P2)):
            for key, v in coordinates(schouten(P, x).density).items():
                out[(tag, key)] = v
        return out

    cols = [tagged(LocalFunctional(b, canonical=True)) for b in basis]
    target = {k: -v for k, v in tagged(lead).items()}
    x = linalg.solve(cols, target) if target else [Fraction(0)] * len(basis)
    if x is None:
        raise ExtensionError("no cocycle with this leading term in the window N=%d" % N)
    out = lead.density
    for v, b in zip(x, basis):
        if v:
            out = out + b.scale(v)
    P = LocalFunctional(out)
    if not schouten(P1, P).is_zero() or not schouten(P2, P).is_zero():
        raise AssertionError("cocycle conditions do not hold")
    return P
