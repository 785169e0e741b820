"""Local functionals: densities modulo total derivatives.

Normal form
-----------
Variables are ordered by ``(jet order, kind, index)`` with kind 0 for u and
1 for theta.  The leading term of d_x(c m), for a monomial m with top
variable z, is (m / z) * d_x z.  Hence a monomial N is *reducible* when its
top variable y = d_x z has jet order >= 1, occurs once, every other variable
of N is <= z, and (for odd z) z does not already occur.  ``canonicalize``
removes reducible monomials from the top down by subtracting total
derivatives; the result is a combination of irreducible monomials, which is
a normal form except in bidegree (0, 1), where sum_j c_j(u) u^{j,1} may be
exact.  Equality there is decided by variational derivatives.
"""

from __future__ import annotations

import heapq
import random
from fractions import Fraction
from math import comb

from .algebra import (
    ThetaElement,
    SuperDerivation,
    _add_term,
    key_super_degree,
    mul_keys,
    random_element,
)

__all__ = [
    "canonicalize",
    "is_reducible",
    "LocalFunctional",
    "schouten",
    "d_P",
    "derivation_of",
    "DeltaBracket",
    "NonSkewError",
    "delta_to_theta",
    "theta_to_delta",
    "central_invariants",
    "Deformation",
]


def _vars_desc(key):
    """Variables of a monomial as (order, kind, index), in decreasing order."""
    _, ev, od = key
    vs = [(s, 0, i) for (i, s) in ev] + [(s, 1, i) for (s, i) in od]
    vs.sort(reverse=True)
    return vs


def monomial_code(key):
    return (tuple(_vars_desc(key)), key[0])


class _Desc:
    """Heap entry ordering monomials from the largest down."""

    __slots__ = ("code", "key")

    def __init__(self, key):
        self.code = monomial_code(key)
        self.key = key

    def __lt__(self, other):
        return self.code > other.code


def _antiderivative_key(key):
    """The monomial m with leading d_x-term equal to ``key``, or None."""
    vs = _vars_desc(key)
    if not vs:
        return None
    s, kind, i = vs[0]
    if s == 0 or (kind == 0 and s == 1):
        return None
    if len(vs) > 1 and vs[1] == vs[0]:
        return None
    z = (s - 1, kind, i)
    if len(vs) > 1 and vs[1] > z:
        return None
    lam, ev, od = key
    if kind == 0:
        nev = list(ev)
        nev.remove((i, s))
        nev.append((i, s - 1))
        return (lam, tuple(sorted(nev)), od)
    if (s - 1, i) in od:
        return None
    nod = tuple(sorted([x for x in od if x != (s, i)] + [(s - 1, i)]))
    return (lam, ev, nod)


def is_reducible(key):
    return _antiderivative_key(key) is not None


def canonicalize(a, witness=False):
    """Normal form of the class of ``a`` modulo total derivatives.

    With ``witness=True`` also return b with a - canonical = d_x b.
    """
    field = a.field
    terms = dict(a.terms)
    wit = {}
    heap = [_Desc(k) for k in terms]
    heapq.heapify(heap)
    seen = set()
    while heap:
        entry = heapq.heappop(heap)
        key = entry.key
        if key in seen:
            continue
        c = terms.get(key)
        if c is None:
            continue
        m = _antiderivative_key(key)
        if m is None:
            seen.add(key)
            continue
        dm = ThetaElement(field, {m: field.one()}).d_x()
        kappa = dm.terms[key]
        coef = c / kappa
        _add_term(wit, m, coef)
        for k2, c2 in dm.terms.items():
            _add_term(terms, k2, -(c2 * coef))
            if k2 != key:
                heapq.heappush(heap, _Desc(k2))
        # coefficient derivative terms
        if not coef.is_constant():
            for j in range(1, field.n + 1):
                dc = coef.d_du(j)
                if dc.is_zero():
                    continue
                sign, k2 = mul_keys((0, ((j, 1),), ()), m)
                _add_term(terms, k2, -dc if sign > 0 else dc)
                heapq.heappush(heap, _Desc(k2))
    result = ThetaElement(field, terms)
    if witness:
        return result, ThetaElement(field, wit)
    return result


def _is_closed_one_form_density(a):
    """True when every term is c(u) u^{j,1} (bidegree (0,1)) and the density is exact."""
    for lam, ev, od in a.terms:
        if od or len(ev) != 1 or ev[0][1] != 1:
            return False
    return all(a.variational_u(i).is_zero() for i in range(1, a.field.n + 1))


class LocalFunctional:
    """The class of a density in the quotient by total derivatives."""

    __slots__ = ("density",)

    def __init__(self, density, canonical=False):
        self.density = density if canonical else canonicalize(density)

    @property
    def field(self):
        return self.density.field

    @classmethod
    def zero(cls, field):
        return cls(ThetaElement.zero(field), canonical=True)

    def bidegree(self):
        return self.density.bidegree()

    @property
    def p(self):
        return self.density.bidegree()[0]

    def is_zero(self):
        return self.density.is_zero() or _is_closed_one_form_density(self.density)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, LocalFunctional):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __add__(self, other):
        return LocalFunctional(self.density + other.density, canonical=True)

    def __sub__(self, other):
        return LocalFunctional(self.density - other.density, canonical=True)

    def __neg__(self):
        return LocalFunctional(-self.density, canonical=True)

    def scale(self, c):
        return LocalFunctional(self.density.scale(c), canonical=True)

    def __mul__(self, c):
        return self.scale(c)

    __rmul__ = __mul__

    def delta_u(self, i):
        return self.density.variational_u(i)

    def delta_theta(self, i):
        return self.density.variational_theta(i)

    def __str__(self):
        return "int(%s)" % self.density

    def __repr__(self):
        return "LocalFunctional(%s)" % self.density


def _as_functional(x):
    return x if isinstance(x, LocalFunctional) else LocalFunctional(x)


def _homogeneous_p(P):
    ps = {key_super_degree(k) for k in P.density.terms}
    if len(ps) > 1:
        raise ValueError("functional is not homogeneous in super degree")
    return ps.pop() if ps else 0


def schouten(P, Q):
    """[P, Q] = int sum_i (dP/dtheta_i dQ/du^i + (-1)^p dP/du^i dQ/dtheta_i)."""
    P, Q = _as_functional(P), _as_functional(Q)
    p = _homogeneous_p(P)
    _homogeneous_p(Q)
    n = P.field.n
    total = ThetaElement.zero(P.field)
    for i in range(1, n + 1):
        pt = P.delta_theta(i)
        if pt:
            total = total + pt * Q.delta_u(i)
        pu = P.delta_u(i)
        if pu:
            term = pu * Q.delta_theta(i)
            total = total - term if p & 1 else total + term
    return LocalFunctional(total)


def d_P(P, Q):
    """Adjoint action [P, Q]."""
    return schouten(P, Q)


def derivation_of(P):
    """The derivation D_P: u^{i,s} -> d_x^s dP/dtheta_i, theta_i^s -> (-1)^p d_x^s dP/du^i.

    For every density a, canonicalize(D_P(a)) == [P, int a].
    """
    P = _as_functional(P)
    p = _homogeneous_p(P)
    dens = P.density

    def fn(gen):
        kind, i, s = gen
        if s == 0:
            if kind == "u":
                return dens.variational_theta(i)
            img = dens.variational_u(i)
            return -img if p & 1 else img
        return D.image((kind, i, s - 1)).d_x()

    D = SuperDerivation(P.field, (p + 1) % 2, image_fn=fn, name="D_P")
    return D


# ---------------------------------------------------------------------------
# delta formalism


class NonSkewError(ValueError):
    pass


def _to_element(field, b):
    if isinstance(b, ThetaElement):
        return b
    return ThetaElement.coeff(field.coerce(b))


class DeltaBracket:
    """{u^i(x), u^j(y)} = sum_s B[i][j][s](x) delta^(s)(x - y).

    ``B`` maps (i, j) to a list of lambda-free densities of super degree 0.
    """

    def __init__(self, field, B=None):
        self.field = field
        self.B = {}
        for (i, j), lst in (B or {}).items():
            lst = [_to_element(field, b) for b in lst]
            while lst and lst[-1].is_zero():
                lst.pop()
            if lst:
                self.B[(i, j)] = lst

    def entry(self, i, j, s):
        lst = self.B.get((i, j), [])
        return lst[s] if s < len(lst) else ThetaElement.zero(self.field)

    def order(self):
        return max((len(v) - 1 for v in self.B.values()), default=-1)

    def adjoint_entry(self, i, j, s):
        """(B^{ij})^dagger_s = sum_{t>=s} (-1)^t C(t,s) d_x^{t-s} B^{ij}_t."""
        total = ThetaElement.zero(self.field)
        for t in range(s, len(self.B.get((i, j), []))):
            term = self.entry(i, j, t).d_x_power(t - s).scale(comb(t, s))
            total = total - term if t & 1 else total + term
        return total

    def is_skew(self):
        n = self.field.n
        top = self.order()
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                for s in range(top + 1):
                    if self.entry(i, j, s) + self.adjoint_entry(j, i, s) != 0:
                        return False
        return True

    def __eq__(self, other):
        keys = set(self.B) | set(other.B)
        top = max(self.order(), other.order())
        return all(self.entry(i, j, s) == other.entry(i, j, s)
                   for (i, j) in keys for s in range(top + 1))

    __hash__ = None

    def __repr__(self):
        parts = []
        for (i, j), lst in sorted(self.B.items()):
            for s, b in enumerate(lst):
                if b:
                    parts.append("B%d%d_%d=%s" % (i, j, s, b))
        return "DeltaBracket(%s)" % ", ".join(parts)


def delta_to_theta(B):
    """Bivector 1/2 int theta_i B^{ij}_s theta_j^s of a skew bracket."""
    if not B.is_skew():
        raise NonSkewError("bracket is not skew-symmetric")
    field = B.field
    total = ThetaElement.zero(field)
    for (i, j), lst in B.B.items():
        for s, b in enumerate(lst):
            if b:
                total = total + ThetaElement.theta(field, i, 0) * b * ThetaElement.theta(field, j, s)
    return LocalFunctional(total.scale(Fraction(1, 2)))


def theta_to_delta(P):
    """Read B^{ij}_s off as the coefficient of theta_j^s in dP/dtheta_i."""
    P = _as_functional(P)
    if _homogeneous_p(P) != 2 and not P.is_zero():
        raise ValueError("theta_to_delta needs a bivector")
    field = P.field
    n = field.n
    B = {}
    for i in range(1, n + 1):
        v = P.delta_theta(i)
        top = v.max_jet_order()
        for j in range(1, n + 1):
            lst = [v.partial_odd(j, s) for s in range(top + 1)]
            if any(lst):
                B[(i, j)] = lst
    return DeltaBracket(field, B)


# ---------------------------------------------------------------------------
# central invariants


class Deformation:
    """An infinitesimal deformation in the delta formalism.

    ``A[a][(i, j, k, l)]`` is the coefficient of eps^k delta^(l) in
    {u^i, u^j}_a (a = 1, 2).  Missing entries are zero.
    """

    def __init__(self, fs, A=None):
        self.fs = list(fs)
        self.field = self.fs[0].field
        self.n = self.field.n
        self.A = {1: {}, 2: {}}
        for a, entries in (A or {}).items():
            for idx, v in entries.items():
                v = _to_element(self.field, v)
                self.A[a][tuple(idx)] = v

    def coefficient(self, a, i, j, k, l):
        """A^{ij}_{k,l;a} as a coefficient; it must be jet free."""
        v = self.A[a].get((i, j, k, l))
        if v is None or v.is_zero():
            return self.field.zero()
        if set(v.terms) != {(0, (), ())}:
            raise ValueError("A^{%d%d}_{%d,%d;%d} is not a function of u" % (i, j, k, l, a))
        return v.terms[(0, (), ())]

    def bracket(self, a, k):
        B = {}
        for (i, j, kk, l), v in self.A[a].items():
            if kk == k:
                lst = B.setdefault((i, j), [])
                while len(lst) <= l:
                    lst.append(ThetaElement.zero(self.field))
                lst[l] = lst[l] + v
        return DeltaBracket(self.field, B)

    def bivector(self, a, k):
        return delta_to_theta(self.bracket(a, k))

    @classmethod
    def from_bivectors(cls, fs, bivectors):
        """``bivectors[a][k]`` are LocalFunctionals (eps^k parts)."""
        A = {1: {}, 2: {}}
        for a, series in bivectors.items():
            for k, P in series.items():
                B = theta_to_delta(P)
                for (i, j), lst in B.B.items():
                    for l, v in enumerate(lst):
                        if v:
                            A[a][(i, j, k, l)] = v
        return cls(fs, A)


class CentralInvariants(list):
    """List of c_i with a ``warnings`` attribute."""

    warnings: list


def central_invariants(deformation):
    """c_i = (A^{ii}_{2,3;2} - u^i A^{ii}_{2,3;1}
               + sum_{k != i} (A^{ki}_{1,2;2} - u^i A^{ki}_{1,2;1})^2 / (f^k (u^k - u^i))) / (3 (f^i)^2)."""
    dfm = deformation
    field = dfm.field
    n = dfm.n
    out = CentralInvariants()
    out.warnings = []
    for i in range(1, n + 1):
        fi = dfm.fs[i - 1]
        if fi.is_zero():
            raise ZeroDivisionError("f^%d vanishes" % i)
        ui = field.u(i)
        total = dfm.coefficient(2, i, i, 2, 3) - ui * dfm.coefficient(1, i, i, 2, 3)
        for k in range(1, n + 1):
            if k == i:
                continue
            a = dfm.coefficient(2, k, i, 1, 2) - ui * dfm.coefficient(1, k, i, 1, 2)
            if not a.is_zero():
                total = total + a * a / (dfm.fs[k - 1] * (field.u(k) - ui))
        c = total / (fi * fi * 3)
        for j in range(1, n + 1):
            if j != i and not c.d_du(j).is_zero():
                out.warnings.append("c_%d depends on u^%d" % (i, j))
        out.append(c)
    return out


def random_density(field, p, d, rng=None, n_terms=4, coeff_pool=None):
    return random_element(field, p, d, n_terms=n_terms, rng=rng or random.Random(0),
                          coeff_pool=coeff_pool)
