"""Homotopy operators and projections for the first spectral sequences.

The pieces of D_lambda by deg_u, the homotopies h_{i,s}, the projections
p_{i,s}, p_I, p_II and p = p_II o p_I, the space B (cohomology of
Delta_{-1}) with its inclusion, the page-one differential Delta'_{0,1}, and
the operators d-hat_i, D_k acting on the summands of B.

Operators on elements are plain callables ``ThetaElement -> ThetaElement``.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import (
    SuperDerivation,
    ThetaElement,
    _add_term,
    key_deg_theta1,
    key_deg_u,
    key_std_degree,
)

__all__ = [
    "delta_minus1",
    "degree_split",
    "delta_0",
    "delta_01",
    "delta_01_hat",
    "integrate_u",
    "pi_u",
    "pi_theta",
    "homotopy_h",
    "projection_p_is",
    "projection_pI",
    "projection_p_pair",
    "projection_pII",
    "projection_p",
    "tag_monomial",
    "BElement",
    "NotInBError",
    "to_B",
    "inclusion_i",
    "delta_01_prime",
    "d_hat",
    "D_op",
    "delta_01_tilde",
    "weight",
    "weight_basis",
]


def _u_minus_lam(field, i):
    """u^i - lambda as an element."""
    return ThetaElement.coeff(field.u(i)) - ThetaElement.lam(field)


# ---------------------------------------------------------------------------
# pieces of D_lambda


def delta_minus1(pencil):
    """Delta_{-1}: u^{i,s} -> (u^i - lambda) f^i theta_i^{s+1} for s >= 1."""
    field = pencil.field

    def fn(gen):
        kind, i, s = gen
        if kind == "u" and s >= 1:
            return (_u_minus_lam(field, i) * ThetaElement.theta(field, i, s + 1)).scale(pencil.fs[i - 1])
        return None

    return SuperDerivation(field, 1, image_fn=fn, name="Delta_-1", acts_on_coefficients=False)


def degree_split(pencil, shifts):
    """Components Delta_k of D_lambda by deg_u shift k, for k in ``shifts``."""
    return pencil.Dl.split(key_deg_u, shifts)


def delta_0(pencil):
    return degree_split(pencil, [0])[0]


def delta_01(pencil):
    """The part of Delta_0 raising deg_{theta^1} by one."""
    return delta_0(pencil).split(key_deg_theta1, [1])[1]


def delta_01_hat(pencil):
    """The reduced form of Delta_{0,1} on B (same action as p o Delta_{0,1} o i)."""
    field = pencil.fs[0].field
    n = pencil.n
    fs = pencil.fs
    half = Fraction(1, 2)

    def th(i, s):
        return ThetaElement.theta(field, i, s)

    def a(j, i):
        # f^j d_j f^i / f^i
        return fs[j - 1] * fs[i - 1].d_du(j) / fs[i - 1]

    def fn(gen):
        kind, i, s = gen
        fi = fs[i - 1]
        if kind == "u" and s == 0:
            return (_u_minus_lam(field, i) * th(i, 1)).scale(fi)
        if kind == "u":
            x = ThetaElement.u(field, i, s)
            out = (x * th(i, 1)).scale(fi * Fraction(s + 2, 2))
            for j in range(1, n + 1):
                c = a(j, i)
                if not c.is_zero():
                    out = out - (_u_minus_lam(field, j) * x * th(j, 1)).scale(c * (half * s))
            return out
        # theta_i^s
        out = (th(i, 1) * th(i, s)).scale(fi * Fraction(s - 1, 2))
        for j in range(1, n + 1):
            c = a(j, i)
            if not c.is_zero():
                out = out - (_u_minus_lam(field, j) * th(j, 1) * th(i, s)).scale(c * (half * (s + 1)))
        if s == 0:
            for j in range(1, n + 1):
                c = fs[j - 1].d_du(i)
                if not c.is_zero():
                    out = out - (_u_minus_lam(field, j) * th(j, 1) * th(j, 0)).scale(c * half)
                c = a(j, i)
                if not c.is_zero():
                    out = out + (_u_minus_lam(field, j) * th(i, 1) * th(j, 0)).scale(c * half)
        return out

    return SuperDerivation(field, 1, image_fn=fn, name="Delta_01_hat")


# ---------------------------------------------------------------------------
# elementary maps


def integrate_u(x, i, s):
    """Antiderivative in u^{i,s} with zero integration constant."""
    gen = (i, s)
    out = {}
    for (lam, ev, od), c in x.terms.items():
        e = ev.count(gen)
        _add_term(out, (lam, tuple(sorted(ev + (gen,))), od), c / (e + 1) if e else c)
    return ThetaElement(x.field, out)


def pi_u(x, i, s):
    gen = (i, s)
    return x.filter(lambda k: gen not in k[1])


def pi_theta(x, i, s):
    gen = (s, i)
    return x.filter(lambda k: gen not in k[2])


def homotopy_h(pencil, i, s):
    """h_{i,s} = sigma_i (1/(u^i - lambda)) (1/f^i) d/dtheta_i^{s+1} int du^{i,s}."""
    inv_f = 1 / pencil.fs[i - 1]

    def h(x):
        a = integrate_u(x, i, s).partial_odd(i, s + 1).scale(inv_f)
        return -a.polar_free_divide(i)

    return h


def projection_p_is(pencil, i, s):
    """p_{i,s} = pi_{u^{i,s}} pi_{theta_i^{s+1}}
               + (sum_{j, t>=1} f^j/f^i theta_j^{t+1} d/dtheta_i^{s+1} d/du^{j,t} int du^{i,s}) pi_{lambda-u^i}."""
    field = pencil.field
    n = pencil.n
    fi = pencil.fs[i - 1]

    def p(x):
        first = pi_theta(pi_u(x, i, s), i, s + 1)
        y = integrate_u(x.eval_lambda_at_u(i), i, s).partial_odd(i, s + 1)
        if not y:
            return first
        out = first
        top = y.max_jet_order()
        for j in range(1, n + 1):
            ratio = pencil.fs[j - 1] / fi
            for t in range(1, top + 1):
                z = y.partial_even(j, t)
                if z:
                    out = out + (ThetaElement.theta(field, j, t + 1) * z).scale(ratio)
        return out

    return p


def _degree_bound(x):
    return max((key_std_degree(k) for k in x.terms), default=0)


def projection_pI(pencil):
    """p_I: p_{i,s} for ascending s, and ascending i within each s."""

    def p(x):
        for s in range(1, _degree_bound(x) + 1):
            for i in range(1, pencil.n + 1):
                x = projection_p_is(pencil, i, s)(x)
        return x

    return p


def projection_p_pair(i, s, j, t):
    """p_{i,s;j,t} = pi_A + pi_B - pi_A pi_B with pi_A = pi_{u^{i,s}} pi_{theta_i^{s+1}}."""

    def p(x):
        a = pi_theta(pi_u(x, i, s), i, s + 1)
        b = pi_theta(pi_u(x, j, t), j, t + 1)
        ab = pi_theta(pi_u(a, j, t), j, t + 1)
        return a + b - ab

    return p


def projection_pII(pencil):
    def p(x):
        d = _degree_bound(x)
        n = pencil.n
        for s in range(1, d + 1):
            for t in range(1, d + 1):
                for i in range(1, n + 1):
                    for j in range(i + 1, n + 1):
                        x = projection_p_pair(i, s, j, t)(x)
        return x

    return p


def projection_p(pencil):
    pI = projection_pI(pencil)
    pII = projection_pII(pencil)
    return lambda x: pII(pI(x))


# ---------------------------------------------------------------------------
# subspaces


def _nontrivial_indices(key):
    idx = {i for (i, s) in key[1]}
    idx |= {i for (s, i) in key[2] if s >= 2}
    return idx


def tag_monomial(key):
    """'C' (only theta^0, theta^1), ('C', i) (nontrivial in index i only) or 'M' (mixed)."""
    idx = _nontrivial_indices(key)
    if not idx:
        return "C"
    if len(idx) == 1:
        return ("C", idx.pop())
    return "M"


def split_by_tag(x):
    parts = {}
    for k, c in x.terms.items():
        parts.setdefault(tag_monomial(k), {})[k] = c
    return {t: ThetaElement(x.field, d) for t, d in parts.items()}


class NotInBError(ValueError):
    pass


class BElement:
    """An element of B = C[lambda] (+) sum_i d-hat_i(C_i)[lambda]/(lambda - u^i).

    ``c_part`` lies in C[lambda]; ``parts[i]`` is a lambda-free element of
    d-hat_i(C_i), the class evaluated at lambda = u^i.
    """

    def __init__(self, field, c_part=None, parts=None, check=True):
        self.field = field
        self.c_part = c_part if c_part is not None else ThetaElement.zero(field)
        self.parts = {i: v for i, v in (parts or {}).items() if v}
        if check:
            self.validate()

    def validate(self):
        for k in self.c_part.terms:
            if tag_monomial(k) != "C":
                raise NotInBError("C[lambda] component has a nontrivial monomial")
        for i, v in self.parts.items():
            for k in v.terms:
                if k[0] != 0:
                    raise NotInBError("summand %d must be evaluated at lambda = u^%d" % (i, i))
                if tag_monomial(k) != ("C", i):
                    raise NotInBError("summand %d has a monomial outside C_%d^nt" % (i, i))
            if d_hat(self.field, i)(v):
                raise NotInBError("summand %d is not d-hat_%d closed" % (i, i))

    def __eq__(self, other):
        if self.c_part != other.c_part:
            return False
        keys = set(self.parts) | set(other.parts)
        z = ThetaElement.zero(self.field)
        return all(self.parts.get(i, z) == other.parts.get(i, z) for i in keys)

    __hash__ = None

    def __add__(self, other):
        parts = dict(self.parts)
        for i, v in other.parts.items():
            parts[i] = parts[i] + v if i in parts else v
        return BElement(self.field, self.c_part + other.c_part, parts, check=False)

    def summand(self, which):
        """Restrict to one summand: 'C' or an index i."""
        if which == "C":
            return BElement(self.field, self.c_part, {}, check=False)
        return BElement(self.field, None, {which: self.parts.get(which)} if which in self.parts else {},
                        check=False)

    def support(self):
        out = set(self.parts)
        if self.c_part:
            out.add("C")
        return out

    def is_zero(self):
        return not self.c_part and not self.parts

    def __repr__(self):
        items = ["C: %s" % self.c_part] + ["%d: %s" % (i, v) for i, v in sorted(self.parts.items())]
        return "BElement(%s)" % "; ".join(items)


def inclusion_i(b):
    """Identity on C[lambda]; the standard inclusion on each d-hat_i summand."""
    out = b.c_part
    for v in b.parts.values():
        out = out + v
    return out


def to_B(x, check=True):
    """Read a p-image (a Delta_{-1}-cocycle representative) as an element of B."""
    parts = split_by_tag(x)
    if "M" in parts and check:
        raise NotInBError("mixed monomials present")
    field = x.field
    c_part = parts.get("C", ThetaElement.zero(field))
    summands = {}
    for tag, v in parts.items():
        if isinstance(tag, tuple):
            i = tag[1]
            summands[i] = v.eval_lambda_at_u(i)
    return BElement(field, c_part, summands, check=check)


def delta_01_prime(pencil, raw=False):
    """Delta'_{0,1} = p o Delta-hat_{0,1} o i on B (``raw=True``: p o Delta_{0,1} o i)."""
    op = delta_01(pencil) if raw else delta_01_hat(pencil)
    p = projection_p(pencil)

    def d(b):
        if not isinstance(b, BElement):
            raise NotInBError("argument must be a BElement")
        b.validate()
        return to_B(p(op(inclusion_i(b))))

    return d


# ---------------------------------------------------------------------------
# the summands B_i


def d_hat(field, i):
    """d-hat_i = sum_{s>=1} theta_i^{s+1} d/du^{i,s}."""

    def fn(gen):
        kind, j, s = gen
        if kind == "u" and j == i and s >= 1:
            return ThetaElement.theta(field, i, s + 1)
        return None

    return SuperDerivation(field, 1, image_fn=fn, name="dhat_%d" % i, acts_on_coefficients=False)


def D_op(pencil, k, i):
    """The even derivation D_k relative to the summand index i."""
    field = pencil.field
    n = pencil.n
    fs = pencil.fs
    half = Fraction(1, 2)
    fk = fs[k - 1]
    uki = field.u(k) - field.u(i)

    def b(j):
        # f^k d_k f^j / f^j
        return fk * fs[j - 1].d_du(k) / fs[j - 1]

    def fn(gen):
        kind, j, s = gen
        if kind == "u" and s == 0:
            if j == k and not uki.is_zero():
                return ThetaElement.coeff(uki * fk)
            return None
        if kind == "u":
            c = -(uki * b(j)) * (half * s)
            if j == k:
                c = c + fk * Fraction(s + 2, 2)
            return ThetaElement.u(field, j, s).scale(c) if not c.is_zero() else None
        x = ThetaElement.theta(field, j, s)
        if s == 1:
            c = -(uki * b(j))
            return x.scale(c) if not c.is_zero() else None
        if s >= 2:
            c = -(uki * b(j)) * (half * (s + 1))
            if j == k:
                c = c + fk * Fraction(s - 1, 2)
            return x.scale(c) if not c.is_zero() else None
        # theta_j^0
        out = ThetaElement.theta(field, k, 0).scale(-(uki * fk.d_du(j)) * half)
        out = out - x.scale(uki * b(j) * half)
        if j == k:
            out = out - x.scale(fk * half)
            for m in range(1, n + 1):
                c = (field.u(m) - field.u(i)) * fs[m - 1] * fk.d_du(m) / fk
                if not c.is_zero():
                    out = out + ThetaElement.theta(field, m, 0).scale(c * half)
        return out

    return SuperDerivation(field, 0, image_fn=fn, name="D_%d(i=%d)" % (k, i))


def delta_01_tilde(pencil, i):
    """sum_k theta_k^1 D_k on the summand d-hat_i(C_i)."""
    ops = [D_op(pencil, k, i) for k in range(1, pencil.n + 1)]
    field = pencil.field

    def d(x):
        out = ThetaElement.zero(field)
        for k, op in enumerate(ops, start=1):
            out = out + ThetaElement.theta(field, k, 1) * op(x)
        return out

    return d


def weight(key, i):
    """Weight of a monomial in u^{i,>=1}, theta_i^{>=2}: (s+2)/2 and (s-1)/2."""
    w = Fraction(0)
    for j, s in key[1]:
        if j != i:
            raise ValueError("not a monomial of M_i")
        w += Fraction(s + 2, 2)
    for s, j in key[2]:
        if j != i or s < 2:
            raise ValueError("not a monomial of M_i")
        w += Fraction(s - 1, 2)
    return w


def weight_basis(i, w):
    """Monomial keys spanning M_i^w (weights are positive, so the basis is finite)."""
    w2 = Fraction(w) * 2
    if w2.denominator != 1:
        raise ValueError("w must be a half-integer")
    w2 = int(w2)
    out = []

    def odd_sets(budget, start):
        # distinct theta_i^s (s >= start), each costing s - 1
        yield ()
        s = start
        while s - 1 <= budget:
            for rest in odd_sets(budget - (s - 1), s + 1):
                yield ((s, i),) + rest
            s += 1

    def even_multisets(budget, top):
        if budget == 0:
            yield ()
            return
        for s in range(min(top, budget - 2), 0, -1):
            for rest in even_multisets(budget - (s + 2), s):
                yield ((i, s),) + rest

    for od in odd_sets(w2, 2):
        rest = w2 - sum(s - 1 for s, _ in od)
        for ev in even_multisets(rest, rest):
            if od or ev:
                out.append((0, tuple(sorted(ev)), od))
    out.sort()
    return out
