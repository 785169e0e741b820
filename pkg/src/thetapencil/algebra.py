"""The graded supercommutative algebra of densities and its derivations.

Generators are even jets u^{i,s} (s >= 1), odd jets theta_i^s (s >= 0) and a
central even parameter lambda.  Coefficients live in a
:class:`~thetapencil.coeffs.CoeffField`; the coordinates u^i themselves are
coefficients, so "u^{i,0}" is only a direction of differentiation.

A monomial is stored as a key ``(lam, evens, odds)``:

* ``lam``   -- power of lambda,
* ``evens`` -- sorted tuple of ``(i, s)`` pairs, repeated by multiplicity,
* ``odds``  -- sorted tuple of ``(s, i)`` pairs (odd generators are ordered by
  jet order first, then index), no repetitions.

The public API always names generators as ``(i, s)``.
"""

from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction

from .coeffs import CoeffField, CoeffRat

__all__ = [
    "ThetaElement",
    "LambdaElement",
    "SuperDerivation",
    "MissingImageError",
    "key_std_degree",
    "key_super_degree",
    "key_deg_u",
    "key_deg_theta1",
    "mul_keys",
    "ONE_KEY",
]

ONE_KEY = (0, (), ())


class MissingImageError(KeyError):
    """A derivation was applied to a generator it has no image for."""


# ---------------------------------------------------------------------------
# monomial keys


def key_std_degree(key):
    return sum(s for _, s in key[1]) + sum(s for s, _ in key[2])


def key_super_degree(key):
    return len(key[2])


def key_deg_u(key):
    return len(key[1])


def key_deg_theta1(key):
    return sum(1 for s, _ in key[2] if s == 1)


def _sort_odds(seq):
    """Sort odd generators; return ``(sign, tuple)`` or ``(0, None)``."""
    seq = list(seq)
    inv = 0
    n = len(seq)
    for a in range(n):
        x = seq[a]
        for b in range(a + 1, n):
            y = seq[b]
            if x == y:
                return 0, None
            if x > y:
                inv += 1
    seq.sort()
    return (-1 if inv & 1 else 1), tuple(seq)


def mul_keys(k1, k2):
    """Product of two monomials: ``(sign, key)``; sign 0 means the product vanishes."""
    ev1, ev2 = k1[1], k2[1]
    if not ev1:
        evens = ev2
    elif not ev2:
        evens = ev1
    else:
        evens = tuple(sorted(ev1 + ev2))
    o1, o2 = k1[2], k2[2]
    if not o2:
        return 1, (k1[0] + k2[0], evens, o1)
    if not o1:
        return 1, (k1[0] + k2[0], evens, o2)
    inv = 0
    for y in o2:
        for x in o1:
            if x == y:
                return 0, None
            if x > y:
                inv += 1
    return (-1 if inv & 1 else 1), (k1[0] + k2[0], evens, tuple(sorted(o1 + o2)))


def _remove_even(evens, gen):
    lst = list(evens)
    lst.remove(gen)
    return tuple(lst)


def _render_key(key):
    lam, evens, odds = key
    factors = []
    if lam:
        factors.append("L" if lam == 1 else "L^%d" % lam)
    for (i, s), e in sorted(Counter(evens).items()):
        name = "u%d_%d" % (i, s)
        factors.append(name if e == 1 else "%s^%d" % (name, e))
    for s, i in odds:
        factors.append("th%d_%d" % (i, s))
    return factors


# ---------------------------------------------------------------------------
# elements


class ThetaElement:
    """A finite sum of coefficient times monomial, possibly involving lambda.

    Immutable by convention: every operation returns a new element.
    """

    __slots__ = ("field", "terms")

    def __init__(self, field, terms=None):
        self.field = field
        self.terms = terms if terms is not None else {}

    # constructors ------------------------------------------------------------
    @classmethod
    def zero(cls, field):
        return cls(field, {})

    @classmethod
    def one(cls, field):
        return cls(field, {ONE_KEY: field.one()})

    @classmethod
    def const(cls, field, value):
        c = field.coerce(value)
        return cls(field, {ONE_KEY: c} if not c.is_zero() else {})

    @classmethod
    def coeff(cls, c):
        return cls(c.field, {ONE_KEY: c} if not c.is_zero() else {})

    @classmethod
    def u(cls, field, i, s):
        """u^{i,s}; for s == 0 the coordinate u^i as a coefficient."""
        if s == 0:
            return cls.coeff(field.u(i))
        return cls(field, {(0, ((i, s),), ()): field.one()})

    @classmethod
    def theta(cls, field, i, s):
        return cls(field, {(0, (), ((s, i),)): field.one()})

    @classmethod
    def lam(cls, field, power=1):
        return cls(field, {(power, (), ()): field.one()})

    @classmethod
    def monomial(cls, field, key, coeff=None):
        return cls(field, {key: field.one() if coeff is None else coeff})

    @classmethod
    def from_generators(cls, field, evens=(), odds=(), lam=0, coeff=None):
        """Monomial from generator lists ``[(i, s), ...]``; odd order gives the sign."""
        sign, od = _sort_odds([(s, i) for (i, s) in odds])
        if sign == 0:
            return cls.zero(field)
        c = field.one() if coeff is None else field.coerce(coeff)
        if sign < 0:
            c = -c
        key = (lam, tuple(sorted(evens)), od)
        return cls(field, {key: c} if not c.is_zero() else {})

    def _new(self, terms):
        return ThetaElement(self.field, terms)

    # basic protocol ----------------------------------------------------------
    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def keys(self):
        return self.terms.keys()

    def coefficient(self, key):
        return self.terms.get(key, self.field.zero())

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def copy(self):
        return self._new(dict(self.terms))

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, ThetaElement):
            return NotImplemented
        if self.terms.keys() != other.terms.keys():
            return False
        return all(c == other.terms[k] for k, c in self.terms.items())

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None

    # arithmetic --------------------------------------------------------------
    def _as_element(self, other):
        if isinstance(other, ThetaElement):
            return other
        if isinstance(other, (int, Fraction)):
            return ThetaElement.const(self.field, other)
        if isinstance(other, CoeffRat):
            return ThetaElement.coeff(other)
        return None

    def __add__(self, other):
        other = self._as_element(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        _accumulate(terms, other.terms, 1)
        return self._new(terms)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._as_element(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        _accumulate(terms, other.terms, -1)
        return self._new(terms)

    def __rsub__(self, other):
        other = self._as_element(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def scale(self, c):
        """Multiply by a coefficient (or rational number)."""
        if not isinstance(c, CoeffRat):
            c = self.field.coerce(c)
        if c.is_zero():
            return self._new({})
        if c.is_one():
            return self
        out = {}
        for k, v in self.terms.items():
            w = v * c
            if not w.is_zero():
                out[k] = w
        return self._new(out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CoeffRat)):
            return self.scale(other)
        if not isinstance(other, ThetaElement):
            return NotImplemented
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                sign, key = mul_keys(k1, k2)
                if sign:
                    c = c1 * c2
                    _add_term(out, key, c if sign > 0 else -c)
        return self._new(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CoeffRat)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k):
        result = ThetaElement.one(self.field)
        for _ in range(k):
            result = result * self
        return result

    def mul_key(self, key, sign=1):
        """Multiply on the right by a bare monomial."""
        out = {}
        for k, c in self.terms.items():
            s, nk = mul_keys(k, key)
            if s:
                _add_term(out, nk, c if s * sign > 0 else -c)
        return self._new(out)

    # gradings ------------------------------------------------------------------
    def gradings(self):
        """Set of ``(p, d)`` bidegrees of the terms."""
        return {(key_super_degree(k), key_std_degree(k)) for k in self.terms}

    def bidegree(self):
        """The common ``(p, d)`` of a homogeneous nonzero element."""
        g = self.gradings()
        if len(g) != 1:
            raise ValueError("element is not bihomogeneous: %s" % sorted(g))
        return next(iter(g))

    def super_parity(self):
        ps = {key_super_degree(k) % 2 for k in self.terms}
        if len(ps) > 1:
            raise ValueError("element has mixed parity")
        return ps.pop() if ps else 0

    def lambda_degree(self):
        return max((k[0] for k in self.terms), default=-1)

    def filter(self, predicate):
        return self._new({k: c for k, c in self.terms.items() if predicate(k)})

    def homogeneous_part(self, grading, value):
        return self.filter(lambda k: grading(k) == value)

    def map_coefficients(self, fn):
        out = {}
        for k, c in self.terms.items():
            w = fn(c)
            if not w.is_zero():
                out[k] = w
        return self._new(out)

    # lambda ------------------------------------------------------------------
    def lambda_coefficients(self):
        """List of lambda-free elements ``[a_0, a_1, ...]`` with self = sum a_k L^k."""
        deg = self.lambda_degree()
        parts = [dict() for _ in range(deg + 1)]
        for (lam, ev, od), c in self.terms.items():
            parts[lam][(0, ev, od)] = c
        return [self._new(p) for p in parts]

    @classmethod
    def from_lambda_coefficients(cls, field, coeffs):
        out = {}
        for lam, a in enumerate(coeffs):
            for (_, ev, od), c in a.terms.items():
                _add_term(out, (lam, ev, od), c)
        return cls(field, out)

    def times_lambda(self, power=1):
        return self._new({(k[0] + power, k[1], k[2]): c for k, c in self.terms.items()})

    def eval_lambda(self, value):
        """Substitute lambda := value (a coefficient)."""
        if not isinstance(value, CoeffRat):
            value = self.field.coerce(value)
        out = {}
        for (lam, ev, od), c in self.terms.items():
            _add_term(out, (0, ev, od), c * value ** lam if lam else c)
        return self._new(out)

    def eval_lambda_at_u(self, i):
        return self.eval_lambda(self.field.u(i))

    def polar_free_divide(self, i):
        """(a(L) - a(u^i)) / (L - u^i), computed monomial by monomial."""
        x = self.field.u(i)
        out = {}
        for (lam, ev, od), c in self.terms.items():
            if lam == 0:
                continue
            xpow = self.field.one()
            for m in range(lam - 1, -1, -1):
                _add_term(out, (m, ev, od), c * xpow)
                xpow = xpow * x
        return self._new(out)

    # differential calculus -------------------------------------------------------
    def d_x(self):
        """The total derivative: u^{i,s} -> u^{i,s+1}, theta_i^s -> theta_i^{s+1}."""
        field = self.field
        n = field.n
        out = {}
        for key, c in self.terms.items():
            lam, ev, od = key
            if not c.is_constant():
                for j in range(1, n + 1):
                    dc = c.d_du(j)
                    if not dc.is_zero():
                        _add_term(out, (lam, tuple(sorted(ev + ((j, 1),))), od), dc)
            for (i, s), e in Counter(ev).items():
                nev = list(ev)
                nev.remove((i, s))
                nev.append((i, s + 1))
                _add_term(out, (lam, tuple(sorted(nev)), od), c * e if e != 1 else c)
            for pos, (s, i) in enumerate(od):
                seq = list(od)
                seq[pos] = (s + 1, i)
                sign, nod = _sort_odds(seq)
                if sign:
                    _add_term(out, (lam, ev, nod), c if sign > 0 else -c)
        return self._new(out)

    def d_x_power(self, k):
        a = self
        for _ in range(k):
            a = a.d_x()
        return a

    def partial_coeff(self, j):
        """d/du^j acting on coefficients only."""
        out = {}
        for key, c in self.terms.items():
            dc = c.d_du(j)
            if not dc.is_zero():
                out[key] = dc
        return self._new(out)

    def partial_even(self, i, s):
        """d/du^{i,s}; for s == 0 the coefficient derivative d/du^i."""
        if s == 0:
            return self.partial_coeff(i)
        gen = (i, s)
        out = {}
        for (lam, ev, od), c in self.terms.items():
            e = ev.count(gen)
            if e:
                _add_term(out, (lam, _remove_even(ev, gen), od), c * e if e != 1 else c)
        return self._new(out)

    def partial_odd(self, i, s):
        """Left derivative d/dtheta_i^s."""
        gen = (s, i)
        out = {}
        for (lam, ev, od), c in self.terms.items():
            if gen in od:
                pos = od.index(gen)
                nod = od[:pos] + od[pos + 1:]
                _add_term(out, (lam, ev, nod), -c if pos & 1 else c)
        return self._new(out)

    def max_jet_order(self):
        m = -1
        for _, ev, od in self.terms:
            for _, s in ev:
                m = max(m, s)
            for s, _ in od:
                m = max(m, s)
        return m

    def variational_u(self, i):
        """delta/delta u^i = sum_s (-d_x)^s d/du^{i,s}."""
        total = self.partial_coeff(i)
        for s in range(1, self.max_jet_order() + 1):
            part = self.partial_even(i, s)
            if part:
                part = part.d_x_power(s)
                total = total - part if s & 1 else total + part
        return total

    def variational_theta(self, i):
        """delta/delta theta_i = sum_s (-d_x)^s d/dtheta_i^s."""
        total = self.partial_odd(i, 0)
        for s in range(1, self.max_jet_order() + 1):
            part = self.partial_odd(i, s)
            if part:
                part = part.d_x_power(s)
                total = total - part if s & 1 else total + part
        return total

    # substitutions ----------------------------------------------------------------
    def substitute_f(self, functions, target=None):
        """Replace generic jets by derivatives of concrete functions."""
        target = target or CoeffField.concrete(self.field.n)
        out = {}
        for k, c in self.terms.items():
            w = c.substitute_f(functions, target)
            if not w.is_zero():
                out[k] = w
        return ThetaElement(target, out)

    def promote(self, field):
        return ThetaElement(field, {k: c.promote(field) for k, c in self.terms.items()})

    # rendering -------------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kc: kc[0])

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.sorted_terms():
            factors = _render_key(key)
            if c.is_constant():
                v = c.constant_value()
                neg = v < 0
                lead = [str(abs(v))] if (abs(v) != 1 or not factors) else []
                body = "*".join(lead + factors)
            else:
                neg = False
                text = str(c)
                if text.startswith("-") and " " not in str(-c):
                    neg, text = True, str(-c)
                if " " in text or text.startswith("-"):
                    text = "(%s)" % text
                body = "*".join([text] + factors)
            parts.append((neg, body))
        out = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, body in parts[1:]:
            out += (" - " if neg else " + ") + body
        return out

    def __repr__(self):
        return "ThetaElement(%s)" % self


LambdaElement = ThetaElement


def _add_term(terms, key, c):
    old = terms.get(key)
    if old is None:
        if not c.is_zero():
            terms[key] = c
    else:
        new = old + c
        if new.is_zero():
            del terms[key]
        else:
            terms[key] = new


def _accumulate(terms, other, sign):
    for k, c in other.items():
        _add_term(terms, k, c if sign > 0 else -c)


# ---------------------------------------------------------------------------
# derivations


class SuperDerivation:
    """A derivation of the algebra given by its values on generators.

    Generators are ``('u', i, s)`` for s >= 0 -- ``s == 0`` is the
    coefficient direction, acting through ``d/du^i`` on coefficients -- and
    ``('th', i, s)`` for s >= 0.  Lambda is a constant.  ``parity`` is 1 for
    odd derivations.  Images are given either as an explicit dictionary (a
    missing generator then raises :class:`MissingImageError` unless
    ``default_zero``) or as a function returning an element or ``None``.
    """

    def __init__(self, field, parity, images=None, image_fn=None, name=None,
                 default_zero=False, acts_on_coefficients=True):
        if (images is None) == (image_fn is None):
            raise ValueError("give exactly one of images / image_fn")
        self.field = field
        self.parity = parity
        self.name = name or "D"
        self._images = images
        self._fn = image_fn
        self._cache = {}
        self.default_zero = default_zero
        self.acts_on_coefficients = acts_on_coefficients

    def __repr__(self):
        return "SuperDerivation(%s, parity=%d)" % (self.name, self.parity)

    def image(self, gen):
        img = self._cache.get(gen)
        if img is not None:
            return img
        if self._images is not None:
            if gen in self._images:
                img = self._images[gen]
            elif self.default_zero:
                img = None
            else:
                raise MissingImageError(gen)
        else:
            img = self._fn(gen)
        if img is None:
            img = ThetaElement.zero(self.field)
        self._cache[gen] = img
        return img

    def apply(self, x):
        field = x.field
        n = field.n
        out = {}
        for key, c in x.terms.items():
            lam, ev, od = key
            if self.acts_on_coefficients and not c.is_constant():
                rest = key
                for j in range(1, n + 1):
                    img = self.image(("u", j, 0))
                    if not img.terms:
                        continue
                    dc = c.d_du(j)
                    if dc.is_zero():
                        continue
                    _apply_image(out, img, rest, dc)
            for (i, s), e in Counter(ev).items():
                img = self.image(("u", i, s))
                if not img.terms:
                    continue
                rest = (lam, _remove_even(ev, (i, s)), od)
                _apply_image(out, img, rest, c * e if e != 1 else c)
            for pos, (s, i) in enumerate(od):
                img = self.image(("th", i, s))
                if not img.terms:
                    continue
                rest = (lam, ev, od[:pos] + od[pos + 1:])
                _apply_image(out, img, rest, -c if pos & 1 else c)
        return ThetaElement(field, out)

    __call__ = apply

    # algebra of derivations ------------------------------------------------------
    def _combine(self, other, a, b, name):
        if self.parity != other.parity:
            raise ValueError("cannot add derivations of different parity")

        def fn(gen):
            return self.image(gen) * a + other.image(gen) * b

        return SuperDerivation(self.field, self.parity, image_fn=fn, name=name,
                               acts_on_coefficients=self.acts_on_coefficients or other.acts_on_coefficients)

    def __add__(self, other):
        return self._combine(other, 1, 1, "(%s+%s)" % (self.name, other.name))

    def __sub__(self, other):
        return self._combine(other, 1, -1, "(%s-%s)" % (self.name, other.name))

    def scaled(self, c, name=None):
        return SuperDerivation(self.field, self.parity, image_fn=lambda g: self.image(g) * c,
                               name=name or "%s*%s" % (c, self.name),
                               acts_on_coefficients=self.acts_on_coefficients)

    def times_lambda(self, name=None):
        return SuperDerivation(self.field, self.parity, image_fn=lambda g: self.image(g).times_lambda(),
                               name=name or "L*%s" % self.name,
                               acts_on_coefficients=self.acts_on_coefficients)

    def split(self, grading, shifts=None):
        """Split into homogeneous components for an additive grading on keys.

        Returns ``{shift: SuperDerivation}``; the shift of an image term is
        ``grading(term) - grading(generator)``.  ``shifts`` restricts the
        components returned (all shifts found on the supplied generators are
        otherwise unknown in advance, so it must be given).
        """
        def gen_degree(gen):
            kind, i, s = gen
            if kind == "u":
                if s == 0:
                    return grading(ONE_KEY)
                return grading((0, ((i, s),), ()))
            return grading((0, (), ((s, i),)))

        out = {}
        for shift in shifts:
            def fn(gen, shift=shift):
                base = gen_degree(gen)
                return self.image(gen).filter(lambda k: grading(k) - base == shift)

            out[shift] = SuperDerivation(self.field, self.parity, image_fn=fn,
                                         name="%s[%+d]" % (self.name, shift),
                                         acts_on_coefficients=self.acts_on_coefficients)
        return out


def _apply_image(out, img, rest, c):
    """out += c * img * rest (image placed at the left of the rest monomial)."""
    for k, ci in img.terms.items():
        sign, key = mul_keys(k, rest)
        if sign:
            v = ci * c
            _add_term(out, key, v if sign > 0 else -v)


def graded_commutator(d1, d2, x):
    """[d1, d2](x) = d1 d2 x - (-1)^{|d1||d2|} d2 d1 x."""
    a = d1(d2(x))
    b = d2(d1(x))
    return a + b if (d1.parity and d2.parity) else a - b


def total_derivative(field):
    """The total derivative as a :class:`SuperDerivation` (even)."""

    def fn(gen):
        kind, i, s = gen
        if kind == "u":
            return ThetaElement.u(field, i, s + 1)
        return ThetaElement.theta(field, i, s + 1)

    return SuperDerivation(field, 0, image_fn=fn, name="d_x")


def _odd_sets(n, p, max_sum, start=(0, 1)):
    """Increasing tuples of p odd generators (s, i) >= start with sum of s <= max_sum."""
    if p == 0:
        yield ()
        return
    s0, i0 = start
    s = s0
    while s * p <= max_sum:
        for i in range(i0 if s == s0 else 1, n + 1):
            nxt = (s, i + 1) if i < n else (s + 1, 1)
            for rest in _odd_sets(n, p - 1, max_sum - s, nxt):
                yield ((s, i),) + rest
        s += 1


def _even_multisets(n, d, top=None):
    """Non-increasing tuples of (s, i), s >= 1, with sum of s == d."""
    if d == 0:
        yield ()
        return
    top = top or (d, n)
    for s in range(min(d, top[0]), 0, -1):
        for i in range(n, 0, -1):
            if (s, i) > top:
                continue
            for rest in _even_multisets(n, d - s, (s, i)):
                yield ((s, i),) + rest


def jet_monomials(n, p, d):
    """All lambda-free monomial keys of super degree p and standard degree d."""
    out = []
    for od in _odd_sets(n, p, d):
        rem = d - sum(s for s, _ in od)
        for ev in _even_multisets(n, rem):
            out.append((0, tuple(sorted((i, s) for s, i in ev)), od))
    out.sort()
    return out


def random_element(field, p, d, n_terms=4, rng=None, lam_max=0, coeff_pool=None):
    """A random bihomogeneous element of bidegree (p, d).

    Coefficients are drawn from ``coeff_pool`` (list of coefficients) or small
    integers.  Returns zero when the bidegree is empty.
    """
    rng = rng or random.Random(0)
    keys = jet_monomials(field.n, p, d)
    if not keys:
        return ThetaElement.zero(field)
    out = {}
    for _ in range(n_terms):
        lam, ev, od = rng.choice(keys)
        lam = rng.randint(0, lam_max)
        c = field.const(rng.randint(-3, 3) or 1)
        if coeff_pool:
            c = c * rng.choice(coeff_pool)
        _add_term(out, (lam, ev, od), c)
    return ThetaElement(field, out)
