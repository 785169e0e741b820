"""Exact coefficient field.

Coefficients are rational functions over Q in the canonical coordinates
``u1..un`` and, in generic mode, in formal jet symbols ``f{i}_J`` standing
for the partial derivatives of the unknown functions f^i.  Polynomials are
``flint.fmpq_mpoly`` objects; a :class:`CoeffRat` keeps numerator and
denominator coprime with a monic denominator, so equality is syntactic.

Concrete fields may also carry ``log u^j`` as extra transcendental
generators (``logs=True``), with d/du^j log u^j = 1/u^j.  They make the
Laurent coefficient ring closed under antiderivatives.

Generic fields come in a family indexed by the maximal jet order they can
represent.  Differentiating a top-order jet silently moves the value into a
larger member of the family; binary operations promote to the larger field.
"""

from __future__ import annotations

from fractions import Fraction

import flint

__all__ = [
    "CoeffField",
    "CoeffRat",
    "LambdaCoeff",
    "ZeroDivisionCoeffError",
    "multi_indices",
    "polar_free_divide",
]


class ZeroDivisionCoeffError(ZeroDivisionError):
    """Raised on division by an identically vanishing coefficient."""


def multi_indices(n, order):
    """All exponent vectors of length ``n`` and total degree ``order``.

    Deterministic order: lexicographically decreasing.
    """
    if n == 1:
        return [(order,)]
    out = []
    for first in range(order, -1, -1):
        for rest in multi_indices(n - 1, order - first):
            out.append((first,) + rest)
    return out


def _jet_name(i, J):
    return "f%d_%s" % (i, "_".join(map(str, J)))


def render_jet(i, J):
    """Text form of the jet symbol d^J f^i, e.g. ``f1``, ``f1_d{1,2}``."""
    if not any(J):
        return "f%d" % i
    idx = []
    for j, e in enumerate(J, start=1):
        idx.extend([j] * e)
    return "f%d_d{%s}" % (i, ",".join(map(str, idx)))


class CoeffField:
    """A polynomial context for coefficients.

    ``jet_order=None`` gives the concrete field Q(u1..un); otherwise the
    field also contains the jets f^i_J with |J| <= jet_order.  ``logs``
    (concrete fields only) adds the generators log u^j.
    """

    _registry: dict = {}

    def __init__(self, n, jet_order=None, logs=False):
        if n < 1:
            raise ValueError("n must be positive")
        if logs and jet_order is not None:
            raise ValueError("log generators are only available in concrete fields")
        self.n = n
        self.jet_order = jet_order
        self.logs = logs
        names = ["u%d" % j for j in range(1, n + 1)]
        if logs:
            names += ["log_u%d" % j for j in range(1, n + 1)]
        self.jets = []
        if jet_order is not None:
            for k in range(jet_order + 1):
                for J in multi_indices(n, k):
                    for i in range(1, n + 1):
                        self.jets.append((i, J))
                        names.append(_jet_name(i, J))
        self.names = tuple(names)
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names, "deglex")
        self.gens = self.ctx.gens()
        self.jet_index = {jet: n + k for k, jet in enumerate(self.jets)}
        # variables holding jets of maximal order; differentiating them
        # requires a larger field
        self.top_jets = [
            self.jet_index[(i, J)]
            for (i, J) in self.jets
            if jet_order is not None and sum(J) == jet_order
        ]
        self._zero = self.ctx.from_dict({})
        self._one = self._zero + 1
        self._ucache = {}

    @classmethod
    def get(cls, n, jet_order=None, logs=False):
        key = (n, jet_order, logs)
        field = cls._registry.get(key)
        if field is None:
            field = cls._registry[key] = cls(n, jet_order, logs)
        return field

    @classmethod
    def generic(cls, n, jet_order=4):
        return cls.get(n, jet_order)

    @classmethod
    def concrete(cls, n, logs=False):
        return cls.get(n, None, logs)

    @property
    def is_generic(self):
        return self.jet_order is not None

    def rank(self):
        if self.jet_order is None:
            return -1 if self.logs else -2
        return self.jet_order

    def __repr__(self):
        if self.jet_order is None:
            return "CoeffField(n=%d, concrete%s)" % (self.n, ", logs" if self.logs else "")
        return "CoeffField(n=%d, jet_order=%d)" % (self.n, self.jet_order)

    def grown(self, extra=2):
        """The next larger generic field of the family."""
        base = self.jet_order if self.jet_order is not None else 0
        return CoeffField.get(self.n, base + extra)

    # constructors -------------------------------------------------------
    def zero(self):
        return CoeffRat(self, self._zero, self._one, _raw=True)

    def one(self):
        return CoeffRat(self, self._one, self._one, _raw=True)

    def const(self, value):
        value = Fraction(value)
        poly = self._zero + flint.fmpq(value.numerator, value.denominator)
        return CoeffRat(self, poly, self._one, _raw=True)

    def u(self, j):
        """The coordinate u^j as a coefficient."""
        if not 1 <= j <= self.n:
            raise IndexError("coordinate index %d out of range 1..%d" % (j, self.n))
        c = self._ucache.get(j)
        if c is None:
            c = self._ucache[j] = CoeffRat(self, self.gens[j - 1], self._one, _raw=True)
        return c

    def log_u(self, j):
        """log u^j (fields with ``logs=True``)."""
        if not self.logs:
            raise ValueError("field has no log generators")
        return CoeffRat(self, self.gens[self.n + j - 1], self._one, _raw=True)

    def f(self, i, J=None):
        """The jet symbol d^J f^i (generic fields only)."""
        if J is None:
            J = (0,) * self.n
        J = tuple(J)
        if len(J) != self.n:
            raise ValueError("multi-index must have length n")
        if not 1 <= i <= self.n:
            raise IndexError("function index %d out of range 1..%d" % (i, self.n))
        field = self
        if field.jet_order is None or sum(J) > field.jet_order:
            field = CoeffField.get(self.n, max(sum(J), self.jet_order or 0, 2))
        return CoeffRat(field, field.gens[field.jet_index[(i, J)]], field._one, _raw=True)

    def coerce(self, value):
        if isinstance(value, CoeffRat):
            return value
        if isinstance(value, (int, Fraction)):
            return self.const(value)
        raise TypeError("cannot coerce %r to a coefficient" % (value,))


def _larger(fa, fb):
    if fa is fb:
        return fa
    if fa.n != fb.n:
        raise ValueError("coefficients from fields of different dimension")
    return fa if fa.rank() >= fb.rank() else fb


def _normalize(field, num, den):
    if den.is_zero():
        raise ZeroDivisionCoeffError("division by zero coefficient")
    if num.is_zero():
        return field._zero, field._one
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
    lc = den.leading_coefficient()
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


class CoeffRat:
    """An element of the coefficient field in canonical form."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field, num, den=None, _raw=False):
        if den is None:
            den = field._one
        if not _raw:
            num, den = _normalize(field, num, den)
        self.field = field
        self.num = num
        self.den = den

    # promotion -----------------------------------------------------------
    def promote(self, field):
        if field is self.field:
            return self
        if field.n != self.field.n or field.rank() < self.field.rank() or (self.field.logs and not field.logs):
            raise ValueError("cannot move %r into %r" % (self.field, field))
        num = self.num.project_to_context(field.ctx)
        den = self.den.project_to_context(field.ctx)
        return CoeffRat(field, num, den, _raw=True)

    def _pair(self, other):
        if not isinstance(other, CoeffRat):
            if isinstance(other, (int, Fraction)):
                other = self.field.const(other)
            elif isinstance(other, flint.fmpq):
                other = self.field.const(Fraction(int(other.p), int(other.q)))
            else:
                return None, None
        if other.field is self.field:
            return self, other
        field = _larger(self.field, other.field)
        return self.promote(field), other.promote(field)

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        F = a.field
        if a.den.is_one() and b.den.is_one():
            return CoeffRat(F, a.num + b.num, F._one, _raw=True)
        if a.den == b.den:
            return CoeffRat(F, a.num + b.num, a.den)
        if b.den.is_one():
            return CoeffRat(F, a.num + b.num * a.den, a.den, _raw=True)
        if a.den.is_one():
            return CoeffRat(F, a.num * b.den + b.num, b.den, _raw=True)
        # Henrici: only the common factor of the denominators can cancel
        g = a.den.gcd(b.den)
        if g.is_one():
            return CoeffRat(F, a.num * b.den + b.num * a.den, a.den * b.den, _raw=True)
        bd, ad = b.den / g, a.den / g
        num = a.num * bd + b.num * ad
        if num.is_zero():
            return F.zero()
        h = num.gcd(g)
        if not h.is_one():
            num, g = num / h, g / h
        return CoeffRat(F, num, ad * bd * g, _raw=True)

    __radd__ = __add__

    def __neg__(self):
        return CoeffRat(self.field, -self.num, self.den, _raw=True)

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return b + (-a)

    def __mul__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        F = a.field
        if a.den.is_one() and b.den.is_one():
            return CoeffRat(F, a.num * b.num, F._one, _raw=True)
        if b.num.is_constant() and b.den.is_one():
            if b.num.is_zero():
                return F.zero()
            return CoeffRat(F, a.num * b.num, a.den, _raw=True)
        if a.num.is_constant() and a.den.is_one():
            if a.num.is_zero():
                return F.zero()
            return CoeffRat(F, a.num * b.num, b.den, _raw=True)
        if a.num.is_zero() or b.num.is_zero():
            return F.zero()
        an, ad, bn, bd = a.num, a.den, b.num, b.den
        if not bd.is_one():
            g = an.gcd(bd)
            if not g.is_one():
                an, bd = an / g, bd / g
        if not ad.is_one():
            g = bn.gcd(ad)
            if not g.is_one():
                bn, ad = bn / g, ad / g
        return CoeffRat(F, an * bn, ad * bd, _raw=True)

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionCoeffError("division by zero coefficient")
        return CoeffRat(self.field, self.den, self.num)

    def __truediv__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return b * a.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return CoeffRat(self.field, self.num ** k, self.den ** k, _raw=True)

    def __eq__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return a.num == b.num and a.den == b.den

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def __bool__(self):
        return not self.num.is_zero()

    # predicates ------------------------------------------------------------
    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num.is_one() and self.den.is_one()

    def is_constant(self):
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self):
        return self.den.is_one()

    def constant_value(self):
        """The rational value of a constant coefficient."""
        if not self.is_constant():
            raise ValueError("coefficient is not constant")
        c = self.num.leading_coefficient() if not self.num.is_zero() else flint.fmpq(0)
        return Fraction(int(c.p), int(c.q))

    def depends_on_u(self, j):
        """Whether the coefficient has a nonzero partial derivative in u^j."""
        return not self.d_du(j).is_zero()

    # differentiation -------------------------------------------------------
    def _poly_d(self, P, j):
        F = self.field
        res = P.derivative(j - 1)
        if F.jet_order is None:
            return res
        degs = P.degrees()
        for idx in range(F.n, len(degs)):
            if degs[idx]:
                i, J = F.jets[idx - F.n]
                J2 = J[: j - 1] + (J[j - 1] + 1,) + J[j:]
                res = res + P.derivative(idx) * F.gens[F.jet_index[(i, J2)]]
        return res

    def _needs_growth(self):
        F = self.field
        if F.jet_order is None:
            return False
        for P in (self.num, self.den):
            if P.is_constant():
                continue
            degs = P.degrees()
            if any(degs[idx] for idx in F.top_jets):
                return True
        return False

    def d_du(self, j):
        """Partial derivative with respect to u^j (chain rule on jets)."""
        if not 1 <= j <= self.field.n:
            raise IndexError("coordinate index %d out of range" % j)
        a = self
        if a._needs_growth():
            a = a.promote(a.field.grown())
        F = a.field
        if a.num.is_constant() and a.den.is_constant():
            return F.zero()
        if F.logs:
            return a._d_du_logs(j)
        dn = a._poly_d(a.num, j)
        if a.den.is_one():
            return CoeffRat(F, dn, F._one, _raw=True)
        dd = a._poly_d(a.den, j)
        return CoeffRat(F, dn * a.den - a.num * dd, a.den * a.den)

    def _d_du_logs(self, j):
        # P' = (u_j dP/du_j + dP/dlog_j) / u_j
        F = self.field
        uj = F.gens[j - 1]

        def q(P):
            return uj * P.derivative(j - 1) + P.derivative(F.n + j - 1)

        num = q(self.num) * self.den - self.num * q(self.den)
        return CoeffRat(F, num, uj * self.den * self.den)

    # substitution ----------------------------------------------------------
    def substitute_f(self, functions, target=None):
        """Replace every jet f^i_J by d^J of ``functions[i-1]``.

        ``functions`` are coefficients of a concrete field (or constants).
        """
        F = self.field
        target = target or CoeffField.concrete(F.n)
        funcs = [target.coerce(g) if not isinstance(g, CoeffRat) else g.promote(target) for g in functions]
        cache = {}

        def jet_value(i, J):
            key = (i, J)
            if key not in cache:
                val = funcs[i - 1]
                for j, e in enumerate(J, start=1):
                    for _ in range(e):
                        val = val.d_du(j)
                cache[key] = val
            return cache[key]

        def evaluate(P):
            total = target.zero()
            for exps, c in P.to_dict().items():
                term = target.const(Fraction(int(c.p), int(c.q)))
                for idx, e in enumerate(exps):
                    if not e:
                        continue
                    if idx < F.n:
                        term = term * target.u(idx + 1) ** e
                    else:
                        i, J = F.jets[idx - F.n]
                        term = term * jet_value(i, J) ** e
                total = total + term
            return total

        if F.jet_order is None:
            return self.promote(target) if target.rank() >= F.rank() else self
        return evaluate(self.num) / evaluate(self.den)

    def subs_u(self, j, value):
        """Substitute u^j := value (a coefficient)."""
        F = self.field
        value = F.coerce(value) if not isinstance(value, CoeffRat) else value
        a, value = self._pair(value)
        F = a.field
        gens = list(F.gens)

        def sub(P):
            if value.den.is_one():
                args = gens[:]
                args[j - 1] = value.num
                return CoeffRat(F, P.compose(*args), F._one, _raw=True)
            # homogenize through the denominator
            total = F.zero()
            for exps, c in P.to_dict().items():
                term = F.const(Fraction(int(c.p), int(c.q)))
                for idx, e in enumerate(exps):
                    if e:
                        g = value if idx == j - 1 else CoeffRat(F, F.gens[idx], F._one, _raw=True)
                        term = term * g ** e
                total = total + term
            return total

        return sub(a.num) / sub(a.den)

    # expansion --------------------------------------------------------------
    def poly_terms(self):
        """Numerator terms as ``{exponent tuple: Fraction}`` (denominator must be 1)."""
        if not self.den.is_one():
            raise ValueError("coefficient is not a polynomial")
        return {e: Fraction(int(c.p), int(c.q)) for e, c in self.num.to_dict().items()}

    # rendering -------------------------------------------------------------
    def _render_poly(self, P):
        F = self.field
        items = sorted(P.to_dict().items(), reverse=True)
        if not items:
            return "0"
        parts = []
        for exps, c in items:
            c = Fraction(int(c.p), int(c.q))
            factors = []
            for idx, e in enumerate(exps):
                if not e:
                    continue
                if idx < F.n:
                    name = "u%d" % (idx + 1)
                elif F.logs:
                    name = F.names[idx]
                else:
                    name = render_jet(*F.jets[idx - F.n])
                factors.append(name if e == 1 else "%s^%d" % (name, e))
            sign = "-" if c < 0 else "+"
            c = abs(c)
            if not factors:
                body = str(c)
            elif c == 1:
                body = "*".join(factors)
            else:
                body = "%s*%s" % (c, "*".join(factors))
            parts.append((sign, body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += " %s %s" % (sign, body)
        return text

    def __str__(self):
        num = self._render_poly(self.num)
        if self.den.is_one():
            return num
        den = self._render_poly(self.den)
        if len(self.num) > 1:
            num = "(%s)" % num
        return "%s/(%s)" % (num, den)

    def __repr__(self):
        return "CoeffRat(%s)" % self


class LambdaCoeff:
    """A polynomial in lambda with coefficients in a :class:`CoeffField`."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        coeffs = [field.coerce(c) for c in coeffs]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.field = field
        self.coeffs = tuple(coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.field.zero()

    def __add__(self, other):
        m = max(len(self.coeffs), len(other.coeffs))
        return LambdaCoeff(self.field, [self[k] + other[k] for k in range(m)])

    def __sub__(self, other):
        m = max(len(self.coeffs), len(other.coeffs))
        return LambdaCoeff(self.field, [self[k] - other[k] for k in range(m)])

    def __mul__(self, other):
        if not isinstance(other, LambdaCoeff):
            return LambdaCoeff(self.field, [c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return LambdaCoeff(self.field, [])
        out = [self.field.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for a, x in enumerate(self.coeffs):
            for b, y in enumerate(other.coeffs):
                out[a + b] = out[a + b] + x * y
        return LambdaCoeff(self.field, out)

    def __eq__(self, other):
        if not isinstance(other, LambdaCoeff):
            return NotImplemented
        return len(self.coeffs) == len(other.coeffs) and all(
            x == y for x, y in zip(self.coeffs, other.coeffs)
        )

    def evaluate(self, value):
        """Horner evaluation at a coefficient value."""
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def derivative(self):
        return LambdaCoeff(self.field, [k * c for k, c in enumerate(self.coeffs)][1:])

    def __repr__(self):
        return "LambdaCoeff(%s)" % ", ".join(map(str, self.coeffs))


def polar_free_divide(p, i):
    """Return (p(L) - p(u^i)) / (L - u^i) for a polynomial p in L.

    Exact: lambda^k - x^k = (lambda - x) * sum_m lambda^m x^(k-1-m).
    """
    x = p.field.u(i)
    if not p.coeffs:
        return LambdaCoeff(p.field, [])
    out = [p.field.zero()] * max(len(p.coeffs) - 1, 0)
    for k, a in enumerate(p.coeffs):
        if k == 0 or a.is_zero():
            continue
        xpow = p.field.one()
        for m in range(k - 1, -1, -1):
            out[m] = out[m] + a * xpow
            xpow = xpow * x
    return LambdaCoeff(p.field, out)
