"""Truncated cohomology of (A[lambda], D_lambda) with exact ranks.

A window ``W(p, d)`` is spanned by ``lambda^l u^alpha m`` where ``m`` is a
jet monomial of bidegree (p, d), ``u^alpha`` a monomial in the coordinates
and ``l`` a power of lambda.  Two window models are used:

* caps: ``|alpha| <= N`` and ``l <= L``.  dim H = dim ker(D on W) minus the
  dimension of the image of the previous window intersected with W.
* weight: if every f^i is a homogeneous polynomial of the same degree e, then
  D_lambda is homogeneous for  omega = l + |alpha| + (number of u-jets)
  and shifts omega by e.  Each omega-piece is a finite complex, so its
  cohomology is computed exactly; the window is omega <= N.

Coordinates of a basis vector are triples ``(l, alpha, (evens, odds))``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field as dc_field
from itertools import combinations_with_replacement

from fractions import Fraction

import flint

from . import linalg
from .algebra import ThetaElement, jet_monomials, key_deg_u
from .homotopy import d_hat

__all__ = [
    "WindowError",
    "Window",
    "enumerate_basis",
    "basis_element",
    "coordinates",
    "assemble_matrix",
    "homogeneity_degree",
    "localization",
    "CellReport",
    "CohomologyReport",
    "truncated_cohomology",
    "in_allowed_ranges",
    "max_super_degree",
    "verify_vanishing_table",
    "poincare_check",
]


class WindowError(RuntimeError):
    """An image left the declared window (or a coefficient is not polynomial)."""


def _exponents(n, total):
    """Exponent tuples of the monomials of exact total degree ``total``."""
    out = []
    for combo in combinations_with_replacement(range(n), total):
        e = [0] * n
        for j in combo:
            e[j] += 1
        out.append(tuple(e))
    return sorted(out)


@dataclass(frozen=True)
class Window:
    """Caps: ``sum(alpha) <= N``, ``l <= L`` and ``alpha_j >= lower[j]``.

    With ``weight`` set, the total weight is fixed instead of capping
    ``sum(alpha)`` by ``N``.  A ``lower`` entry ``None`` leaves the exponent
    unbounded below (only for n = 1 in weight mode, where the weight fixes
    it).  ``logs`` lists the coordinates with a log u^j generator; the total
    log degree is capped by ``K``.
    """

    n: int
    p: int
    d: int
    N: int
    L: int
    weight: int | None = None
    lower: tuple | None = None
    logs: tuple = ()
    K: int = 0

    def _lower(self):
        return self.lower or (0,) * self.n

    def contains(self, coord):
        l, alpha, key = coord
        n = self.n
        if l > self.L:
            return False
        for a, b in zip(alpha[:n], self._lower()):
            if b is not None and a < b:
                return False
        beta = alpha[n:]
        if beta:
            if sum(beta) > self.K or any(beta[j - 1] for j in range(1, n + 1) if j not in self.logs):
                return False
        if self.weight is not None:
            return l + sum(alpha[:n]) + len(key[0]) == self.weight
        return sum(alpha[:n]) <= self.N


def _shifted_exponents(lower, total):
    if None in lower:
        if len(lower) != 1:
            raise ValueError("unbounded exponents need n = 1")
        return [(total,)]
    base = total - sum(lower)
    if base < 0:
        return []
    return [tuple(a + b for a, b in zip(e, lower)) for e in _exponents(len(lower), base)]


def _log_exponents(n, logs, K):
    out = []
    for k in range(K + 1):
        for e in _exponents(len(logs), k):
            beta = [0] * n
            for j, x in zip(logs, e):
                beta[j - 1] = x
            out.append(tuple(beta))
    return sorted(out)


def enumerate_basis(w):
    """Ordered basis of the window (empty when the bidegree is empty)."""
    if w.p < 0 or w.d < 0:
        return []
    lower = w._lower()
    betas = _log_exponents(w.n, w.logs, w.K) if w.logs else [()]
    out = []
    for key in jet_monomials(w.n, w.p, w.d):
        jet = (key[1], key[2])
        for l in range(w.L + 1):
            if w.weight is not None:
                totals = [w.weight - key_deg_u(key) - l]
            else:
                totals = range(sum(lower), w.N + 1)
            for k in totals:
                for alpha in _shifted_exponents(lower, k):
                    for beta in betas:
                        out.append((l, alpha + beta, jet))
    out.sort()
    return out


def basis_element(field, coord):
    l, alpha, (ev, od) = coord
    n = field.n
    c = field.one()
    for j, e in enumerate(alpha[:n], start=1):
        if e > 0:
            c = c * field.u(j) ** e
        elif e < 0:
            c = c / field.u(j) ** (-e)
    for j, e in enumerate(alpha[n:], start=1):
        if e:
            c = c * field.log_u(j) ** e
    return ThetaElement(field, {(l, ev, od): c})


def _monomial_denominator(c):
    den = c.den.to_dict()
    n = c.field.n
    if len(den) != 1:
        raise WindowError("coefficient %s is not a Laurent polynomial" % c)
    ((exps, v),) = den.items()
    if any(exps[n:]):
        raise WindowError("log generator in a denominator: %s" % c)
    return exps, Fraction(int(v.p), int(v.q))


def coordinates(x):
    """Sparse coordinates ``{(l, alpha, (ev, od)): Fraction}`` of an element.

    ``alpha`` lists the exponents of u^1..u^n, followed by those of
    log u^1..log u^n when the field has log generators.
    """
    field = x.field
    n = field.n
    width = 2 * n if field.logs else n
    out = {}
    for (l, ev, od), c in x.terms.items():
        if c.field.jet_order is not None:
            raise WindowError("coefficients must be concrete")
        dexp, dval = _monomial_denominator(c)
        for exps, v in c.num.to_dict().items():
            alpha = tuple(int(exps[j]) - (int(dexp[j]) if j < n else 0) for j in range(width))
            out[(l, alpha, (ev, od))] = Fraction(int(v.p), int(v.q)) / dval
    return out


def assemble_matrix(op, field, basis, target=None):
    """Columns ``op(basis_j)`` as sparse coordinate dictionaries.

    With a target :class:`Window`, every image coordinate must lie in it,
    otherwise :class:`WindowError` is raised.
    """
    cols = []
    for coord in basis:
        y = op(basis_element(field, coord))
        col = coordinates(y)
        if target is not None:
            for c in col:
                if not target.contains(c):
                    raise WindowError("image of %s leaves the target window" % (coord,))
        cols.append(col)
    return cols


def _monomial_data(f):
    """(degree, variables) of a Laurent monomial c*u^a, or None."""
    num = f.num.to_dict()
    den = f.den.to_dict()
    if len(num) != 1 or len(den) != 1:
        return None
    ((a, _),) = num.items()
    ((b, _),) = den.items()
    n = f.field.n
    exps = [int(a[j]) - int(b[j]) for j in range(n)]
    return sum(exps), {j + 1 for j in range(n) if exps[j]}


def localization(pencil):
    """Coordinates to invert so that every f^i is a unit of the window ring.

    Only constants and Laurent monomials are supported: for any other f the
    polynomial window does not contain 1/f^i.
    """
    if pencil.is_generic:
        raise ValueError("truncated cohomology needs concrete functions f^i")
    loc = set()
    for f in pencil.fs:
        data = _monomial_data(f)
        if data is None:
            raise ValueError("f = %s is not a unit of Q[u, 1/u]; use constants or monomials" % f)
        loc |= data[1]
    return tuple(sorted(loc))


def homogeneity_degree(pencil):
    """Common degree e when all f^i are monomials of the same degree, else None."""
    degs = set()
    for f in pencil.fs:
        data = _monomial_data(f)
        if data is None:
            return None
        degs.add(data[0])
    return degs.pop() if len(degs) == 1 else None


def in_allowed_ranges(n, p, d):
    """Bidegrees where the cohomology is allowed to be nonzero."""
    case1 = 0 <= d <= n and d <= p <= d + n
    case2 = 2 <= d <= n + 2 and d <= p <= d + n - 1
    return case1 or case2


def max_super_degree(n, d):
    """Largest p with a nonzero bidegree (p, d)."""
    p, total = 0, 0
    s = 0
    while True:
        for _ in range(n):
            if total + s > d:
                return p
            total += s
            p += 1
        s += 1


@dataclass
class CellReport:
    p: int
    d: int
    N: int
    L: int
    dim_ker: int
    dim_im: int
    dim_H: int
    stable: bool = False
    in_range: bool = False
    dim_H_next: int | None = None
    witness: str | None = None


@dataclass
class CohomologyReport:
    n: int
    f: list
    mode: str
    cells: list = dc_field(default_factory=list)
    violations: list = dc_field(default_factory=list)
    exhausted: list = dc_field(default_factory=list)

    @property
    def passed(self):
        return not self.violations and not self.exhausted

    def to_json(self):
        data = asdict(self)
        data["passed"] = self.passed
        return json.dumps(data, indent=2, sort_keys=True)

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["p", "d", "N", "L", "dim_ker", "dim_im", "dim_H", "stable"])
        for c in self.cells:
            wr.writerow([c.p, c.d, c.N, c.L, c.dim_ker, c.dim_im, c.dim_H, int(c.stable)])
        return buf.getvalue()

    def table(self):
        lines = ["   p   d   N   L  ker   im    H  stable  range"]
        for c in self.cells:
            lines.append("%4d%4d%4d%4d%5d%5d%5d  %-6s  %s" % (
                c.p, c.d, c.N, c.L, c.dim_ker, c.dim_im, c.dim_H,
                "yes" if c.stable else "no", "in" if c.in_range else "out"))
        return "\n".join(lines)


class _Engine:
    """Caches D_lambda images of basis vectors for one pencil."""

    def __init__(self, pencil, check_square=True):
        self.pencil = pencil
        self.field = pencil.field
        self.D = pencil.Dl
        self.check_square = check_square
        self._img = {}

    def image(self, coord):
        y = self._img.get(coord)
        if y is None:
            y = self.D(basis_element(self.field, coord))
            self._img[coord] = y
        return y

    def columns(self, basis):
        return [coordinates(self.image(c)) for c in basis]

    def check_complex(self, basis):
        """D(D(b)) = 0 for the given source vectors (im inside ker)."""
        if not self.check_square:
            return
        for c in basis:
            if self.D(self.image(c)):
                raise AssertionError("D_lambda^2 != 0 on %s; the pencil is not flat" % (c,))


def _rank(cols):
    return linalg.rank(cols) if cols else 0


class _Model:
    """Window ring and grading for one pencil.

    Coordinates that occur in some f^i are inverted and get a log
    generator; the pencil is rebuilt over that field.
    """

    def __init__(self, pencil):
        from .coeffs import CoeffField
        from .pencil import Pencil

        self.n = pencil.n
        self.loc = localization(pencil)
        self.e = homogeneity_degree(pencil)
        self.mode = "weight" if self.e is not None else "caps"
        if self.loc:
            field = CoeffField.concrete(self.n, logs=True)
            pencil = Pencil([f.promote(field) for f in pencil.fs])
        self.pencil = pencil

    def lower(self, A):
        if self.loc and self.mode == "weight" and self.n == 1:
            return (None,)
        return tuple(-A if j in self.loc else 0 for j in range(1, self.n + 1))

    def pieces(self, p, d, N, L, A, K):
        """Pairs (source window, previous window) whose cohomologies add up."""
        n = self.n
        low = self.lower(A)
        low_prev = self.lower(A + 1)
        common = dict(logs=self.loc, K=K)
        prev_common = dict(logs=self.loc, K=K + 1 if self.loc else 0)
        if self.mode == "caps":
            return [(Window(n, p, d, N, L, lower=low, **common),
                     Window(n, p - 1, d - 1, N, L + 1, lower=low_prev, **prev_common))]
        e = self.e
        if None in low:
            omegas = range(-N, N + 1)
        else:
            omegas = range(sum(low), N + 1)
        return [(Window(n, p, d, N, L, weight=omega, lower=low, **common),
                 Window(n, p - 1, d - 1, N, L + 1, weight=omega - e, lower=low_prev, **prev_common))
                for omega in omegas]


def _piece(eng, w, wprev):
    src = enumerate_basis(w)
    if not src:
        return 0, 0, [], []
    ker = len(src) - _rank(eng.columns(src))
    prev = enumerate_basis(wprev)
    eng.check_complex(prev)
    cols = eng.columns(prev)
    outside = [{c: v for c, v in col.items() if not w.contains(c)} for col in cols]
    im = _rank(cols) - _rank([o for o in outside if o])
    return ker, im, src, cols


def _cell(eng, model, p, d, N, L, A, K):
    ker = im = 0
    for w, wprev in model.pieces(p, d, N, L, A, K):
        k, i, _, _ = _piece(eng, w, wprev)
        ker += k
        im += i
    return ker, im, ker - im


def _witness(eng, model, p, d, N, L, A, K):
    """A cocycle that is not a coboundary in the window, rendered as text."""
    for w, wprev in model.pieces(p, d, N, L, A, K):
        k, i, src, cols = _piece(eng, w, wprev)
        if k > i:
            return _witness_in(eng, src, cols)
    return None


def _witness_in(eng, src, image_cols):
    rows_index = {}
    cols = eng.columns(src)
    for col in cols:
        for r in col:
            rows_index.setdefault(r, len(rows_index))
    M = flint.fmpq_mat(max(len(rows_index), 1), len(src))
    for j, col in enumerate(cols):
        for r, v in col.items():
            M[rows_index[r], j] = flint.fmpq(v.numerator, v.denominator)
    R, rank = M.rref()
    pivots = []
    for k in range(rank):
        j = pivots[-1] + 1 if pivots else 0
        while R[k, j] == 0:
            j += 1
        pivots.append(j)
    free = [j for j in range(len(src)) if j not in pivots]
    base = _rank(image_cols)
    field = eng.field
    for f in free:
        vec = {f: Fraction(1)}
        for k, pj in enumerate(pivots):
            v = R[k, f]
            if v != 0:
                vec[pj] = -Fraction(int(v.p), int(v.q))
        coords = {src[j]: v for j, v in vec.items()}
        if _rank(image_cols + [coords]) > base:
            x = ThetaElement.zero(field)
            for c, v in coords.items():
                x = x + basis_element(field, c).scale(v)
            return str(x)
    return None


def _defaults(model, N, L, A, K):
    return (N if L is None else L, N if A is None else A,
            (1 if model.loc else 0) if K is None else K)


def truncated_cohomology(pencil, p, d, N, L=None, A=None, K=None, engine=None, model=None):
    """Cohomology data at (p, d) for the window (N, L, A, K) and the next one.

    ``L`` caps the lambda degree (default N), ``A`` the negative exponents of
    inverted coordinates (default N) and ``K`` the log degree (default 1 when
    some coordinate is inverted).  The next window raises every cap by one.
    """
    model = model or _Model(pencil)
    eng = engine or _Engine(model.pencil)
    L, A, K = _defaults(model, N, L, A, K)
    ker, im, h = _cell(eng, model, p, d, N, L, A, K)
    _, _, h2 = _cell(eng, model, p, d, N + 1, L + 1, A + 1, K + 1 if model.loc else 0)
    return CellReport(p, d, N, L, ker, im, h, stable=(h == h2), in_range=in_allowed_ranges(pencil.n, p, d),
                      dim_H_next=h2)


def verify_vanishing_table(pencil, d_max, N, L=None, A=None, K=None, extra_zero=(), progress=None):
    """Check dim H = 0 outside the allowed ranges (and at ``extra_zero`` cells).

    A nonzero stabilized dimension is a violation (with a witness cocycle);
    a nonzero dimension that has not stabilized is window exhaustion.
    """
    n = pencil.n
    model = _Model(pencil)
    eng = _Engine(model.pencil)
    report = CohomologyReport(n, [str(f) for f in pencil.fs], model.mode)
    extra = set(extra_zero)
    L, A, K = _defaults(model, N, L, A, K)
    for d in range(d_max + 1):
        for p in range(0, max_super_degree(n, d) + 1):
            cell = truncated_cohomology(pencil, p, d, N, L, A, K, engine=eng, model=model)
            report.cells.append(cell)
            if progress:
                progress(cell)
            if cell.in_range and (p, d) not in extra:
                continue
            if cell.dim_H == 0 and cell.stable:
                continue
            if cell.stable:
                cell.witness = _witness(eng, model, p, d, N, L, A, K)
                report.violations.append([p, d])
            else:
                report.exhausted.append([p, d])
    return report


def poincare_check(n, i, jet_max=3, d_max=8):
    """Rank check of H(C_i, d-hat_i) = C in the truncation u^{i,s}, theta_i^{s+1}, s <= jet_max.

    Returns a list of ``(p, d, dim_ker - dim_im, dim C)``.
    """
    from .coeffs import CoeffField

    field = CoeffField.concrete(n)
    dh = d_hat(field, i)

    def allowed(key):
        for j, s in key[1]:
            if j != i or s > jet_max:
                return False
        for s, j in key[2]:
            if s >= 2 and (j != i or s > jet_max + 1):
                return False
        return True

    def basis(p, d):
        if p < 0 or d < 0:
            return []
        return [k for k in jet_monomials(n, p, d) if allowed(k)]

    rows = []
    for d in range(d_max + 1):
        for p in range(0, max_super_degree(n, d) + 1):
            src = basis(p, d)
            if not src:
                continue
            img = [coordinates(dh(ThetaElement.monomial(field, k))) for k in src]
            ker = len(src) - _rank(img)
            prev = [coordinates(dh(ThetaElement.monomial(field, k))) for k in basis(p - 1, d - 1)]
            im = _rank(prev)
            dim_c = sum(1 for k in src if not k[1] and all(s <= 1 for s, _ in k[2]))
            rows.append((p, d, ker - im, dim_c))
    return rows
