"""Exact linear algebra over the rationals.

Rows are dictionaries ``{column: value}``.

``rank`` is certified exact: the rank modulo a large prime is a lower bound
for the rational rank; the kernel computed modulo several primes is lifted by
Chinese remaindering and rational reconstruction and then checked to be a
kernel over the integers, which gives the matching upper bound.  If no
certificate is found with the available primes, fraction-free elimination
over the integers (:class:`Echelon`) decides.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, lcm

import flint

__all__ = [
    "integer_row",
    "rank",
    "rank_modular",
    "rank_of_union",
    "intersection_dim",
    "Echelon",
    "solve",
    "rational_reconstruction",
]

# 62-bit primes
PRIMES = (
    4611686018427387847,
    4611686018427387817,
    4611686018427387787,
    4611686018427387761,
    4611686018427387733,
    4611686018427387709,
    4611686018427387631,
    4611686018427387619,
)


def integer_row(row):
    """Scale a row of Fractions/ints to coprime integers."""
    row = {c: v for c, v in row.items() if v}
    if not row:
        return {}
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    out = {c: int(v * den) for c, v in row.items()}
    return _primitive(out)


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        row = {c: v // g for c, v in row.items()}
    return row


class Echelon:
    """Incremental row echelon form over the integers.

    ``add(row)`` reduces a row against the stored pivots and keeps it when it
    is independent.  Pivots are the smallest remaining column of each row.
    """

    def __init__(self):
        self.pivots = {}

    def __len__(self):
        return len(self.pivots)

    def reduce(self, row):
        row = dict(row)
        pivots = self.pivots
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                return row
            a = prow[c]
            b = row.pop(c)
            g = gcd(a, b)
            ma, mb = a // g, b // g
            new = {}
            if ma != 1:
                for k, v in row.items():
                    new[k] = v * ma
            else:
                new = row
            for k, v in prow.items():
                if k == c:
                    continue
                w = new.get(k, 0) - mb * v
                if w:
                    new[k] = w
                else:
                    new.pop(k, None)
            row = _primitive(new) if new else new
        return row

    def add(self, row):
        """Insert a row; return True when it increased the rank."""
        row = self.reduce(integer_row(row) if _has_fraction(row) else _primitive({c: v for c, v in row.items() if v}))
        if not row:
            return False
        c = min(row)
        if row[c] < 0:
            row = {k: -v for k, v in row.items()}
        self.pivots[c] = row
        return True

    def contains(self, row):
        return not self.reduce(integer_row(row))


def _has_fraction(row):
    return any(isinstance(v, Fraction) for v in row.values())


def _index_columns(rows):
    cols = sorted({c for r in rows for c in r})
    return {c: k for k, c in enumerate(cols)}


def _rref_mod(int_rows, ncols, p):
    M = flint.nmod_mat(len(int_rows), ncols, p)
    for i, row in enumerate(int_rows):
        for j, v in row.items():
            M[i, j] = v % p
    R, r = M.rref()
    pivots = []
    for k in range(r):
        j = pivots[-1] + 1 if pivots else 0
        while int(R[k, j]) == 0:
            j += 1
        pivots.append(j)
    return R, r, tuple(pivots)


def rational_reconstruction(a, m):
    """The fraction n/d with n = a d mod m, |n|, d <= sqrt(m/2), or None."""
    a %= m
    bound = isqrt(m // 2)
    r0, r1, t0, t1 = m, a, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound or gcd(r1, abs(t1)) != 1:
        return None
    return Fraction(r1, t1)


def rank_modular(rows, p=PRIMES[0]):
    """Rank modulo p; a lower bound for the rational rank."""
    index = _index_columns(rows)
    int_rows = [{index[c]: v for c, v in integer_row(r).items()} for r in rows]
    int_rows = [r for r in int_rows if r]
    if not int_rows:
        return 0
    return _rref_mod(int_rows, len(index), p)[1]


def rank(rows, max_primes=len(PRIMES)):
    """Exact rank of a list of sparse rows over Q (see module docstring)."""
    index = _index_columns(rows)
    int_rows = [{index[c]: v for c, v in integer_row(r).items()} for r in rows]
    int_rows = [r for r in int_rows if r]
    m, n = len(int_rows), len(index)
    if m == 0:
        return 0
    if m < n:
        # certify through the smaller kernel
        int_rows = _transpose(int_rows, n)
        m, n = n, m
    best = None
    residues = []
    for p in PRIMES[:max_primes]:
        R, r, piv = _rref_mod(int_rows, n, p)
        key = (r, tuple(-x for x in piv))
        if best is None or key > best:
            best, residues = key, []
        if key != best:
            continue
        if r == n:
            return r
        free = [j for j in range(n) if j not in set(piv)]
        residues.append((p, [[int(R[k, f]) for f in free] for k in range(r)]))
        kernel = _lift_kernel(residues, r, piv, free, n)
        if kernel is not None and _is_kernel(int_rows, kernel, n):
            return r
    ech = Echelon()
    for row in sorted(int_rows, key=len):
        ech.add(row)
    return len(ech)


def _transpose(int_rows, n):
    cols = [dict() for _ in range(n)]
    for i, row in enumerate(int_rows):
        for j, v in row.items():
            cols[j][i] = v
    return cols


def _lift_kernel(residues, r, piv, free, n):
    """Kernel vectors (one per free column) over Q from rref data mod several primes."""
    modulus = 1
    combined = None
    for p, table in residues:
        if combined is None:
            combined = [row[:] for row in table]
            modulus = p
            continue
        inv = pow(modulus, -1, p)
        for k in range(r):
            row = combined[k]
            t = table[k]
            for a in range(len(free)):
                x = row[a]
                row[a] = x + modulus * (((t[a] - x) * inv) % p)
        modulus *= p
    kernel = []
    for a, f in enumerate(free):
        vec = {f: Fraction(1)}
        for k in range(r):
            v = combined[k][a]
            if v:
                q = rational_reconstruction(-v, modulus)
                if q is None:
                    return None
                if q:
                    vec[piv[k]] = q
        kernel.append(vec)
    return kernel


def _is_kernel(int_rows, kernel, n):
    A = flint.fmpz_mat(len(int_rows), n)
    for i, row in enumerate(int_rows):
        for j, v in row.items():
            A[i, j] = v
    K = flint.fmpz_mat(n, len(kernel))
    for a, vec in enumerate(kernel):
        den = 1
        for q in vec.values():
            den = lcm(den, q.denominator)
        for j, q in vec.items():
            K[j, a] = int(q * den)
    P = A * K
    return all(P[i, j] == 0 for i in range(P.nrows()) for j in range(P.ncols()))


def rank_of_union(a_rows, b_rows):
    return rank(list(a_rows) + list(b_rows))


def intersection_dim(a_rows, b_rows):
    """dim(span A  cap  span B) = rank A + rank B - rank [A; B]."""
    return rank(a_rows) + rank(b_rows) - rank_of_union(a_rows, b_rows)


def solve(columns, rhs):
    """Find x with sum_k x_k columns[k] = rhs, all sparse vectors over Q.

    ``columns`` is a list of dicts (the images of the unknowns), ``rhs`` a
    dict.  Returns a list of Fractions or ``None`` when there is no solution.
    """
    # eliminate on augmented vectors: each column carries its own combination
    pivots = {}  # row-index -> (vector, combination)
    for k, col in enumerate(columns):
        vec = {r: Fraction(v) for r, v in col.items() if v}
        comb = {k: Fraction(1)}
        vec, comb = _reduce_q(vec, comb, pivots)
        if vec:
            r = min(vec)
            pivots[r] = (vec, comb)
    vec = {r: Fraction(v) for r, v in rhs.items() if v}
    comb = {}
    vec, comb = _reduce_q(vec, comb, pivots)
    if vec:
        return None
    x = [Fraction(0)] * len(columns)
    for k, v in comb.items():
        x[k] = -v
    return x


def _reduce_q(vec, comb, pivots):
    while vec:
        r = min(vec)
        piv = pivots.get(r)
        if piv is None:
            break
        pvec, pcomb = piv
        factor = vec[r] / pvec[r]
        for k, v in pvec.items():
            w = vec.get(k, 0) - factor * v
            if w:
                vec[k] = w
            else:
                vec.pop(k, None)
        for k, v in pcomb.items():
            w = comb.get(k, 0) - factor * v
            if w:
                comb[k] = w
            else:
                comb.pop(k, None)
    # vec now has a leading entry with no pivot, or is empty
    return vec, comb
