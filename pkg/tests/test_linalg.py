import random
from fractions import Fraction

from thetapencil import linalg


def dense_rank(rows, ncols):
    # plain Fraction Gaussian elimination as an oracle
    m = [[Fraction(r.get(j, 0)) for j in range(ncols)] for r in rows]
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                t = m[i][c] / m[rank][c]
                m[i] = [a - t * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def random_low_rank(rng, m, n, r):
    A = [[rng.randint(-3, 3) for _ in range(r)] for _ in range(m)]
    B = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(r)]
    rows = []
    for i in range(m):
        row = {}
        for j in range(n):
            v = sum(A[i][k] * B[k][j] for k in range(r))
            if v:
                row[j] = Fraction(v, rng.choice([1, 2, 3]))
        rows.append(row)
    return rows


def test_rank_against_oracle():
    rng = random.Random(3)
    for _ in range(40):
        m, n = rng.randint(1, 9), rng.randint(1, 9)
        rows = random_low_rank(rng, m, n, rng.randint(0, min(m, n)))
        assert linalg.rank(rows) == dense_rank(rows, n)


def test_rank_edge_cases():
    assert linalg.rank([]) == 0
    assert linalg.rank([{}, {}]) == 0
    assert linalg.rank([{0: 1}, {0: 2}]) == 1
    # large entries where a single prime could fail
    big = 2 ** 127 - 1
    assert linalg.rank([{0: big, 1: 1}, {0: big * 3, 1: 3}]) == 1


def test_solve():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(1, 8)
        cols = random_low_rank(rng, n, rng.randint(1, 8), rng.randint(0, n))
        # treat rows of the helper as columns
        x = [rng.randint(-2, 2) for _ in cols]
        b = {}
        for xk, col in zip(x, cols):
            for i, v in col.items():
                b[i] = b.get(i, 0) + xk * v
        sol = linalg.solve(cols, b)
        assert sol is not None
        chk = {}
        for xk, col in zip(sol, cols):
            for i, v in col.items():
                chk[i] = chk.get(i, 0) + xk * v
        assert {k: v for k, v in chk.items() if v} == {k: v for k, v in b.items() if v}
    assert linalg.solve([{0: 1}], {1: 1}) is None


def test_rational_reconstruction():
    p = linalg.PRIMES[0]
    for q in (Fraction(3, 7), Fraction(-5, 11), Fraction(0)):
        a = q.numerator * pow(q.denominator, -1, p) % p
        assert linalg.rational_reconstruction(a, p) == q
