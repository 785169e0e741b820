"""Acceptance gate: one recorded PASS/FAIL per criterion part, summarised at the end.

All checks are exact (rational arithmetic, certified ranks).  Parts that
cannot hold for the stated inputs are marked xfail(strict) and still print
their FAIL line.
"""

import random
import time
from fractions import Fraction

import pytest

from thetapencil.algebra import ThetaElement, graded_commutator, jet_monomials, random_element
from thetapencil.cli import homotopy_identity
from thetapencil.coeffs import CoeffField
from thetapencil.cohomology import max_super_degree, poincare_check, verify_vanishing_table
from thetapencil.deformation import deformation_cocycle, extend, miura_apply, scalar_deformation
from thetapencil.functionals import (
    Deformation,
    LocalFunctional,
    canonicalize,
    central_invariants,
    d_P,
    schouten,
)
from thetapencil.homotopy import D_op, d_hat, projection_p, tag_monomial, weight_basis
from thetapencil.pencil import Pencil, generators, square_checks


def squares_defects(pen, deg, stop_early=False):
    bad = []
    for g in generators(pen.n, deg):
        for name, v in square_checks(pen, g):
            if not v.is_zero():
                bad.append((g, name))
                if stop_early:
                    return bad
    return bad


# ---------------------------------------------------------------------------
# 1. D1^2 = D2^2 = D1 D2 + D2 D1 = 0 on generators with s <= 4


def test_c1_squares_n1_generic(record):
    bad = squares_defects(Pencil(n=1), 4)
    assert record(1, "n=1 generic f", not bad, "%d defects" % len(bad))


@pytest.mark.xfail(strict=True, reason="generic diagonal metrics are not flat for n >= 2")
@pytest.mark.parametrize("n", [2, 3])
def test_c1_squares_generic(record, n):
    bad = squares_defects(Pencil(n=n), 4, stop_early=True)
    detail = "first defect %s on %s%d_%d" % (bad[0][1], *bad[0][0]) if bad else ""
    assert record(1, "n=%d generic f" % n, not bad, detail)


def test_c1_squares_flat_concrete(record):
    F2 = CoeffField.concrete(2)
    u1, u2 = F2.u(1), F2.u(2)
    F3 = CoeffField.concrete(3)
    for name, fs in [
        ("n=2 f=(1/(u1-u2), 1/(u2-u1))", [1 / (u1 - u2), 1 / (u2 - u1)]),
        ("n=2 f=(u1, u2)", [u1, u2]),
        ("n=3 f=(u1^2, u2, 1)", [F3.u(1) ** 2, F3.u(2), F3.one()]),
    ]:
        bad = squares_defects(Pencil(fs), 4)
        assert record(1, name, not bad, "%d defects" % len(bad))


# ---------------------------------------------------------------------------
# 2. homotopy identity on the monomial basis, lambda <= 3, d <= 4, n <= 2


@pytest.mark.parametrize("n", [1, 2])
def test_c2_homotopy_identity(record, n):
    checked, bad = homotopy_identity(Pencil(n=n), 4, max_super_degree(n, 4), 3)
    assert record(2, "n=%d generic f" % n, checked > 0 and not bad, "%d cases, %d failures" % (checked, len(bad)))


# ---------------------------------------------------------------------------
# 3. p is the identity on C[lambda] and on C_i^nt ker d_i, zero on (lambda - u^i) C_i^nt[lambda] and M[lambda]


@pytest.mark.parametrize("n", [1, 2])
def test_c3_projection_contract(record, n):
    pen = Pencil(n=n)
    F = pen.field
    p = projection_p(pen)
    rng = random.Random(100 + n)
    keys = [k for q in range(4) for d in range(5) for k in jet_monomials(n, q, d)]
    C = [k for k in keys if tag_monomial(k) == "C"]
    Ci = {i: [k for k in keys if tag_monomial(k) == ("C", i)] for i in range(1, n + 1)}
    M = [k for k in keys if tag_monomial(k) == "M"]
    lam = ThetaElement.lam(F)

    def coeff(i):
        return rng.choice([F.one(), F.u(i), pen.fs[i - 1], F.const(Fraction(-3, 2))])

    def rand(pool, i, lam_max=3):
        x = ThetaElement.zero(F)
        for _ in range(3):
            k = rng.choice(pool)
            x = x + ThetaElement.monomial(F, (rng.randint(0, lam_max), k[1], k[2]), coeff(i))
        return x

    bad = {"C[L]": 0, "C_i^nt ker d_i": 0, "(L-u^i)C_i^nt[L]": 0, "M[L]": 0}
    trials = 100
    for _ in range(trials):
        i = rng.randint(1, n)
        x = rand(C, i)
        bad["C[L]"] += p(x) != x
        y = d_hat(F, i)(rand(Ci[i], i, lam_max=0))
        bad["C_i^nt ker d_i"] += p(y) != y
        z = (lam - ThetaElement.coeff(F.u(i))) * rand(Ci[i], i, lam_max=2)
        bad["(L-u^i)C_i^nt[L]"] += not p(z).is_zero()
        if M:
            bad["M[L]"] += not p(rand(M, i)).is_zero()
    ok = not any(bad.values())
    detail = "%d trials each, failures %s%s" % (trials, bad, "" if M else " (no mixed monomials for n=1)")
    assert record(3, "n=%d generic f" % n, ok, detail)


# ---------------------------------------------------------------------------
# 4. truncated Poincare lemma for (C_i, d_i)


@pytest.mark.parametrize("n", [1, 2])
def test_c4_poincare(record, n):
    rows = []
    for i in range(1, n + 1):
        rows += poincare_check(n, i, jet_max=3, d_max=8)
    bad = [r for r in rows if r[2] != r[3]]
    assert record(4, "n=%d, jets s<=3" % n, not bad, "%d bidegrees, mismatches %s" % (len(rows), bad))


# ---------------------------------------------------------------------------
# 5. [D_i, d_i] = -f^i d_i and eigenvalues f^i (w - 1)


@pytest.mark.parametrize("n", [1, 2])
def test_c5_commutator_eigen(record, n):
    pen = Pencil(n=n)
    F = pen.field
    bad = 0
    cases = 0
    for i in range(1, n + 1):
        Di, dh = D_op(pen, i, i), d_hat(F, i)
        fi = pen.fs[i - 1]
        # generators up to degree 4 (and a few products)
        elems = [ThetaElement.u(F, j, s) for j in range(1, n + 1) for s in range(5)]
        elems += [ThetaElement.theta(F, j, s) for j in range(1, n + 1) for s in range(5)]
        elems += [ThetaElement.monomial(F, k) for q in range(3) for k in jet_monomials(n, q, 4)]
        for x in elems:
            cases += 1
            bad += graded_commutator(Di, dh, x) != -dh(x).scale(fi)
        for w2 in range(1, 9):
            w = Fraction(w2, 2)
            for key in weight_basis(i, w):
                dm = dh(ThetaElement.monomial(F, key))
                cases += 1
                bad += Di(dm) != dm.scale(fi * (w - 1))
        th2 = ThetaElement.theta(F, i, 2)
        cases += 1
        bad += Di(th2) != th2.scale(fi * Fraction(1, 2))
    assert record(5, "n=%d generic f" % n, not bad, "%d cases, %d failures" % (cases, bad))


# ---------------------------------------------------------------------------
# 6 and 7. vanishing of truncated cohomology outside the ranges


def _vanishing(pen, d_max, N, extra=()):
    t = time.time()
    rep = verify_vanishing_table(pen, d_max, N, extra_zero=extra)
    return rep, time.time() - t


@pytest.mark.slow
@pytest.mark.parametrize("label,n,fs,d_max", [
    ("n=1 f=1", 1, lambda F: [F.one()], 5),
    ("n=1 f=u1", 1, lambda F: [F.u(1)], 5),
    ("n=2 f=(1,2)", 2, lambda F: [F.one(), F.const(2)], 4),
])
def test_c6_vanishing(record, label, n, fs, d_max):
    pen = Pencil(fs(CoeffField.concrete(n)))
    rep, dt = _vanishing(pen, d_max, 4)
    checked = [c for c in rep.cells if not c.in_range]
    ok = rep.passed and all(c.stable and c.dim_H == 0 for c in checked)
    detail = "%d cells outside the ranges, violations %s, unstable %s, %.0fs" % (
        len(checked), rep.violations, rep.exhausted, dt)
    assert record(6, label, ok, detail)


@pytest.mark.slow
@pytest.mark.parametrize("label,fs", [
    ("n=1 f=1", lambda F: [F.one()]),
    ("n=1 f=u1", lambda F: [F.u(1)]),
])
def test_c7_sharpened_scalar(record, label, fs):
    pen = Pencil(fs(CoeffField.concrete(1)))
    extra = ((1, 0), (1, 1), (2, 2))
    rep, _ = _vanishing(pen, 2, 4, extra)
    cells = {(c.p, c.d): c for c in rep.cells}
    ok = all(cells[pd].stable and cells[pd].dim_H == 0 for pd in extra)
    detail = ", ".join("H%s=%d (next %d)" % (pd, cells[pd].dim_H, cells[pd].dim_H_next) for pd in extra)
    assert record(7, label, ok, detail)


# ---------------------------------------------------------------------------
# 8. central invariants


def test_c8_central_invariants(record):
    pen = Pencil(n=1)
    f = pen.fs[0]
    c0 = central_invariants(Deformation(pen.fs))
    record(8, "trivial deformation", all(c.is_zero() for c in c0), str(list(map(str, c0))))
    d = Deformation(pen.fs, {2: {(1, 1, 2, 3): ThetaElement.coeff(3 * f * f)}})
    c1 = central_invariants(d)
    assert record(8, "A^11_{2,3;2} = 3 f^2", c1[0].is_one(), "c_1 = %s" % c1[0])
    assert all(c.is_zero() for c in c0)


@pytest.mark.parametrize("n", [1, 2])
def test_c8_miura_invariance(record, n):
    rng = random.Random(8 + n)
    if n == 1:
        pen = Pencil(n=1)
        F = pen.field
        P22 = scalar_deformation(pen, F.u(1))
        pool = [F.u(1), F.f(1), F.one()]
        dfm = {1: {0: LocalFunctional(pen.P1())}, 2: {0: LocalFunctional(pen.P2()), 2: P22}}
    else:
        F = CoeffField.concrete(2)
        pen = Pencil([F.one(), F.const(2)])
        pool = [F.u(1), F.u(2), F.one()]
        lead = (ThetaElement.theta(F, 1, 0) * ThetaElement.theta(F, 1, 3)).scale(Fraction(3, 2) * F.u(1))
        P22 = LocalFunctional(lead + random_element(F, 2, 3, rng=rng, coeff_pool=pool))
        dfm = {1: {0: LocalFunctional(pen.P1())}, 2: {0: LocalFunctional(pen.P2()), 2: P22}}
    X = {1: LocalFunctional(random_element(F, 1, 1, rng=rng, coeff_pool=pool)),
         2: LocalFunctional(random_element(F, 1, 2, rng=rng, coeff_pool=pool))}
    assert not X[1].is_zero() and not X[2].is_zero()
    new = {a: miura_apply(X, s, 2) for a, s in dfm.items()}
    before = central_invariants(Deformation.from_bivectors(pen.fs, dfm))
    after = central_invariants(Deformation.from_bivectors(pen.fs, new))
    changed = any(not (new[a].get(k, LocalFunctional.zero(F)) - dfm[a].get(k, LocalFunctional.zero(F))).is_zero()
                  for a in (1, 2) for k in (1, 2))
    ok = all(x == y for x, y in zip(before, after)) and changed
    assert record(8, "Miura invariance n=%d" % n, ok,
                  "c before %s, after %s" % (list(map(str, before)), list(map(str, after))))


# ---------------------------------------------------------------------------
# 9. extension steps


def _residuals(pen, terms):
    P1 = LocalFunctional(pen.P1())
    P2 = LocalFunctional(pen.P2())
    r = [schouten(P1, terms[4]), schouten(P2, terms[4]) + schouten(terms[2], terms[2]).scale(Fraction(1, 2))]
    if 6 in terms:
        r += [schouten(P1, terms[6]), schouten(P2, terms[6]) + schouten(terms[2], terms[4])]
    return r


@pytest.mark.parametrize("label,f,c,N", [
    ("n=1 f=1 c=1", "1", 1, 0),
    ("n=1 f=1 c=u1 (nonzero right-hand sides)", "1", "u", 1),
    ("n=1 f=u1^2 c=1 (nonzero right-hand sides)", "u2", 1, 4),
])
def test_c9_extension(record, label, f, c, N):
    F = CoeffField.concrete(1)
    fval = {"1": F.one(), "u2": F.u(1) ** 2}[f]
    cval = F.u(1) if c == "u" else c
    pen = Pencil([fval])
    P22 = scalar_deformation(pen, cval) if fval.is_constant() and c == 1 else deformation_cocycle(pen, cval, N=3)
    terms = extend(pen, P22, 2, N=N)
    res = _residuals(pen, terms)
    ok = all(r.is_zero() for r in res)
    detail = "P4 = %s; %d residuals all zero: %s" % (terms[4], len(res), ok)
    assert record(9, label, ok, detail)


# ---------------------------------------------------------------------------
# 10. compatibility and the two-path consistency


def _compat(pen):
    P1, P2 = LocalFunctional(pen.P1()), LocalFunctional(pen.P2())
    return [schouten(a, b).is_zero() for a, b in ((P1, P1), (P1, P2), (P2, P2))]


def test_c10_compat_n1(record):
    flags = _compat(Pencil(n=1))
    assert record(10, "brackets n=1 generic f", all(flags), "[P1,P1], [P1,P2], [P2,P2] zero: %s" % flags)


@pytest.mark.xfail(strict=True, reason="generic diagonal metrics are not flat for n >= 2")
def test_c10_compat_n2_generic(record):
    flags = _compat(Pencil(n=2))
    assert record(10, "brackets n=2 generic f", all(flags), "[P1,P1], [P1,P2], [P2,P2] zero: %s" % flags)


def test_c10_compat_n2_flat(record):
    F = CoeffField.concrete(2)
    u1, u2 = F.u(1), F.u(2)
    flags = _compat(Pencil([1 / (u1 - u2), 1 / (u2 - u1)]))
    assert record(10, "brackets n=2 f=(1/(u1-u2), 1/(u2-u1))", all(flags), "%s" % flags)


@pytest.mark.parametrize("which", ["P1", "P2"])
def test_c10_two_paths(record, which):
    pen = Pencil(n=1)
    F = pen.field
    P = LocalFunctional(pen.P1() if which == "P1" else pen.P2())
    D = pen.D1 if which == "P1" else pen.D2
    rng = random.Random(10)
    pool = [F.f(1), F.u(1), F.f(1, (1,)), F.one()]
    bad = 0
    trials = 100
    for _ in range(trials):
        a = random_element(F, rng.randint(0, 3), rng.randint(0, 4), rng=rng, coeff_pool=pool)
        lhs = LocalFunctional(canonicalize(D(a)), canonical=True)
        rhs = d_P(P, LocalFunctional(a))
        bad += lhs != rhs
    assert record(10, "two paths for %s, n=1 generic f" % which, not bad, "%d densities, %d mismatches" % (trials, bad))
