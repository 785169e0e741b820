"""Build an eps^2 cocycle with central invariant c(u) and extend it two steps.

Run:  python3 demos/extension.py
"""
from fractions import Fraction

from thetapencil.coeffs import CoeffField
from thetapencil.deformation import deformation_cocycle, extend
from thetapencil.functionals import Deformation, LocalFunctional, central_invariants, schouten
from thetapencil.pencil import Pencil

F = CoeffField.concrete(1)
u = F.u(1)

for f, c, N in [(F.one(), u, 1), (u ** 2, 1, 4)]:
    pen = Pencil([f])
    P1, P2 = LocalFunctional(pen.P1()), LocalFunctional(pen.P2())
    P22 = deformation_cocycle(pen, c, N=3)
    terms = extend(pen, P22, 2, N=N)
    print("f =", f, " c =", c)
    for k in sorted(terms):
        print("  eps^%d:" % k, terms[k])
    # residuals of the first two steps
    r4 = schouten(P2, terms[4]) + schouten(terms[2], terms[2]).scale(Fraction(1, 2))
    r6 = schouten(P2, terms[6]) + schouten(terms[2], terms[4])
    print("  residuals zero:", r4.is_zero() and r6.is_zero())
    biv = {1: {0: P1}, 2: {0: P2, **terms}}
    print("  central invariant:", central_invariants(Deformation.from_bivectors(pen.fs, biv))[0])
