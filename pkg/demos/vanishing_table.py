"""Truncated cohomology dims for n=1 and a couple of choices of f.

Run:  python3 demos/vanishing_table.py
"""
from thetapencil.coeffs import CoeffField
from thetapencil.cohomology import verify_vanishing_table
from thetapencil.pencil import Pencil

F = CoeffField.concrete(1)
for label, f in [("f=1", F.one()), ("f=u1", F.u(1))]:
    rep = verify_vanishing_table(Pencil([f]), 4, 3, extra_zero=[(1, 0), (1, 1), (2, 2)])
    print("#", label, "passed" if rep.passed else "violations %s" % rep.violations)
    print(rep.to_csv())
