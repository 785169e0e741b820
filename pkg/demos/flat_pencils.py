"""Check D1^2 = D2^2 = [D1, D2] = 0 on generators for a few pencils.

Run:  python3 demos/flat_pencils.py
"""
from thetapencil.coeffs import CoeffField
from thetapencil.pencil import Pencil, generators, square_checks


def defects(pen, deg):
    bad = []
    for g in generators(pen.n, deg):
        for name, v in square_checks(pen, g):
            if not v.is_zero():
                bad.append((g, name))
    return bad


F2 = CoeffField.concrete(2)
u1, u2 = F2.u(1), F2.u(2)

cases = [
    ("n=1 generic f", Pencil(n=1)),
    ("n=2 f=(1/(u1-u2), 1/(u2-u1))", Pencil([1 / (u1 - u2), 1 / (u2 - u1)])),
    ("n=2 f=(u1, u2)", Pencil([u1, u2])),
    ("n=2 f=(u2, u1)", Pencil([u2, u1])),  # not flat, should show defects
]

for label, pen in cases:
    bad = defects(pen, 2)
    print("%-32s %s" % (label, "ok" if not bad else "%d defects, first %s" % (len(bad), bad[0])))
