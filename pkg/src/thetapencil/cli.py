"""Command line front end: ``thetapencil <command> [options]``.

Exit codes: 0 pass, 1 failed check, 2 window exhaustion, 3 bad input.
Reports go to standard output as a table; ``--json`` / ``--csv`` write
files.  ``--config file.json`` supplies option values (flags given on the
command line win).  THETAPENCIL_THREADS sets the worker count for batched
checks (default 1).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import __version__
from .algebra import ThetaElement, graded_commutator, jet_monomials
from .coeffs import CoeffField
from .parsing import ParseError, parse

EXIT_OK, EXIT_FAIL, EXIT_WINDOW, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(EXIT_INPUT)


# ---------------------------------------------------------------------------
# helpers


def threads():
    raw = os.environ.get("THETAPENCIL_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        raise InputError("THETAPENCIL_THREADS must be a positive integer, got %r" % raw)
    if k < 1:
        raise InputError("THETAPENCIL_THREADS must be a positive integer, got %r" % raw)
    return k


def ordered_map(fn, items):
    """map with THETAPENCIL_THREADS workers; results keep the input order."""
    k = threads()
    if k == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


def _split_top(text):
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [p.strip() for p in parts]


def parse_functions(text, n):
    """``generic`` or a comma separated list of n coefficient expressions in u1..un."""
    if n is None or n < 1:
        raise InputError("--n must be a positive integer")
    items = [str(x) for x in text] if isinstance(text, list) else _split_top(text or "generic")
    if all(x in ("generic", "f-generic") for x in items):
        return None
    if len(items) != n:
        raise InputError("--f needs %d functions, got %d" % (n, len(items)))
    field = CoeffField.concrete(n)
    out = []
    for text in items:
        x = _parse_expr(str(text), n, field)
        if set(x.terms) - {(0, (), ())}:
            raise InputError("f must be a function of u1..u%d, got %r" % (n, text))
        c = x.terms.get((0, (), ()), field.zero())
        if c.is_zero():
            raise InputError("f must be non-vanishing, got %r" % text)
        out.append(c)
    return out


def _parse_expr(text, n, field=None, fs=None):
    try:
        return parse(text, n, field=field, fs=fs)
    except ParseError as e:
        raise InputError("cannot parse %r: %s" % (text, e))
    except (ValueError, ZeroDivisionError) as e:
        raise InputError("bad expression %r: %s" % (text, e))


def make_pencil(args, concrete=False):
    from .pencil import Pencil

    fs = parse_functions(args.f, args.n)
    if fs is None:
        if concrete:
            raise InputError("generic f is not supported here: ranks need concrete functions "
                             "(pass e.g. --f 1 or --f u1)")
        return Pencil(n=args.n)
    return Pencil(fs)


def _table(header, rows):
    rows = [[str(c) for c in r] for r in rows]
    widths = [max(len(h), *(len(r[k]) for r in rows)) if rows else len(h) for k, h in enumerate(header)]
    line = "  ".join(h.ljust(w) for h, w in zip(header, widths))
    out = [line, "  ".join("-" * w for w in widths)]
    for r in rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(out)


class Report:
    """Rows plus a status, with a text renderer and JSON/CSV writers."""

    def __init__(self, command, header, status=EXIT_OK):
        self.command = command
        self.header = header
        self.rows = []
        self.status = status
        self.notes = []
        self.data = {}

    def add(self, *row):
        self.rows.append(list(row))

    def fail(self, code=EXIT_FAIL):
        # assertion failures dominate window exhaustion
        if self.status == EXIT_OK or code == EXIT_FAIL:
            self.status = code

    def verdict(self):
        return {EXIT_OK: "pass", EXIT_FAIL: "FAIL", EXIT_WINDOW: "window exhausted"}[self.status]

    def text(self):
        out = [_table(self.header, self.rows)] if self.header else []
        out += self.notes
        out.append("%s: %s" % (self.command, self.verdict()))
        return "\n".join(out) + "\n"

    def to_json(self):
        obj = {"command": self.command, "status": self.verdict(), "exit_code": self.status,
               "header": self.header, "rows": self.rows, "notes": self.notes}
        obj.update(self.data)
        return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_verify_squares(args):
    from .pencil import generators, square_checks

    pen = make_pencil(args)
    rep = Report("verify-squares", ["generator", "identity", "zero"])
    gens = generators(pen.n, args.deg)
    results = ordered_map(lambda g: square_checks(pen, g), gens)
    for gen, res in zip(gens, results):
        name = "%s%d_%d" % ("u" if gen[0] == "u" else "th", gen[1], gen[2])
        for ident, val in res:
            ok = val.is_zero()
            rep.add(name, ident, "yes" if ok else "no")
            if not ok:
                rep.fail()
    if rep.status and pen.is_generic and pen.n >= 2:
        rep.notes.append("note: generic f^i do not give flat metrics for n >= 2; "
                         "concrete flat choices such as --f '1/(u1 - u2),1/(u2 - u1)' pass")
    return rep


def homotopy_identity(pen, d_max, p_max, lam_max):
    """h D_{-1} + D_{-1} h = 1 - p_{i,s} on monomials; returns (checked, failures)."""
    from .homotopy import delta_minus1, homotopy_h, projection_p_is

    F = pen.field
    Dm1 = delta_minus1(pen)
    checked, bad = 0, []
    ops = {}
    for d in range(d_max + 1):
        for p in range(p_max + 1):
            for key in jet_monomials(pen.n, p, d):
                for lam in range(lam_max + 1):
                    x = ThetaElement.monomial(F, (lam, key[1], key[2]))
                    for i in range(1, pen.n + 1):
                        for s in range(1, d + 2):
                            if (i, s) not in ops:
                                ops[i, s] = (homotopy_h(pen, i, s), projection_p_is(pen, i, s))
                            h, ps = ops[i, s]
                            lhs = h(Dm1(x)) + Dm1(h(x))
                            checked += 1
                            if lhs != x - ps(x):
                                bad.append((str(x), i, s))
    return checked, bad


def cmd_homotopy_check(args):
    from .homotopy import D_op, d_hat, delta_01, delta_minus1, weight_basis

    pen = make_pencil(args)
    F = pen.field
    rep = Report("homotopy-check", ["check", "cases", "failures"])
    checked, bad = homotopy_identity(pen, args.deg, args.pmax, args.lam)
    rep.add("homotopy identity", checked, len(bad))
    if bad:
        rep.fail()
        rep.notes += ["failure: %s (i=%d, s=%d)" % b for b in bad[:5]]
    # anticommutator of the two pieces
    Dm1, D01 = delta_minus1(pen), delta_01(pen)
    from .pencil import generator_element, generators

    cnt = nbad = 0
    for gen in generators(pen.n, args.deg):
        x = generator_element(F, gen)
        cnt += 1
        if not graded_commutator(Dm1, D01, x).is_zero():
            nbad += 1
    rep.add("D_-1 D_01 + D_01 D_-1 = 0", cnt, nbad)
    if nbad:
        rep.fail()
    # commutator and eigenvalue facts
    cnt = nbad = 0
    for i in range(1, pen.n + 1):
        Di, dh = D_op(pen, i, i), d_hat(F, i)
        fi = pen.fs[i - 1]
        for p in range(0, 3):
            for key in jet_monomials(pen.n, p, min(args.deg, 4)):
                x = ThetaElement.monomial(F, key)
                cnt += 1
                if graded_commutator(Di, dh, x) != -dh(x).scale(fi):
                    nbad += 1
        for w2 in range(1, 9):
            w = Fraction(w2, 2)
            for key in weight_basis(i, w):
                dm = dh(ThetaElement.monomial(F, key))
                cnt += 1
                if Di(dm) != dm.scale(fi * (w - 1)):
                    nbad += 1
    rep.add("[D_i, d_i] = -f^i d_i and eigenvalues", cnt, nbad)
    if nbad:
        rep.fail()
    return rep


def cmd_poincare(args):
    from .cohomology import poincare_check

    rep = Report("poincare", ["i", "p", "d", "dim_H", "dim_C"])
    for i in range(1, args.n + 1):
        for p, d, h, c in poincare_check(args.n, i, jet_max=args.jets, d_max=args.dmax):
            rep.add(i, p, d, h, c)
            if h != c:
                rep.fail()
    return rep


def _cohomology_header():
    return ["p", "d", "N", "L", "dim_ker", "dim_im", "dim_H", "stable"]


def _cell_row(c):
    return [c.p, c.d, c.N, c.L, c.dim_ker, c.dim_im, c.dim_H, "true" if c.stable else "false"]


def cmd_cohomology(args):
    from .cohomology import WindowError, truncated_cohomology

    pen = make_pencil(args, concrete=True)
    rep = Report("cohomology", _cohomology_header())
    try:
        cell = truncated_cohomology(pen, args.p, args.d, args.N, L=args.L)
    except WindowError as e:
        raise InputError(str(e))
    rep.add(*_cell_row(cell))
    rep.notes.append("next window dim_H = %s; inside the non-vanishing ranges: %s"
                     % (cell.dim_H_next, "yes" if cell.in_range else "no"))
    # inside the ranges any dimension is allowed; outside, H must settle at 0
    if not cell.in_range and not cell.stable:
        rep.fail(EXIT_WINDOW)
    elif not cell.in_range and cell.dim_H:
        rep.fail()
    rep.data["cell"] = cell.__dict__
    return rep


def _parse_cells(text):
    if not text:
        return ()
    out = []
    for part in text.split(";"):
        try:
            p, d = (int(x) for x in part.split(","))
        except ValueError:
            raise InputError("cells are given as 'p,d;p,d', got %r" % text)
        out.append((p, d))
    return tuple(out)


def cmd_vanishing_table(args):
    from .cohomology import verify_vanishing_table

    pen = make_pencil(args, concrete=True)
    extra = _parse_cells(args.extra)
    res = verify_vanishing_table(pen, args.dmax, args.N, L=args.L, extra_zero=extra)
    rep = Report("vanishing-table", _cohomology_header() + ["checked"])
    for c in res.cells:
        checked = (not c.in_range) or (c.p, c.d) in extra
        rep.add(*_cell_row(c), "yes" if checked else "no")
    for v in res.violations:
        rep.notes.append("violation at (p,d)=(%d,%d)" % tuple(v))
    for c in res.cells:
        if c.witness:
            rep.notes.append("witness at (%d,%d): %s" % (c.p, c.d, c.witness))
    for e in res.exhausted:
        rep.notes.append("not stabilized at (p,d)=(%d,%d)" % tuple(e))
    if res.exhausted:
        rep.fail(EXIT_WINDOW)
    if res.violations:
        rep.fail()
    rep.data.update({"mode": res.mode, "violations": res.violations, "exhausted": res.exhausted})
    return rep


# deformation files -----------------------------------------------------------


def load_deformation(path):
    """Read a deformation file; returns (pencil, Deformation, eps_order)."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as e:
        raise InputError("cannot read %s: %s" % (path, e))
    except json.JSONDecodeError as e:
        raise InputError("%s is not valid JSON: %s" % (path, e))
    return deformation_from_json(obj)


def deformation_from_json(obj):
    from .functionals import Deformation
    from .pencil import Pencil

    if not isinstance(obj, dict) or "n" not in obj:
        raise InputError("deformation file needs an object with key 'n'")
    n = obj["n"]
    if not isinstance(n, int) or n < 1:
        raise InputError("'n' must be a positive integer")
    f = obj.get("f", ["f-generic"])
    if isinstance(f, list) and all(x in ("f-generic", "generic") for x in f):
        fs = None
    else:
        fs = parse_functions(f if isinstance(f, list) else str(f), n)
    pen = Pencil(fs) if fs else Pencil(n=n)
    A = {1: {}, 2: {}}
    for name, entries in (obj.get("A") or {}).items():
        if name not in ("a=1", "a=2"):
            raise InputError("unknown bracket %r (use 'a=1' or 'a=2')" % name)
        a = int(name[2])
        for e in entries:
            try:
                idx = tuple(int(e[k]) for k in ("i", "j", "k", "l"))
                value = str(e["value"])
            except (KeyError, TypeError, ValueError):
                raise InputError("entries need integer i, j, k, l and a value: %r" % (e,))
            if not (1 <= idx[0] <= n and 1 <= idx[1] <= n) or idx[2] < 0 or idx[3] < 0:
                raise InputError("entry index out of range: %r" % (e,))
            v = _parse_expr(value, n, fs=pen.fs)
            A[a][idx] = A[a][idx] + v if idx in A[a] else v
    eps_order = obj.get("eps_order", 2)
    return pen, Deformation(pen.fs, A), eps_order


def deformation_to_json(pen, bivectors, eps_order):
    from .functionals import Deformation

    dfm = Deformation.from_bivectors(pen.fs, bivectors)
    generic = pen.is_generic
    out = {"n": pen.n, "f": ["f-generic"] * pen.n if generic else [str(f) for f in pen.fs],
           "A": {}, "eps_order": eps_order}
    for a in (1, 2):
        entries = []
        for (i, j, k, l), v in sorted(dfm.A[a].items()):
            if not v.is_zero():
                entries.append({"i": i, "j": j, "k": k, "l": l, "value": str(v)})
        out["A"]["a=%d" % a] = entries
    return out


def cmd_central_invariants(args):
    from .functionals import central_invariants

    pen, dfm, _ = load_deformation(args.input)
    try:
        cs = central_invariants(dfm)
    except ValueError as e:
        raise InputError(str(e))
    rep = Report("central-invariants", ["i", "c_i"])
    for i, c in enumerate(cs, start=1):
        rep.add(i, str(c))
    rep.notes += ["warning: %s" % w for w in cs.warnings]
    rep.data["central_invariants"] = [str(c) for c in cs]
    return rep


def cmd_extend(args):
    from .cohomology import WindowError
    from .deformation import ExtensionError, GradingError, extend
    from .functionals import LocalFunctional

    pen, dfm, _ = load_deformation(args.input)
    if pen.is_generic:
        raise InputError("extend needs concrete f (the solver works over Q)")
    if any(k > 0 and not v.is_zero() for (i, j, k, l), v in dfm.A[1].items()):
        raise InputError("the first bracket must be undeformed")
    if any(k not in (0, 2) and not v.is_zero() for (i, j, k, l), v in dfm.A[2].items()):
        raise InputError("only the eps^2 term of the second bracket is read")
    P22 = dfm.bivector(2, 2)
    rep = Report("extend", ["eps_power", "term"])
    try:
        terms = extend(pen, P22, args.steps, N=args.N)
    except ExtensionError as e:
        rep.notes.append("no solution in the window: %s" % e)
        rep.notes.append("residual: %s" % e.residual)
        rep.fail(EXIT_WINDOW)
        return rep
    except (GradingError, WindowError) as e:
        raise InputError(str(e))
    for k in sorted(terms):
        rep.add(k, str(terms[k]))
    bivectors = {1: {0: LocalFunctional(pen.P1())}, 2: {0: LocalFunctional(pen.P2())}}
    bivectors[2].update(terms)
    out = deformation_to_json(pen, bivectors, max(terms))
    rep.data["deformation"] = out
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(out, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return rep


def cmd_schouten(args):
    from .functionals import LocalFunctional, schouten

    pen = make_pencil(args)
    rep = Report("schouten", ["bracket", "value"])
    if args.P is None and args.Q is None:
        P1, P2 = LocalFunctional(pen.P1()), LocalFunctional(pen.P2())
        for name, a, b in (("[P1,P1]", P1, P1), ("[P1,P2]", P1, P2), ("[P2,P2]", P2, P2)):
            v = schouten(a, b)
            rep.add(name, str(v))
            if not v.is_zero():
                rep.fail()
        return rep
    if args.P is None or args.Q is None:
        raise InputError("give both --P and --Q")
    fs = None if pen.is_generic else pen.fs
    field = pen.field if pen.is_generic else None
    P = LocalFunctional(_parse_expr(args.P, pen.n, field=field, fs=fs))
    Q = LocalFunctional(_parse_expr(args.Q, pen.n, field=field, fs=fs))
    try:
        v = schouten(P, Q)
    except ValueError as e:
        raise InputError(str(e))
    rep.add("[P,Q]", str(v))
    return rep


# ---------------------------------------------------------------------------
# self tests


def _selftest(command):
    """Fixture examples for each command; returns a Report."""
    from .pencil import Pencil

    rep = Report(command + " --selftest", ["fixture", "ok"])

    def check(name, ok):
        rep.add(name, "yes" if ok else "no")
        if not ok:
            rep.fail()

    def run(argv):
        return run_command(build_parser().parse_args(argv))

    F1 = CoeffField.generic(1)
    if command == "verify-squares":
        check("n=1 generic, s<=3", run(["verify-squares", "--n", "1", "--deg", "3"]).status == 0)
        check("n=2 flat pair", run(["verify-squares", "--n", "2", "--f", "1/(u1-u2),1/(u2-u1)",
                                    "--deg", "2"]).status == 0)
    elif command == "homotopy-check":
        from .homotopy import delta_minus1

        pen = Pencil(n=1)
        x = delta_minus1(pen)(ThetaElement.u(pen.field, 1, 1))
        check("D_-1(u1_1) = (-L + u1)*f1*th1_2", x == parse("(-L + u1)*f1*th1_2", 1, field=pen.field))
        check("n=1 identities, d<=2", run(["homotopy-check", "--n", "1", "--deg", "2", "--pmax", "3",
                                           "--lam", "1"]).status == 0)
    elif command == "poincare":
        check("n=1 jets<=2", run(["poincare", "--n", "1", "--jets", "2", "--dmax", "5"]).status == 0)
    elif command == "cohomology":
        for p, d in ((0, 1), (4, 3)):
            r = run(["cohomology", "--n", "1", "--f", "1", "--p", str(p), "--d", str(d), "--N", "2"])
            check("n=1 f=1 H(%d,%d) = 0" % (p, d), r.status == 0 and r.rows[0][6] == 0)
    elif command == "vanishing-table":
        check("n=1 f=1 d<=3", run(["vanishing-table", "--n", "1", "--f", "1", "--dmax", "3",
                                   "--N", "2"]).status == 0)
    elif command == "central-invariants":
        from .functionals import Deformation, central_invariants

        pen = Pencil(n=1)
        check("zero deformation", central_invariants(Deformation(pen.fs))[0].is_zero())
        f1 = F1.f(1)
        d = Deformation(pen.fs, {2: {(1, 1, 2, 3): ThetaElement.coeff(3 * f1 * f1)}})
        check("A^{11}_{2,3;2} = 3 f^2 gives 1", central_invariants(d)[0].is_one())
    elif command == "extend":
        from .deformation import extend, scalar_deformation
        from .functionals import LocalFunctional

        pen = Pencil([CoeffField.concrete(1).one()])
        t = extend(pen, LocalFunctional.zero(pen.field), 1)
        check("P2^2 = 0 gives P2^4 = 0", t[4].is_zero())
        t = extend(pen, scalar_deformation(pen, 1), 2)
        check("n=1 f=1 c=1, two steps", 4 in t and 6 in t)
    elif command == "schouten":
        check("n=1 generic compatibility", run(["schouten", "--n", "1"]).status == 0)
        x = parse("th1_0*th1_0", 1)
        check("th1_0*th1_0 = 0", x.is_zero())
    return rep


# ---------------------------------------------------------------------------
# argument parsing


COMMANDS = {
    "verify-squares": cmd_verify_squares,
    "homotopy-check": cmd_homotopy_check,
    "poincare": cmd_poincare,
    "cohomology": cmd_cohomology,
    "vanishing-table": cmd_vanishing_table,
    "central-invariants": cmd_central_invariants,
    "extend": cmd_extend,
    "schouten": cmd_schouten,
}


def build_parser():
    ap = _Parser(prog="thetapencil", description="Checks for bi-Hamiltonian pencils in the theta formalism.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, needs_n=True):
        if needs_n:
            p.add_argument("--n", type=int, default=1, help="number of components (default 1)")
            p.add_argument("--f", default="generic",
                           help="'generic' or n comma separated functions of u1..un (default generic)")
        p.add_argument("--seed", type=int, default=0, help="seed for the global RNG (default 0); the built-in checks are exhaustive")
        p.add_argument("--json", metavar="PATH", help="write the report as JSON")
        p.add_argument("--csv", metavar="PATH", help="write the table as CSV")
        p.add_argument("--config", metavar="PATH", help="JSON file with option values")
        p.add_argument("--selftest", action="store_true", help="run the fixture examples")
        return p

    p = common(sub.add_parser("verify-squares", help="D1^2 = D2^2 = D1D2 + D2D1 = 0 on generators"))
    p.add_argument("--deg", type=int, default=4, help="maximal jet order s (default 4)")

    p = common(sub.add_parser("homotopy-check", help="homotopy identity and operator facts"))
    p.add_argument("--deg", type=int, default=3, help="maximal standard degree (default 3)")
    p.add_argument("--pmax", type=int, default=4, help="maximal super degree (default 4)")
    p.add_argument("--lam", type=int, default=2, help="maximal lambda power (default 2)")

    p = common(sub.add_parser("poincare", help="truncated Poincare lemma for d-hat_i"))
    p.add_argument("--jets", type=int, default=3, help="maximal jet order (default 3)")
    p.add_argument("--dmax", type=int, default=8, help="maximal standard degree (default 8)")

    p = common(sub.add_parser("cohomology", help="truncated dim H^p_d of (A[lambda], D_lambda)"))
    p.add_argument("--p", type=int, default=None, help="super degree (required)")
    p.add_argument("--d", type=int, default=None, help="standard degree (required)")
    p.add_argument("--N", type=int, default=3, help="coefficient window (default 3)")
    p.add_argument("--L", type=int, default=None, help="lambda window (default N)")

    p = common(sub.add_parser("vanishing-table", help="dim H = 0 outside the non-vanishing ranges"))
    p.add_argument("--dmax", type=int, default=4, help="maximal standard degree (default 4)")
    p.add_argument("--N", type=int, default=3, help="coefficient window (default 3)")
    p.add_argument("--L", type=int, default=None, help="lambda window (default N)")
    p.add_argument("--extra", default="", help="extra cells required to vanish, e.g. '1,0;1,1;2,2'")

    p = common(sub.add_parser("central-invariants", help="central invariants of a deformation file"),
               needs_n=False)
    p.add_argument("--input", help="deformation JSON file")

    p = common(sub.add_parser("extend", help="extend an eps^2 deformation order by order"), needs_n=False)
    p.add_argument("--input", help="deformation JSON file (n, f, A with the eps^2 term)")
    p.add_argument("--steps", type=int, default=1, help="number of extension steps (default 1)")
    p.add_argument("--N", type=int, default=1, help="coefficient window of the solver (default 1)")
    p.add_argument("--output", metavar="PATH", help="write the extended deformation file")

    p = common(sub.add_parser("schouten", help="Schouten bracket of two local functionals"))
    p.add_argument("--P", help="density of the first functional")
    p.add_argument("--Q", help="density of the second functional")
    return ap


def _apply_config(ap, argv, args):
    if not args.config:
        return args
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError("cannot read config %s: %s" % (args.config, e))
    if not isinstance(cfg, dict):
        raise InputError("config file must hold a JSON object")
    known = set(vars(args))
    for k, v in cfg.items():
        key = k.replace("-", "_")
        if key not in known or key in ("command", "config"):
            raise InputError("unknown config option %r" % k)
    # re-parse with the config as defaults so explicit flags still win
    sp = ap._subparsers._group_actions[0].choices[args.command]
    sp.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return ap.parse_args(argv)


def _validate(args):
    for name in ("n", "deg", "pmax", "lam", "jets", "dmax", "N", "L", "steps", "p", "d"):
        v = getattr(args, name, None)
        if v is None:
            continue
        if not isinstance(v, int) or v < (1 if name == "n" else 0):
            raise InputError("--%s must be a %s integer" % (name, "positive" if name == "n" else "nonnegative"))
    if args.command in ("central-invariants", "extend") and not args.selftest and not args.input:
        raise InputError("--input is required")
    if args.command == "cohomology" and not args.selftest and (args.p is None or args.d is None):
        raise InputError("--p and --d are required")
    if isinstance(getattr(args, "f", None), list):
        args.f = ",".join(map(str, args.f))


def run_command(args):
    """Run a parsed command and return its Report (no output written)."""
    _validate(args)
    random.seed(args.seed)
    if args.selftest:
        return _selftest(args.command)
    return COMMANDS[args.command](args)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        args = _apply_config(ap, argv, args)
        rep = run_command(args)
    except InputError as e:
        sys.stderr.write("error: %s\n" % e)
        return EXIT_INPUT
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    sys.stdout.write(rep.text())
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(rep.to_json())
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(rep.to_csv())
    return rep.status


if __name__ == "__main__":
    sys.exit(main())
