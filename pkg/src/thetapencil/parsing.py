"""Text syntax for elements of the density algebra.

Grammar::

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ['-'] atom ('^' uint)?
    atom   := uint | u{i} | u{i}_{s} | th{i}_{s} | f{i} | f{i}_d{j,k,..}
              | log_u{i} | L | '(' expr ')'

``u3`` is the coordinate u^3 (a coefficient), ``u3_2`` the jet u^{3,2},
``th1_0`` the odd variable theta_1^0 and ``L`` the spectral parameter.
``f1_d{1,2}`` is the jet d^2 f^1 / du^1 du^2.  Division is only allowed by
nonzero coefficients.  ``str(parse(s))`` gives the canonical form and
``parse(str(x)) == x``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .algebra import ONE_KEY, ThetaElement
from .coeffs import CoeffField

__all__ = ["ParseError", "tokenize", "parse_ast", "parse", "render"]


class ParseError(ValueError):
    """Syntax or index error, with 1-based line and column."""

    def __init__(self, message, line, col):
        super().__init__("%s at line %d, column %d" % (message, line, col))
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<theta>th(?P<th_i>\d+)_(?P<th_s>\d+))
  | (?P<log>log_u(?P<log_i>\d+))
  | (?P<fjet>f(?P<f_i>\d+)(?:_d\{(?P<f_d>[\d,\s]*)\})?)
  | (?P<u>u(?P<u_i>\d+)(?:_(?P<u_s>\d+))?)
  | (?P<lam>L)
  | (?P<int>\d+)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


def _position(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character %r" % text[pos], *_position(text, pos))
        if m.lastgroup != "ws":
            out.append((m, pos))
        pos = m.end()
    return out


# the AST is made of tuples: ("num", k), ("u", i, s), ("th", i, s), ("f", i, J),
# ("log", i), ("L",), ("neg", a), ("add", a, b), ("sub", a, b), ("mul", a, b),
# ("div", a, b), ("pow", a, k)


class _Parser:
    def __init__(self, text, n):
        self.text = text
        self.n = n
        self.toks = tokenize(text)
        self.k = 0

    def error(self, message, pos=None):
        if pos is None:
            pos = self.toks[self.k][1] if self.k < len(self.toks) else len(self.text)
        raise ParseError(message, *_position(self.text, pos))

    def peek(self):
        if self.k < len(self.toks):
            m, _ = self.toks[self.k]
            return m.group(0) if m.lastgroup == "op" else m.lastgroup
        return None

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def index(self, s, pos, what):
        i = int(s)
        if not 1 <= i <= self.n:
            self.error("%s index %d out of range 1..%d" % (what, i, self.n), pos)
        return i

    def expr(self):
        if self.peek() == "-":
            self.take()
            node = ("neg", self.term())
        else:
            node = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[0].group(0)
            node = ("add" if op == "+" else "sub", node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()[0].group(0)
            node = ("mul" if op == "*" else "div", node, self.factor())
        return node

    def factor(self):
        if self.peek() == "-":
            self.take()
            return ("neg", self.factor())
        node = self.atom()
        if self.peek() == "^":
            self.take()
            if self.peek() != "int":
                self.error("expected an exponent")
            node = ("pow", node, int(self.take()[0].group(0)))
        return node

    def atom(self):
        kind = self.peek()
        if kind is None:
            self.error("unexpected end of input")
        m, pos = self.take()
        if kind == "int":
            return ("num", int(m.group(0)))
        if kind == "u":
            i = self.index(m.group("u_i"), pos, "coordinate")
            return ("u", i, int(m.group("u_s") or 0))
        if kind == "theta":
            return ("th", self.index(m.group("th_i"), pos, "theta"), int(m.group("th_s")))
        if kind == "log":
            return ("log", self.index(m.group("log_i"), pos, "log"))
        if kind == "fjet":
            i = self.index(m.group("f_i"), pos, "function")
            J = [0] * self.n
            if m.group("f_d") is not None:
                for part in m.group("f_d").split(","):
                    part = part.strip()
                    if not part:
                        self.error("empty derivative index", pos)
                    J[self.index(part, pos, "derivative") - 1] += 1
            return ("f", i, tuple(J))
        if kind == "lam":
            return ("L",)
        if kind == "(":
            node = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.take()
            return node
        self.error("unexpected %r" % m.group(0), pos)


def parse_ast(text, n):
    p = _Parser(text, n)
    if not p.toks:
        raise ParseError("empty expression", 1, 1)
    node = p.expr()
    if p.k < len(p.toks):
        p.error("unexpected %r" % p.toks[p.k][0].group(0))
    return node


def _walk(node):
    yield node
    for child in node[1:]:
        if isinstance(child, tuple) and child and isinstance(child[0], str):
            yield from _walk(child)


def _pick_field(ast, n, field, fs):
    if fs is not None:
        return fs[0].field
    orders = [sum(x[2]) for x in _walk(ast) if x[0] == "f"]
    logs = any(x[0] == "log" for x in _walk(ast))
    if field is not None:
        if orders and not field.is_generic:
            raise ValueError("expression uses f-symbols but the field is concrete")
        if orders and max(orders) > field.jet_order:
            return CoeffField.get(n, max(orders))
        return field
    if orders:
        return CoeffField.generic(n, max(4, max(orders)))
    return CoeffField.concrete(n, logs=logs)


def _jet_of(f, J):
    for j, e in enumerate(J, start=1):
        for _ in range(e):
            f = f.d_du(j)
    return f


def _eval(node, field, fs):
    kind = node[0]
    if kind == "num":
        return ThetaElement.const(field, node[1])
    if kind == "u":
        return ThetaElement.u(field, node[1], node[2])
    if kind == "th":
        return ThetaElement.theta(field, node[1], node[2])
    if kind == "log":
        return ThetaElement.coeff(field.log_u(node[1]))
    if kind == "f":
        if fs is not None:
            return ThetaElement.coeff(_jet_of(fs[node[1] - 1], node[2]))
        return ThetaElement.coeff(field.f(node[1], node[2]).promote(field))
    if kind == "L":
        return ThetaElement.lam(field)
    if kind == "neg":
        return -_eval(node[1], field, fs)
    if kind == "pow":
        return _eval(node[1], field, fs) ** node[2]
    a = _eval(node[1], field, fs)
    b = _eval(node[2], field, fs)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        if set(b.terms) - {ONE_KEY}:
            raise ValueError("division by a non-coefficient %s" % b)
        if b.is_zero():
            raise ZeroDivisionError("division by zero")
        return a.scale(b.terms[ONE_KEY].inverse())
    raise AssertionError(kind)


def parse(text, n, field=None, fs=None):
    """Parse ``text`` into a :class:`ThetaElement` in dimension ``n``.

    With ``fs`` given (a list of coefficients) the symbols ``f{i}`` and their
    jets are replaced by the corresponding functions and derivatives.
    """
    ast = parse_ast(text, n)
    field = _pick_field(ast, n, field, fs)
    if fs is not None and len(fs) != n:
        raise ValueError("need %d functions, got %d" % (n, len(fs)))
    return _eval(ast, field, fs)


def render(x):
    return str(x)
