"""Arithmetic expressions in the single variable ``s``.

Grammar (recursive descent, whitespace ignored)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?
    primary := number | 's' | ident '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so
``-s^2`` is ``-(s^2)`` and ``2^-1`` is ``0.5``. There is no implicit
multiplication. Functions: sin cos tan asin acos atan sqrt exp log abs sec.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import DomainFault, ExprSyntaxError, UnknownFunction

FUNCTIONS = {
    "sin": (math.sin, np.sin),
    "cos": (math.cos, np.cos),
    "tan": (math.tan, np.tan),
    "asin": (math.asin, np.arcsin),
    "acos": (math.acos, np.arccos),
    "atan": (math.atan, np.arctan),
    "sqrt": (math.sqrt, np.sqrt),
    "exp": (math.exp, np.exp),
    "log": (math.log, np.log),
    "abs": (abs, np.abs),
    "sec": (lambda x: 1.0 / math.cos(x), lambda x: 1.0 / np.cos(x)),
}

_OPERAND = ("number", "'s'", "function", "'('", "'-'")
_AFTER_OPERAND = ("'+'", "'-'", "'*'", "'/'", "'^'")


# -- syntax tree ------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"
    offset: int = field(default=0, compare=False)


Expr = Union[Num, Var, Neg, BinOp, Call]


# -- tokenizer --------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text: str):
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos),
                                  _OPERAND + _AFTER_OPERAND + ("')'",))
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(_Tok("end", "", n))
    return out


def _byte_offset(text, pos):
    return len(text[:pos].encode("utf-8"))


# -- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, message, expected):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"{message}: found {found}", _byte_offset(self.text, t.offset), expected)

    def take(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def parse(self):
        e = self.expr()
        if self.tok.kind != "end":
            expected = _AFTER_OPERAND + ("end of input",)
            if self.tok.text == ")":
                self.fail("unbalanced ')'", expected)
            self.fail("unexpected token", expected)
        return e

    def expr(self):
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok
            self.i += 1
            e = BinOp(op.text, e, self.term(), op.offset)
        return e

    def term(self):
        e = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok
            self.i += 1
            e = BinOp(op.text, e, self.unary(), op.offset)
        return e

    def unary(self):
        t = self.tok
        if self.take("-"):
            return Neg(self.unary(), t.offset)
        return self.power()

    def power(self):
        base = self.primary()
        t = self.tok
        if self.take("^"):
            return BinOp("^", base, self.unary(), t.offset)
        return base

    def primary(self):
        t = self.tok
        if t.kind == "number":
            self.i += 1
            return Num(float(t.text), t.offset)
        if t.kind == "ident":
            if t.text == "s":
                self.i += 1
                return Var(t.offset)
            nxt = self.toks[self.i + 1]
            is_call = nxt.kind == "op" and nxt.text == "("
            if t.text not in FUNCTIONS:
                if is_call:
                    raise UnknownFunction(t.text, _byte_offset(self.text, t.offset))
                self.fail(f"unknown variable {t.text!r} (only 's' is allowed)", _OPERAND)
            self.i += 1
            if not self.take("("):
                self.fail(f"'(' must follow function {t.text!r}", ("'('",))
            arg = self.expr()
            if not self.take(")"):
                self.fail("missing ')'", _AFTER_OPERAND + ("')'",))
            return Call(t.text, arg, t.offset)
        if self.take("("):
            e = self.expr()
            if not self.take(")"):
                self.fail("missing ')'", _AFTER_OPERAND + ("')'",))
            return e
        self.fail("expected an operand", _OPERAND)


def parse_expr(text: str) -> Expr:
    """Parse ``text`` into a syntax tree.

    Raises :class:`ExprSyntaxError` (with byte offset and the set of
    acceptable tokens) or :class:`UnknownFunction`.
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, _OPERAND)
    return _Parser(text).parse()


# -- printer ----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4, "atom": 5}


def _prec(e) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return _PREC["atom"]


def _num(v: float) -> str:
    if math.isinf(v):
        return "1e999"
    r = repr(float(v))
    return r[:-2] if r.endswith(".0") else r


def to_text(e: Expr) -> str:
    """Canonical text: minimal parentheses that reproduce the same tree."""
    def wrap(sub, min_prec):
        t = to_text(sub)
        return t if _prec(sub) >= min_prec else f"({t})"

    if isinstance(e, Num):
        return _num(e.value)
    if isinstance(e, Var):
        return "s"
    if isinstance(e, Call):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Neg):
        return "-" + wrap(e.operand, _PREC["neg"])
    p = _PREC[e.op]
    if e.op == "^":
        return f"{wrap(e.left, _PREC['atom'])}^{wrap(e.right, _PREC['neg'])}"
    if e.op in "*/":
        return f"{wrap(e.left, p)}{e.op}{wrap(e.right, _PREC['neg'])}"
    return f"{wrap(e.left, p)}{e.op}{wrap(e.right, p + 1)}"


# -- evaluation -------------------------------------------------------------

def _fault(s, e, reason):
    raise DomainFault(s, to_text(e), reason)


def eval_expr(e: Expr, s: float) -> float:
    """Evaluate at one point in IEEE double precision.

    Raises :class:`DomainFault` for a square root of a negative number, a
    logarithm of a non-positive number, division by zero, inverse sine or
    cosine outside [-1, 1], a non-real power, or any non-finite result.
    """
    s = float(s)

    def ev(n):
        if isinstance(n, Num):
            return n.value
        if isinstance(n, Var):
            return s
        if isinstance(n, Neg):
            return -ev(n.operand)
        if isinstance(n, Call):
            x = ev(n.arg)
            if n.name == "sqrt" and x < 0:
                _fault(s, n, "square root of a negative number")
            if n.name == "log" and x <= 0:
                _fault(s, n, "logarithm of a non-positive number")
            if n.name in ("asin", "acos") and abs(x) > 1:
                _fault(s, n, f"{n.name} argument outside [-1, 1]")
            try:
                v = FUNCTIONS[n.name][0](x)
            except (OverflowError, ZeroDivisionError, ValueError):
                _fault(s, n, f"{n.name} undefined")
        else:
            a, b = ev(n.left), ev(n.right)
            if n.op == "+":
                v = a + b
            elif n.op == "-":
                v = a - b
            elif n.op == "*":
                v = a * b
            elif n.op == "/":
                if b == 0:
                    _fault(s, n, "division by zero")
                v = a / b
            else:
                if a == 0 and b < 0:
                    _fault(s, n, "division by zero")
                if a < 0 and not float(b).is_integer():
                    _fault(s, n, "non-real power")
                try:
                    v = a ** b
                except OverflowError:
                    _fault(s, n, "overflow")
        if not math.isfinite(v):
            _fault(s, n, "non-finite result")
        return v

    return float(ev(e))


def _vector_eval(e: Expr, s: np.ndarray) -> np.ndarray:
    if isinstance(e, Num):
        return np.full_like(s, e.value)
    if isinstance(e, Var):
        return s
    if isinstance(e, Neg):
        return -_vector_eval(e.operand, s)
    if isinstance(e, Call):
        return FUNCTIONS[e.name][1](_vector_eval(e.arg, s))
    a, b = _vector_eval(e.left, s), _vector_eval(e.right, s)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if e.op == "/":
        return np.where(b == 0, np.nan, a / np.where(b == 0, 1.0, b))
    return np.power(a, b)


def compile_expr(e: Union[Expr, str]) -> Callable:
    """Vectorised evaluator ``f(s)`` for scalars or arrays.

    Array evaluation uses numpy; if any entry comes out non-finite the
    first offending point is re-evaluated by :func:`eval_expr` so the
    :class:`DomainFault` names the failing subexpression.
    """
    tree = parse_expr(e) if isinstance(e, str) else e

    def f(s):
        arr = np.asarray(s, dtype=float)
        with np.errstate(all="ignore"):
            v = np.asarray(_vector_eval(tree, arr.ravel()), dtype=float)
        bad = ~np.isfinite(v)
        if bad.any():
            x = float(arr.ravel()[np.flatnonzero(bad)[0]])
            eval_expr(tree, x)
            raise DomainFault(x, to_text(tree), "non-finite result")
        v = v.reshape(arr.shape)
        return float(v) if arr.ndim == 0 else v

    f.expr = tree
    f.text = to_text(tree)
    return f
