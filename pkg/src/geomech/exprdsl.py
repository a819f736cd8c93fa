"""Symbolic scalar expressions on a chart: parsing, printing, exact
differentiation, substitution, and deterministic evaluation.

An expression lives on a chart of declared dimension ``n``.  Coordinates are
written ``x1 .. xn``, fibre velocities ``v1 .. vn`` (both 1-based in source
text), and the recognised functions are ``sin cos exp log sqrt atan2``.
Grammar, informally::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?          # right associative, binds above '-'
    atom   := number | ident | func '(' expr (',' expr)* ')' | '(' expr ')'

so ``-x1^2`` is ``-(x1^2)`` and ``x1^2^3`` is ``x1^(2^3)``.

Differentiation is exact.  The only rewriting ever applied is constant
folding plus elimination of literal zero/one operands when expressions are
combined programmatically; parsed source is kept verbatim.  Evaluation
compiles each expression once to a flat sequence of Python statements, so
repeated evaluation is cheap and the operation order (hence the floating
point result) is fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

__all__ = [
    "DomainError",
    "EvalOverflowError",
    "ExprError",
    "FUNCTION_ARITY",
    "ParseError",
    "ScalarExpr",
    "Sym",
    "fn",
    "lit",
    "coord",
    "parse",
    "velocity",
]

FUNCTION_ARITY = {"sin": 1, "cos": 1, "exp": 1, "log": 1, "sqrt": 1, "atan2": 2}


class ExprError(ValueError):
    """Base class for expression failures."""


class ParseError(ExprError):
    """Source text was rejected; ``offset`` is the byte position of the error."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


class DomainError(ExprError):
    """A function was evaluated outside its domain: ``log``/``sqrt`` of an
    out-of-range value, division by zero, or an undefined power."""


class EvalOverflowError(ExprError):
    """Evaluation overflowed the double-precision range."""


# ---------------------------------------------------------------------------
# AST nodes.  Frozen dataclasses compare structurally; engine code builds
# DAGs (subterms are shared, never copied), which evaluation exploits.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Sym:
    kind: str  # "x" (coordinate) or "v" (velocity)
    index: int  # 0-based

    @property
    def name(self) -> str:
        return f"{self.kind}{self.index + 1}"


@dataclass(frozen=True)
class Neg:
    a: object


@dataclass(frozen=True)
class Bin:
    op: str  # one of + - * / ^
    a: object
    b: object


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


Node = Union[Num, Sym, Neg, Bin, Call]

_ZERO = Num(0.0)
_ONE = Num(1.0)


# ---------------------------------------------------------------------------
# Guarded numeric kernels.  Both constant folding and compiled evaluation go
# through these, so error behaviour and rounding are identical everywhere.
# ---------------------------------------------------------------------------


def _k_log(a: float) -> float:
    if a <= 0.0:
        raise DomainError(f"log of non-positive value {a!r}")
    return math.log(a)


def _k_sqrt(a: float) -> float:
    if a < 0.0:
        raise DomainError(f"sqrt of negative value {a!r}")
    return math.sqrt(a)


def _k_exp(a: float) -> float:
    try:
        return math.exp(a)
    except OverflowError as exc:
        raise EvalOverflowError(f"exp overflow at {a!r}") from exc


def _k_div(a: float, b: float) -> float:
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


def _k_pow(a: float, b: float) -> float:
    # math.pow (unlike the ** operator) never returns a complex number; a
    # negative base with a fractional exponent is a clean ValueError.
    try:
        return math.pow(a, b)
    except ValueError as exc:
        raise DomainError(f"undefined power {a!r} ^ {b!r}") from exc
    except OverflowError as exc:
        raise EvalOverflowError(f"power overflow {a!r} ^ {b!r}") from exc


_KERNELS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": _k_exp,
    "log": _k_log,
    "sqrt": _k_sqrt,
    "atan2": math.atan2,
}


# ---------------------------------------------------------------------------
# Smart constructors: constant folding plus identity elimination.  These are
# used by the differentiator and by programmatic composition; the parser
# builds raw nodes so printed source round-trips verbatim.
# ---------------------------------------------------------------------------


def _is_const(n: Node, value: float | None = None) -> bool:
    return type(n) is Num and (value is None or n.value == value)


def _fold2(op: str, a: float, b: float) -> Node | None:
    """Fold a constant binary operation, or return None if it would raise or
    produce a non-finite value (folding must never change error behaviour
    into silence, nor bake an unprintable literal into the tree)."""
    try:
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        elif op == "/":
            r = _k_div(a, b)
        else:
            r = _k_pow(a, b)
    except ExprError:
        return None
    return Num(r) if math.isfinite(r) else None


def nadd(a: Node, b: Node) -> Node:
    if type(a) is Num and type(b) is Num:
        folded = _fold2("+", a.value, b.value)
        if folded is not None:
            return folded
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Bin("+", a, b)


def nsub(a: Node, b: Node) -> Node:
    if type(a) is Num and type(b) is Num:
        folded = _fold2("-", a.value, b.value)
        if folded is not None:
            return folded
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return nneg(b)
    return Bin("-", a, b)


def nmul(a: Node, b: Node) -> Node:
    if type(a) is Num and type(b) is Num:
        folded = _fold2("*", a.value, b.value)
        if folded is not None:
            return folded
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return _ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a, -1.0):
        return nneg(b)
    if _is_const(b, -1.0):
        return nneg(a)
    return Bin("*", a, b)


def ndiv(a: Node, b: Node) -> Node:
    if type(a) is Num and type(b) is Num:
        folded = _fold2("/", a.value, b.value)
        if folded is not None:
            return folded
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return _ZERO
    if _is_const(b, 1.0):
        return a
    return Bin("/", a, b)


def npow(a: Node, b: Node) -> Node:
    if type(a) is Num and type(b) is Num:
        folded = _fold2("^", a.value, b.value)
        if folded is not None:
            return folded
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return _ONE
    return Bin("^", a, b)


def nneg(a: Node) -> Node:
    if type(a) is Num:
        return Num(-a.value)
    if type(a) is Neg:
        return a.a
    return Neg(a)


def ncall(name: str, *args: Node) -> Node:
    if name not in FUNCTION_ARITY:
        raise ExprError(f"unknown function {name!r}")
    if len(args) != FUNCTION_ARITY[name]:
        raise ExprError(f"{name} expects {FUNCTION_ARITY[name]} argument(s)")
    if all(type(a) is Num for a in args):
        try:
            r = _KERNELS[name](*[a.value for a in args])
        except ExprError:
            r = None
        if r is not None and math.isfinite(r):
            return Num(r)
    return Call(name, tuple(args))


# ---------------------------------------------------------------------------
# Exact differentiation.
# ---------------------------------------------------------------------------


def _diff_node(n: Node, var: Sym) -> Node:
    t = type(n)
    if t is Num:
        return _ZERO
    if t is Sym:
        return _ONE if n == var else _ZERO
    if t is Neg:
        return nneg(_diff_node(n.a, var))
    if t is Bin:
        da = _diff_node(n.a, var)
        db = _diff_node(n.b, var)
        op = n.op
        if op == "+":
            return nadd(da, db)
        if op == "-":
            return nsub(da, db)
        if op == "*":
            return nadd(nmul(da, n.b), nmul(n.a, db))
        if op == "/":
            num = nsub(nmul(da, n.b), nmul(n.a, db))
            return ndiv(num, npow(n.b, Num(2.0)))
        # power: constant exponents get the plain power rule (no exp/log
        # detour, so domains and derivatives stay exact for things like
        # x1^2 at x1 <= 0); variable exponents use a^b (b' log a + b a'/a).
        if type(n.b) is Num:
            c = n.b.value
            return nmul(Num(c), nmul(npow(n.a, Num(c - 1.0)), da))
        bracket = nadd(nmul(db, ncall("log", n.a)), ndiv(nmul(n.b, da), n.a))
        return nmul(n, bracket)
    # Call
    if n.fn == "atan2":
        y, x = n.args
        dy = _diff_node(y, var)
        dx = _diff_node(x, var)
        num = nsub(nmul(x, dy), nmul(y, dx))
        den = nadd(npow(x, Num(2.0)), npow(y, Num(2.0)))
        return ndiv(num, den)
    (u,) = n.args
    du = _diff_node(u, var)
    if n.fn == "sin":
        return nmul(ncall("cos", u), du)
    if n.fn == "cos":
        return nneg(nmul(ncall("sin", u), du))
    if n.fn == "exp":
        return nmul(n, du)
    if n.fn == "log":
        return ndiv(du, u)
    # sqrt
    return ndiv(du, nmul(Num(2.0), n))


# ---------------------------------------------------------------------------
# Printing.  Precedence-aware; a reparse of the printed form evaluates to
# bit-identical values (grouping is preserved with explicit parentheses).
# ---------------------------------------------------------------------------

_BIN_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 9


def _prec(n: Node) -> int:
    t = type(n)
    if t is Bin:
        return _BIN_PREC[n.op]
    if t is Neg:
        return _NEG_PREC
    if t is Num and (n.value < 0.0 or math.copysign(1.0, n.value) < 0.0):
        # a negative literal prints with a leading '-', so it parenthesizes
        # like a negation
        return _NEG_PREC
    return _ATOM_PREC


def _print_node(n: Node) -> str:
    t = type(n)
    if t is Num:
        return repr(n.value)
    if t is Sym:
        return n.name
    if t is Neg:
        inner = _print_node(n.a)
        if _prec(n.a) < _NEG_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    if t is Bin:
        my = _BIN_PREC[n.op]
        left = _print_node(n.a)
        right = _print_node(n.b)
        if n.op == "^":
            # right associative: parenthesize the left at equal precedence
            if _prec(n.a) <= my:
                left = f"({left})"
            if _prec(n.b) < my:
                right = f"({right})"
            return f"{left}^{right}"
        if _prec(n.a) < my:
            left = f"({left})"
        # parenthesize the right operand at equal precedence even for '+'
        # and '*': floating point is not associative and the reparse must
        # reproduce the exact grouping
        if _prec(n.b) <= my:
            right = f"({right})"
        return f"{left} {n.op} {right}"
    return f"{n.fn}({', '.join(_print_node(a) for a in n.args)})"


# ---------------------------------------------------------------------------
# Compilation.  Each distinct node (by identity) becomes one assignment, so
# shared subterms in a DAG are evaluated exactly once.
# ---------------------------------------------------------------------------


def _compile_node(node: Node) -> Callable:
    lines: list[str] = []
    names: dict[int, str] = {}

    def emit(n: Node) -> str:
        key = id(n)
        hit = names.get(key)
        if hit is not None:
            return hit
        t = type(n)
        if t is Num:
            rhs = repr(n.value)
        elif t is Sym:
            rhs = f"{'x' if n.kind == 'x' else 'v'}[{n.index}]"
        elif t is Neg:
            rhs = f"-{emit(n.a)}"
        elif t is Bin:
            a = emit(n.a)
            b = emit(n.b)
            if n.op == "/":
                rhs = f"_div({a}, {b})"
            elif n.op == "^":
                rhs = f"_pow({a}, {b})"
            else:
                rhs = f"{a} {n.op} {b}"
        else:
            rhs = f"_{n.fn}({', '.join(emit(a) for a in n.args)})"
        name = f"t{len(names)}"
        names[key] = name
        lines.append(f"    {name} = {rhs}")
        return name

    root = emit(node)
    src = "def _f(x, v):\n" + "\n".join(lines) + f"\n    return {root}\n"
    namespace = {
        "_div": _k_div,
        "_pow": _k_pow,
        "_sin": math.sin,
        "_cos": math.cos,
        "_exp": _k_exp,
        "_log": _k_log,
        "_sqrt": _k_sqrt,
        "_atan2": math.atan2,
    }
    exec(compile(src, "<scalar-expr>", "exec"), namespace)
    return namespace["_f"]


def _collect_syms(n: Node, acc: set, seen: set) -> None:
    if id(n) in seen:
        return
    seen.add(id(n))
    t = type(n)
    if t is Sym:
        acc.add(n)
    elif t is Neg:
        _collect_syms(n.a, acc, seen)
    elif t is Bin:
        _collect_syms(n.a, acc, seen)
        _collect_syms(n.b, acc, seen)
    elif t is Call:
        for a in n.args:
            _collect_syms(a, acc, seen)


def _subst_node(n: Node, mapping: Mapping[Sym, Node], memo: dict) -> Node:
    key = id(n)
    hit = memo.get(key)
    if hit is not None:
        return hit
    t = type(n)
    if t is Sym:
        out = mapping.get(n, n)
    elif t is Num:
        out = n
    elif t is Neg:
        out = nneg(_subst_node(n.a, mapping, memo))
    elif t is Bin:
        a = _subst_node(n.a, mapping, memo)
        b = _subst_node(n.b, mapping, memo)
        out = {"+": nadd, "-": nsub, "*": nmul, "/": ndiv, "^": npow}[n.op](a, b)
    else:
        out = ncall(n.fn, *[_subst_node(a, mapping, memo) for a in n.args])
    memo[key] = out
    return out


# ---------------------------------------------------------------------------
# Public expression type.
# ---------------------------------------------------------------------------


def _as_sym(var: Union[str, Sym], dim: int) -> Sym:
    if isinstance(var, Sym):
        s = var
    else:
        text = str(var)
        if len(text) < 2 or text[0] not in "xv" or not text[1:].isdigit():
            raise ExprError(f"not a symbol name: {var!r}")
        s = Sym(text[0], int(text[1:]) - 1)
    if not 0 <= s.index < dim:
        raise ExprError(f"symbol {s.name} out of range for dimension {dim}")
    return s


class ScalarExpr:
    """A real-valued expression in chart coordinates and velocities.

    Immutable for practical purposes; arithmetic operators build new
    expressions (with constant folding), `diff` differentiates exactly,
    `eval` computes a float deterministically.
    """

    __slots__ = ("node", "dim", "_fn", "_syms")

    def __init__(self, node: Node, dim: int):
        if dim < 1:
            raise ExprError(f"chart dimension must be >= 1, got {dim}")
        self.node = node
        self.dim = int(dim)
        self._fn = None
        self._syms = None

    # -- introspection ------------------------------------------------------

    @property
    def symbols(self) -> frozenset:
        if self._syms is None:
            acc: set = set()
            _collect_syms(self.node, acc, set())
            self._syms = frozenset(acc)
        return self._syms

    @property
    def depends_on_velocity(self) -> bool:
        return any(s.kind == "v" for s in self.symbols)

    @property
    def position_only(self) -> bool:
        return not self.depends_on_velocity

    def depends_on(self, var: Union[str, Sym]) -> bool:
        return _as_sym(var, self.dim) in self.symbols

    # -- core operations ----------------------------------------------------

    def eval(self, x: Sequence[float], v: Sequence[float] | None = None) -> float:
        if len(x) != self.dim:
            raise ExprError(
                f"expected {self.dim} coordinate value(s), got {len(x)}"
            )
        if v is None:
            if self.depends_on_velocity:
                raise ExprError(
                    "expression depends on velocities but none were given"
                )
        elif len(v) != self.dim:
            raise ExprError(f"expected {self.dim} velocity value(s), got {len(v)}")
        if self._fn is None:
            self._fn = _compile_node(self.node)
        return self._fn(x, v)

    def diff(self, var: Union[str, Sym]) -> "ScalarExpr":
        return ScalarExpr(_diff_node(self.node, _as_sym(var, self.dim)), self.dim)

    def grad_nodes(self, kind: str = "x") -> list:
        """All first partials as raw nodes, in coordinate order."""
        return [_diff_node(self.node, Sym(kind, i)) for i in range(self.dim)]

    def subst(
        self,
        mapping: Mapping[Union[str, Sym], Union["ScalarExpr", Node, float]],
        dim: int | None = None,
    ) -> "ScalarExpr":
        """Replace symbols by expressions.  `dim` sets the dimension of the
        result (defaults to this expression's); all symbols remaining after
        substitution must fit in it."""
        new_dim = self.dim if dim is None else int(dim)
        node_map: dict[Sym, Node] = {}
        for key, val in mapping.items():
            s = _as_sym(key, self.dim)
            if isinstance(val, ScalarExpr):
                node_map[s] = val.node
            elif isinstance(val, (int, float)):
                node_map[s] = Num(float(val))
            else:
                node_map[s] = val
        out = ScalarExpr(_subst_node(self.node, node_map, {}), new_dim)
        for s in out.symbols:
            if s.index >= new_dim:
                raise ExprError(
                    f"substitution left symbol {s.name} outside dimension {new_dim}"
                )
        return out

    # -- operators ----------------------------------------------------------

    def _lift(self, other) -> Node:
        if isinstance(other, ScalarExpr):
            if other.dim != self.dim:
                raise ExprError(
                    f"dimension mismatch: {self.dim} vs {other.dim}"
                )
            return other.node
        if isinstance(other, (int, float)):
            return Num(float(other))
        return NotImplemented

    def _wrap(self, node: Node) -> "ScalarExpr":
        return ScalarExpr(node, self.dim)

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._wrap(nadd(self.node, o))

    def __radd__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._wrap(nadd(o, self.node))

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._wrap(nsub(self.node, o))

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._wrap(nsub(o, self.node))

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._wrap(nmul(self.node, o))

    def __rmul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._wrap(nmul(o, self.node))

    def __truediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._wrap(ndiv(self.node, o))

    def __rtruediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._wrap(ndiv(o, self.node))

    def __pow__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self._wrap(npow(self.node, o))

    def __neg__(self):
        return self._wrap(nneg(self.node))

    # -- plumbing -----------------------------------------------------------

    def __str__(self) -> str:
        return _print_node(self.node)

    def __repr__(self) -> str:
        return f"ScalarExpr({_print_node(self.node)!r}, dim={self.dim})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScalarExpr):
            return NotImplemented
        return self.dim == other.dim and self.node == other.node

    def __hash__(self) -> int:
        return hash((self.dim, self.node))


# ---------------------------------------------------------------------------
# Construction helpers.
# ---------------------------------------------------------------------------


def lit(value: float, dim: int) -> ScalarExpr:
    """A constant expression."""
    return ScalarExpr(Num(float(value)), dim)


def coord(i: int, dim: int) -> ScalarExpr:
    """The coordinate ``x{i+1}`` (``i`` is 0-based)."""
    if not 0 <= i < dim:
        raise ExprError(f"coordinate index {i} out of range for dimension {dim}")
    return ScalarExpr(Sym("x", i), dim)


def velocity(i: int, dim: int) -> ScalarExpr:
    """The velocity ``v{i+1}`` (``i`` is 0-based)."""
    if not 0 <= i < dim:
        raise ExprError(f"velocity index {i} out of range for dimension {dim}")
    return ScalarExpr(Sym("v", i), dim)


def fn(name: str, *args: ScalarExpr) -> ScalarExpr:
    """Apply one of the recognised functions to expression arguments."""
    if not args:
        raise ExprError("function application needs at least one argument")
    dim = args[0].dim
    for a in args[1:]:
        if a.dim != dim:
            raise ExprError("function arguments disagree on chart dimension")
    return ScalarExpr(ncall(name, *[a.node for a in args]), dim)


def sum_exprs(terms: Iterable[ScalarExpr], dim: int) -> ScalarExpr:
    """Sum of expressions (left-folded); empty sums are the zero constant."""
    acc: Node = _ZERO
    for t in terms:
        if t.dim != dim:
            raise ExprError("sum terms disagree on chart dimension")
        acc = nadd(acc, t.node)
    return ScalarExpr(acc, dim)


# ---------------------------------------------------------------------------
# Lexer and parser.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # num | word | op | end
    text: str
    offset: int


_OP_CHARS = set("+-*/^(),")


def _tokenize(src: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch in _OP_CHARS:
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        if ch.isdigit():
            start = i
            while i < n and src[i].isdigit():
                i += 1
            if i < n and src[i] == ".":
                i += 1
                if i >= n or not src[i].isdigit():
                    raise ParseError("malformed number: digit expected after '.'", i)
                while i < n and src[i].isdigit():
                    i += 1
            if i < n and src[i] in "eE":
                j = i + 1
                if j < n and src[j] in "+-":
                    j += 1
                if j >= n or not src[j].isdigit():
                    raise ParseError("malformed exponent", i)
                i = j
                while i < n and src[i].isdigit():
                    i += 1
            tokens.append(_Token("num", src[start:i], start))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (src[i].isalnum() or src[i] == "_"):
                i += 1
            tokens.append(_Token("word", src[start:i], start))
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], dim: int):
        self.tokens = tokens
        self.pos = 0
        self.dim = dim

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, ch: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != ch:
            raise ParseError(f"expected {ch!r}", tok.offset)
        return self.advance()

    def parse_expr(self) -> Node:
        node = self.parse_term()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                rhs = self.parse_term()
                node = Bin(tok.text, node, rhs)
            else:
                return node

    def parse_term(self) -> Node:
        node = self.parse_factor()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.advance()
                rhs = self.parse_factor()
                node = Bin(tok.text, node, rhs)
            else:
                return node

    def parse_factor(self) -> Node:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.parse_factor())
        atom = self.parse_atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            exponent = self.parse_factor()
            return Bin("^", atom, exponent)
        return atom

    def parse_atom(self) -> Node:
        tok = self.advance()
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "word":
            return self.parse_word(tok)
        if tok.kind == "op" and tok.text == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected token {tok.text!r}" if tok.text else "unexpected end of input", tok.offset)

    def parse_word(self, tok: _Token) -> Node:
        text = tok.text
        if text[0] in "xv" and text[1:].isdigit():
            index = int(text[1:])
            if not 1 <= index <= self.dim:
                raise ParseError(
                    f"index out of range: {text} on a chart of dimension {self.dim}",
                    tok.offset,
                )
            return Sym(text[0], index - 1)
        if text in FUNCTION_ARITY:
            arity = FUNCTION_ARITY[text]
            self.expect_op("(")
            args = [self.parse_expr()]
            while True:
                nxt = self.peek()
                if nxt.kind == "op" and nxt.text == ",":
                    self.advance()
                    args.append(self.parse_expr())
                else:
                    break
            closing = self.expect_op(")")
            if len(args) != arity:
                raise ParseError(
                    f"{text} expects {arity} argument(s), got {len(args)}",
                    closing.offset,
                )
            return Call(text, tuple(args))
        raise ParseError(f"unknown identifier {text!r}", tok.offset)


def parse(src: str, dim: int) -> ScalarExpr:
    """Parse source text into a `ScalarExpr` on a chart of dimension `dim`.

    Raises `ParseError` (with a byte offset) on syntax errors, unknown
    identifiers, and coordinate indices outside ``1..dim``.
    """
    if dim < 1:
        raise ExprError(f"chart dimension must be >= 1, got {dim}")
    parser = _Parser(_tokenize(src), dim)
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ParseError(f"unexpected trailing input {trailing.text!r}", trailing.offset)
    return ScalarExpr(node, dim)
