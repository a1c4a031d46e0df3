"""Chart-definition language.

A chart maps curvilinear coordinates onto Cartesian space; each Cartesian
component is written as an arithmetic expression in the coordinates and
optional named parameters::

    chart spherical
    coords r range 0 inf ; theta range 0 pi ; phi periodic 0 2*pi
    normal r
    embed r*sin(theta)*cos(phi)
    embed r*sin(theta)*sin(phi)
    embed r*cos(theta)
    end

Expressions are parsed with a precedence-climbing parser.  Binding strength,
from loosest to tightest: ``+ -``, ``* /``, unary ``-``, ``^`` (right
associative).  Trees evaluate over floats, numpy arrays or any scalar type
that exposes the elementary functions as methods (see
:class:`curvmom.autodiff.Jet2`).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from curvmom.errors import ChartSemanticError, DomainError, LexError, ParseError

__all__ = [
    "Token",
    "Expr",
    "Const",
    "Var",
    "Param",
    "Unary",
    "Binary",
    "Call",
    "Coordinate",
    "ChartDef",
    "FUNCTIONS",
    "tokenize",
    "parse_expression",
    "parse",
    "parse_chart",
    "evaluate",
    "pretty",
    "free_names",
]

KEYWORDS = frozenset(
    {"chart", "coords", "params", "normal", "embed", "end", "periodic", "range"}
)
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "tan": 1,
    "cot": 1,
    "exp": 1,
    "log": 1,
    "sqrt": 1,
    "sinh": 1,
    "cosh": 1,
    "atan2": 2,
}

# ---------------------------------------------------------------------------
# tokens


@dataclass(frozen=True)
class Token:
    kind: str  # number | identifier | operator | paren | comma | keyword
    lexeme: str
    position: int
    value: float | None = None

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.lexeme!r}, {self.position})"


_NUMBER = re.compile(rb"(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
_IDENT = re.compile(rb"[A-Za-z_][A-Za-z0-9_]*")
_OPERATORS = b"+-*/^"


def tokenize(source: str | bytes) -> list[Token]:
    """Split ``source`` into tokens.

    Positions are byte offsets into the UTF-8 encoding of ``source``.  A ``#``
    starts a comment that runs to the end of the line.
    """
    data = source.encode("utf-8") if isinstance(source, str) else bytes(source)
    tokens: list[Token] = []
    i, n = 0, len(data)
    while i < n:
        c = data[i]
        if c in b" \t\r\n\f\v":
            i += 1
        elif c == ord("#"):
            j = data.find(b"\n", i)
            i = n if j < 0 else j
        elif c in b"0123456789.":
            m = _NUMBER.match(data, i)
            if m is None:
                raise LexError("malformed number", i)
            text = m.group().decode()
            tokens.append(Token("number", text, i, float(text)))
            i = m.end()
        elif c == ord("_") or chr(c).isalpha() and c < 128:
            m = _IDENT.match(data, i)
            text = m.group().decode()
            kind = "keyword" if text in KEYWORDS else "identifier"
            tokens.append(Token(kind, text, i))
            i = m.end()
        elif c in _OPERATORS:
            tokens.append(Token("operator", chr(c), i))
            i += 1
        elif c in b"()":
            tokens.append(Token("paren", chr(c), i))
            i += 1
        elif c == ord(","):
            tokens.append(Token("comma", ",", i))
            i += 1
        else:
            raise LexError(f"unrecognized character {bytes([c])!r}", i)
    return tokens


# ---------------------------------------------------------------------------
# expression trees


class Expr:
    """Base class for expression nodes.  Nodes are immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float
    name: str | None = None  # "pi" / "e" for reserved constants


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    func: str
    args: tuple[Expr, ...]


def pretty(expr: Expr) -> str:
    """Render ``expr`` as source text that re-parses to the same tree."""
    if isinstance(expr, Const):
        return expr.name if expr.name else repr(float(expr.value))
    if isinstance(expr, (Var, Param)):
        return expr.name
    if isinstance(expr, Unary):
        return f"({expr.op}({pretty(expr.operand)}))"
    if isinstance(expr, Binary):
        return f"({pretty(expr.left)} {expr.op} {pretty(expr.right)})"
    if isinstance(expr, Call):
        return f"{expr.func}({', '.join(pretty(a) for a in expr.args)})"
    raise TypeError(f"not an expression node: {expr!r}")


def free_names(expr: Expr) -> set[str]:
    if isinstance(expr, (Var, Param)):
        return {expr.name}
    if isinstance(expr, Unary):
        return free_names(expr.operand)
    if isinstance(expr, Binary):
        return free_names(expr.left) | free_names(expr.right)
    if isinstance(expr, Call):
        return set().union(*(free_names(a) for a in expr.args))
    return set()


# ---------------------------------------------------------------------------
# parser

_INFIX = {"+": (10, 11), "-": (10, 11), "*": (20, 21), "/": (20, 21), "^": (40, 39)}
_PREFIX_BP = 30


class _Parser:
    def __init__(self, tokens: Sequence[Token], coords, params, end_pos: int):
        self.tokens = list(tokens)
        self.i = 0
        self.coords = coords
        self.params = params
        self.end_pos = end_pos

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end_pos)
        self.i += 1
        return tok

    def expect(self, lexeme: str) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"expected {lexeme!r} but input ended", self.end_pos)
        if tok.lexeme != lexeme:
            raise ParseError(f"expected {lexeme!r}, found {tok.lexeme!r}", tok.position)
        return self.advance()

    def expression(self, min_bp: int = 0) -> Expr:
        left = self.prefix()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "operator":
                break
            lbp, rbp = _INFIX[tok.lexeme]
            if lbp <= min_bp:
                break
            self.advance()
            left = Binary(tok.lexeme, left, self.expression(rbp))
        return left

    def prefix(self) -> Expr:
        tok = self.advance()
        if tok.kind == "number":
            return Const(tok.value)
        if tok.kind == "operator" and tok.lexeme in "+-":
            return Unary(tok.lexeme, self.expression(_PREFIX_BP))
        if tok.lexeme == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        if tok.kind == "identifier":
            return self.name(tok)
        raise ParseError(f"unexpected token {tok.lexeme!r}", tok.position)

    def name(self, tok: Token) -> Expr:
        name = tok.lexeme
        nxt = self.peek()
        if name in FUNCTIONS:
            if nxt is None or nxt.lexeme != "(":
                raise ParseError(f"function {name!r} must be called", tok.position)
            self.advance()
            args: list[Expr] = []
            if self.peek() is not None and self.peek().lexeme == ")":
                self.advance()
            else:
                args.append(self.expression())
                while self.peek() is not None and self.peek().kind == "comma":
                    self.advance()
                    args.append(self.expression())
                self.expect(")")
            if len(args) != FUNCTIONS[name]:
                raise ParseError(
                    f"arity error: {name} takes {FUNCTIONS[name]} argument(s), "
                    f"got {len(args)}",
                    tok.position,
                )
            return Call(name, tuple(args))
        if nxt is not None and nxt.lexeme == "(":
            raise ParseError(f"unknown function {name!r}", tok.position)
        if self.params is not None and name in self.params:
            return Param(name)
        if name in CONSTANTS:
            return Const(CONSTANTS[name], name)
        if self.coords is None or name in self.coords:
            return Var(name)
        raise ParseError(f"undeclared name {name!r}", tok.position)


def parse_expression(
    tokens: Sequence[Token],
    coords: Iterable[str] | None = None,
    params: Iterable[str] | None = None,
) -> Expr:
    """Parse a full token sequence into one expression tree.

    When ``coords``/``params`` are given, identifiers must resolve to one of
    them (or to the reserved constants ``pi`` and ``e``).  Without them every
    free identifier becomes a :class:`Var`.
    """
    tokens = list(tokens)
    end_pos = tokens[-1].position + len(tokens[-1].lexeme) if tokens else 0
    p = _Parser(
        tokens,
        None if coords is None else set(coords),
        None if params is None else set(params),
        end_pos,
    )
    try:
        expr = p.expression()
    except RecursionError:
        raise ParseError("expression nested too deeply", tokens[0].position) from None
    tok = p.peek()
    if tok is not None:
        raise ParseError(f"unexpected token {tok.lexeme!r}", tok.position)
    return expr


def parse(source: str, coords=None, params=None) -> Expr:
    """Tokenize and parse ``source`` in one step."""
    return parse_expression(tokenize(source), coords, params)


# ---------------------------------------------------------------------------
# evaluation

Scalar = Union[float, np.ndarray, "object"]


def _check(cond, message: str) -> None:
    if np.any(cond):
        raise DomainError(message)


def _real_func(name: str, x):
    if name == "log":
        _check(np.asarray(x) <= 0, "log of non-positive value")
        return np.log(x)
    if name == "sqrt":
        _check(np.asarray(x) < 0, "sqrt of negative value")
        return np.sqrt(x)
    if name == "cot":
        s = np.sin(x)
        _check(s == 0, "cot where sin = 0")
        return np.cos(x) / s
    if name == "tan":
        c = np.cos(x)
        _check(c == 0, "tan where cos = 0")
        return np.sin(x) / c
    return getattr(np, name)(x)


def _real_pow(a, b):
    a_arr, b_arr = np.asarray(a), np.asarray(b)
    non_integer = b_arr != np.round(b_arr)
    _check(non_integer & (a_arr < 0), "non-integer power of negative value")
    _check((a_arr == 0) & (b_arr < 0), "negative power of zero")
    return np.power(a, b)


def _is_real(x) -> bool:
    return isinstance(x, (int, float, np.ndarray, np.floating, np.integer))


def _apply_func(name: str, args: list):
    if name == "atan2":
        y, x = args
        for a in (y, x):
            if not _is_real(a):
                return type(a).atan2(y, x)
        _check((np.asarray(y) == 0) & (np.asarray(x) == 0), "atan2(0, 0)")
        return np.arctan2(y, x)
    (x,) = args
    if _is_real(x):
        return _real_func(name, x)
    return getattr(x, name)()


def _apply_binary(op: str, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if _is_real(b):
            _check(np.asarray(b) == 0, "division by zero")
        return a / b
    if op == "^":
        if _is_real(a) and _is_real(b):
            return _real_pow(a, b)
        return a**b
    raise ValueError(f"unknown operator {op!r}")


def evaluate(expr: Expr, env: Mapping[str, Scalar]) -> Scalar:
    """Evaluate ``expr`` with free names bound by ``env``.

    Raises :class:`DomainError` naming the innermost failing subexpression.
    """
    try:
        if isinstance(expr, Const):
            return expr.value
        if isinstance(expr, (Var, Param)):
            try:
                return env[expr.name]
            except KeyError:
                raise KeyError(f"unbound name {expr.name!r}") from None
        if isinstance(expr, Unary):
            v = evaluate(expr.operand, env)
            return -v if expr.op == "-" else v
        if isinstance(expr, Binary):
            return _apply_binary(
                expr.op, evaluate(expr.left, env), evaluate(expr.right, env)
            )
        if isinstance(expr, Call):
            return _apply_func(expr.func, [evaluate(a, env) for a in expr.args])
    except DomainError as err:
        raise err.with_subexpr(pretty(expr))
    raise TypeError(f"not an expression node: {expr!r}")


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class Coordinate:
    name: str
    lower: float = -math.inf
    upper: float = math.inf
    periodic: bool = False
    bound_exprs: tuple[Expr, Expr] | None = field(default=None, compare=False, repr=False)

    @property
    def period(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        if self.periodic:
            return True
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class ChartDef:
    name: str
    coords: tuple[Coordinate, ...]
    embed: tuple[Expr, ...]
    params: tuple[tuple[str, float], ...] = ()
    normal: str | None = None

    def __post_init__(self):
        names = self.coord_names
        if len(set(names)) != len(names):
            raise ChartSemanticError("duplicate coordinate names")
        if len(self.embed) != len(self.coords):
            raise ChartSemanticError(
                f"dimension mismatch: {len(self.coords)} coordinates but "
                f"{len(self.embed)} embed components"
            )
        if self.dim < 2:
            raise ChartSemanticError("chart dimension must be at least 2")
        for c in self.coords:
            if c.periodic and not (math.isfinite(c.lower) and math.isfinite(c.upper)):
                raise ChartSemanticError(f"periodic coordinate {c.name!r} needs finite bounds")
        if self.normal is not None and self.normal not in names:
            raise ChartSemanticError(f"normal names undeclared coordinate {self.normal!r}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def coord_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.coords)

    @property
    def param_values(self) -> dict[str, float]:
        return dict(self.params)

    def coord(self, name: str) -> Coordinate:
        for c in self.coords:
            if c.name == name:
                return c
        raise KeyError(f"chart {self.name!r} has no coordinate {name!r}")

    def index(self, name: str) -> int:
        return self.coord_names.index(self.coord(name).name)

    def with_params(self, **overrides: float) -> "ChartDef":
        """Return a copy with parameter values replaced (bounds re-evaluated)."""
        values = self.param_values
        for k, v in overrides.items():
            if k not in values:
                raise ChartSemanticError(f"chart {self.name!r} has no parameter {k!r}")
            values[k] = float(v)
        coords = tuple(_rebound(c, values) for c in self.coords)
        return replace(self, coords=coords, params=tuple(values.items()))

    def with_normal(self, normal: str | None) -> "ChartDef":
        return replace(self, normal=normal)

    def embed_values(self, env: Mapping[str, Scalar]) -> list:
        full = dict(self.param_values)
        full.update(env)
        return [evaluate(e, full) for e in self.embed]

    def describe(self) -> dict:
        return {
            "name": self.name,
            "dimension": self.dim,
            "coords": [
                {
                    "name": c.name,
                    "lower": c.lower,
                    "upper": c.upper,
                    "periodic": c.periodic,
                }
                for c in self.coords
            ],
            "params": self.param_values,
            "normal": self.normal,
            "embed": [pretty(e) for e in self.embed],
        }


def _rebound(c: Coordinate, params: Mapping[str, float]) -> Coordinate:
    if c.bound_exprs is None:
        return c
    try:
        lo, hi = (float(evaluate(e, params)) for e in c.bound_exprs)
    except DomainError as err:
        raise ChartSemanticError(f"coordinate {c.name!r}: {err}") from None
    if not lo < hi:
        raise ChartSemanticError(f"coordinate {c.name!r}: empty interval [{lo}, {hi}]")
    return replace(c, lower=lo, upper=hi)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _bound_expr(text: str, params: set[str], lineno: int) -> Expr:
    sign = ""
    body = text
    if body.startswith(("-", "+")):
        sign, body = body[0], body[1:]
    if body == "inf":
        return Const(-math.inf if sign == "-" else math.inf)
    try:
        return parse(text, coords=(), params=params)
    except (ParseError, LexError) as err:
        raise ChartSemanticError(f"bad bound {text!r}: {err}", lineno) from None


def _parse_coords(rest: str, params: Mapping[str, float], lineno: int) -> list[Coordinate]:
    coords = []
    for chunk in rest.split(";"):
        words = chunk.split()
        if not words:
            raise ChartSemanticError("empty coordinate declaration", lineno)
        name = words[0]
        if not _IDENT.fullmatch(name.encode()) or name in KEYWORDS:
            raise ChartSemanticError(f"invalid coordinate name {name!r}", lineno)
        if name in FUNCTIONS or name in CONSTANTS:
            raise ChartSemanticError(f"coordinate name {name!r} is reserved", lineno)
        if len(words) == 1:
            coords.append(Coordinate(name))
            continue
        if len(words) != 4 or words[1] not in ("periodic", "range"):
            raise ChartSemanticError(
                f"coordinate {name!r}: expected `periodic|range <lo> <hi>`", lineno
            )
        exprs = (
            _bound_expr(words[2], set(params), lineno),
            _bound_expr(words[3], set(params), lineno),
        )
        try:
            lo, hi = (float(evaluate(e, params)) for e in exprs)
        except DomainError as err:
            raise ChartSemanticError(f"coordinate {name!r}: {err}", lineno) from None
        if not lo < hi:
            raise ChartSemanticError(f"coordinate {name!r}: empty interval", lineno)
        periodic = words[1] == "periodic"
        if periodic and not (math.isfinite(lo) and math.isfinite(hi)):
            raise ChartSemanticError(f"periodic coordinate {name!r} needs finite bounds", lineno)
        coords.append(Coordinate(name, lo, hi, periodic, exprs))
    return coords


def _parse_params(rest: str, lineno: int) -> dict[str, float]:
    out: dict[str, float] = {}
    for item in rest.split():
        name, eq, value = item.partition("=")
        if not eq or not _IDENT.fullmatch(name.encode()) or name in KEYWORDS:
            raise ChartSemanticError(f"bad parameter binding {item!r}", lineno)
        if name in out:
            raise ChartSemanticError(f"duplicate parameter {name!r}", lineno)
        if name in FUNCTIONS or name in CONSTANTS:
            raise ChartSemanticError(f"parameter name {name!r} is reserved", lineno)
        try:
            out[name] = float(value)
        except ValueError:
            raise ChartSemanticError(f"parameter {name!r}: not a real number", lineno) from None
        if not math.isfinite(out[name]):
            raise ChartSemanticError(f"parameter {name!r} must be finite", lineno)
    return out


def parse_chart(source: str) -> ChartDef:
    """Parse chart source text into a validated :class:`ChartDef`."""
    name = None
    coords: list[Coordinate] | None = None
    coords_line = 0
    params: dict[str, float] = {}
    normal = None
    normal_line = 0
    embed_lines: list[tuple[int, str]] = []
    ended = False

    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if ended:
            raise ChartSemanticError("content after `end`", lineno)
        directive, _, rest = line.partition(" ")
        rest = rest.strip()
        if directive == "chart":
            if name is not None:
                raise ChartSemanticError("duplicate `chart` line", lineno)
            if not rest or len(rest.split()) != 1:
                raise ChartSemanticError("`chart` takes exactly one name", lineno)
            name = rest
        elif name is None:
            raise ChartSemanticError("chart must start with `chart <name>`", lineno)
        elif directive == "coords":
            if coords is not None:
                raise ChartSemanticError("duplicate `coords` line", lineno)
            coords_line = lineno
            coords = _parse_coords(rest, params, lineno)
            names = [c.name for c in coords]
            dup = {n for n in names if names.count(n) > 1}
            if dup:
                raise ChartSemanticError(f"duplicate coordinate name {sorted(dup)[0]!r}", lineno)
        elif directive == "params":
            if coords is not None:
                raise ChartSemanticError("`params` must precede `coords`", lineno)
            if params:
                raise ChartSemanticError("duplicate `params` line", lineno)
            params = _parse_params(rest, lineno)
        elif directive == "normal":
            if normal is not None:
                raise ChartSemanticError("duplicate `normal` line", lineno)
            normal, normal_line = rest, lineno
        elif directive == "embed":
            if not rest:
                raise ChartSemanticError("empty embed expression", lineno)
            embed_lines.append((lineno, rest))
        elif directive == "end":
            ended = True
        else:
            raise ChartSemanticError(f"unknown directive {directive!r}", lineno)

    if name is None:
        raise ChartSemanticError("missing `chart <name>` line")
    if coords is None:
        raise ChartSemanticError("missing `coords` line")
    if not ended:
        raise ChartSemanticError("missing `end` line")
    clash = set(params) & {c.name for c in coords}
    if clash:
        raise ChartSemanticError(
            f"name {sorted(clash)[0]!r} is both parameter and coordinate", coords_line
        )
    if normal is not None and normal not in {c.name for c in coords}:
        raise ChartSemanticError(f"normal names undeclared coordinate {normal!r}", normal_line)
    if len(embed_lines) != len(coords):
        raise ChartSemanticError(
            f"dimension mismatch: {len(coords)} coordinates but {len(embed_lines)} "
            "embed components",
            embed_lines[-1][0] if embed_lines else coords_line,
        )

    names = [c.name for c in coords]
    embed = []
    for lineno, text in embed_lines:
        try:
            embed.append(parse(text, coords=names, params=params))
        except ParseError as err:
            raise ChartSemanticError(str(err), lineno) from None
        except LexError as err:
            raise ChartSemanticError(str(err), lineno) from None

    return ChartDef(
        name=name,
        coords=tuple(coords),
        embed=tuple(embed),
        params=tuple(params.items()),
        normal=normal,
    )
