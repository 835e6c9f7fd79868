"""Attribute expression language used for row filters and computed fields.

Grammar (keywords are lowercase and case-sensitive)::

    expr    := or
    or      := and ("or" and)*
    and     := not ("and" not)*
    not     := "not" not | cmp
    cmp     := add (cmpop add)?
    cmpop   := "==" | "!=" | "<" | "<=" | ">" | ">="
    add     := mul (("+" | "-") mul)*
    mul     := unary (("*" | "/") unary)*
    unary   := "-" unary | primary
    primary := NUMBER | STRING | "true" | "false" | "null"
             | IDENT | BQ_IDENT | "(" expr ")"

Identifiers match ``[A-Za-z_][A-Za-z0-9_]*``; any other field name can be
written back-quoted, e.g. ``\u0060land area\u0060``. Strings use single or
double quotes with backslash escapes.

Evaluation rules: ``/`` is always floating division; a missing field is
``null``; arithmetic with ``null`` yields ``null``; any comparison with a
``null`` operand is ``false``; ``and``/``or``/``not`` use three-valued
logic over booleans and short-circuit. Everything else raises
:class:`ExprEvalError`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Any, Mapping, Union

from .errors import GeoError

KEYWORDS = {"and", "or", "not", "true", "false", "null"}
CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class ExprSyntaxError(GeoError):
    code = "expression_syntax"

    def __init__(self, message: str, offset: int, expected: frozenset = frozenset()):
        exp = f"; expected one of {sorted(expected)}" if expected else ""
        super().__init__(f"{message} at offset {offset}{exp}", offset=offset, expected=sorted(expected))
        self.offset = offset
        self.expected = frozenset(expected)


class ExprEvalError(GeoError):
    code = "expression_eval"


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    value: Any


@dataclass(frozen=True)
class Field:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "not"
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Lit, Field, Unary, Binary]


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER STRING IDENT KW OP LPAREN RPAREN EOF
    text: str
    value: Any
    offset: int


_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"', "0": "\0"}


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        start = i
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            m = _NUMBER.match(src, i)
            text = m.group(0)
            is_int = all(c.isdigit() for c in text)
            value = int(text) if is_int else float(text)
            if isinstance(value, float) and not math.isfinite(value):
                raise ExprSyntaxError(f"number literal {text!r} out of range", start)
            tokens.append(Token("NUMBER", text, value, start))
            i = m.end()
            if i < n and (src[i].isalnum() or src[i] == "_"):
                raise ExprSyntaxError(f"malformed number {src[start:i + 1]!r}", start)
            continue
        if ch.isalpha() or ch == "_":
            m = IDENT_RE.match(src, i)
            text = m.group(0)
            tokens.append(Token("KW" if text in KEYWORDS else "IDENT", text, text, start))
            i = m.end()
            continue
        if ch == "`":
            j = src.find("`", i + 1)
            if j < 0:
                raise ExprSyntaxError("unterminated back-quoted identifier", start)
            name = src[i + 1:j]
            if not name:
                raise ExprSyntaxError("empty back-quoted identifier", start)
            tokens.append(Token("IDENT", src[i:j + 1], name, start))
            i = j + 1
            continue
        if ch in "'\"":
            quote = ch
            i += 1
            buf = []
            while True:
                if i >= n:
                    raise ExprSyntaxError("unterminated string literal", start)
                c = src[i]
                if c == "\\":
                    if i + 1 >= n:
                        raise ExprSyntaxError("unterminated string literal", start)
                    esc = src[i + 1]
                    buf.append(_ESCAPES.get(esc, esc))
                    i += 2
                    continue
                if c == quote:
                    i += 1
                    break
                buf.append(c)
                i += 1
            tokens.append(Token("STRING", src[start:i], "".join(buf), start))
            continue
        two = src[i:i + 2]
        if two in ("==", "!=", "<=", ">="):
            tokens.append(Token("OP", two, two, start))
            i += 2
            continue
        if ch in "<>+-*/":
            tokens.append(Token("OP", ch, ch, start))
            i += 1
            continue
        if ch == "(":
            tokens.append(Token("LPAREN", ch, ch, start))
            i += 1
            continue
        if ch == ")":
            tokens.append(Token("RPAREN", ch, ch, start))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", start)
    tokens.append(Token("EOF", "", None, n))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_PRIMARY_START = frozenset({"NUMBER", "STRING", "IDENT", "true", "false", "null", "("})


class _Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def fail(self, expected) -> ExprSyntaxError:
        t = self.tok
        what = "end of input" if t.kind == "EOF" else repr(t.text)
        return ExprSyntaxError(f"unexpected {what}", t.offset, frozenset(expected))

    def parse(self) -> Expr:
        e = self.or_()
        if not self.at("EOF"):
            raise self.fail({"and", "or", "end of input", ")"} | set(CMP_OPS) | {"+", "-", "*", "/"})
        return e

    def or_(self) -> Expr:
        e = self.and_()
        while self.at("KW", "or"):
            self.pos += 1
            e = Binary("or", e, self.and_())
        return e

    def and_(self) -> Expr:
        e = self.not_()
        while self.at("KW", "and"):
            self.pos += 1
            e = Binary("and", e, self.not_())
        return e

    def not_(self) -> Expr:
        if self.at("KW", "not"):
            self.pos += 1
            return Unary("not", self.not_())
        start = self.pos
        try:
            return self.cmp()
        except ExprSyntaxError as exc:
            if self.pos == start and exc.offset == self.tok.offset:
                raise self.fail(exc.expected | {"not"}) from None
            raise

    def cmp(self) -> Expr:
        e = self.add()
        if self.tok.kind == "OP" and self.tok.text in CMP_OPS:
            op = self.tok.text
            self.pos += 1
            e = Binary(op, e, self.add())
        return e

    def add(self) -> Expr:
        e = self.mul()
        while self.tok.kind == "OP" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.pos += 1
            e = Binary(op, e, self.mul())
        return e

    def mul(self) -> Expr:
        e = self.unary()
        while self.tok.kind == "OP" and self.tok.text in ("*", "/"):
            op = self.tok.text
            self.pos += 1
            e = Binary(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.at("OP", "-"):
            self.pos += 1
            return Unary("-", self.unary())
        return self.primary()

    def primary(self) -> Expr:
        t = self.tok
        if t.kind in ("NUMBER", "STRING"):
            self.pos += 1
            return Lit(t.value)
        if t.kind == "KW" and t.text in ("true", "false", "null"):
            self.pos += 1
            return Lit({"true": True, "false": False, "null": None}[t.text])
        if t.kind == "IDENT":
            self.pos += 1
            return Field(t.value)
        if t.kind == "LPAREN":
            self.pos += 1
            e = self.or_()
            if not self.at("RPAREN"):
                raise self.fail({")"})
            self.pos += 1
            return e
        raise self.fail(_PRIMARY_START | {"-"})


def parse_expression(src: str) -> Expr:
    """Parse ``src``; raises :class:`ExprSyntaxError` with offset and expected tokens."""
    if not isinstance(src, str):
        raise ExprSyntaxError("expression must be text", 0)
    return _Parser(src).parse()


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------


def _quote(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    out = out.replace("\r", "\\r").replace("\0", "\\0")
    return f'"{out}"'


def to_source(e: Expr) -> str:
    """Fully parenthesized source text that parses back to ``e``."""
    if isinstance(e, Lit):
        v = e.value
        if v is None:
            return "null"
        if v is True:
            return "true"
        if v is False:
            return "false"
        if isinstance(v, str):
            return _quote(v)
        if isinstance(v, float):
            text = repr(v)
            if "inf" in text or "nan" in text:
                raise ValueError(f"cannot print non-finite literal {v}")
            return text if v >= 0 else f"(-{repr(-v)})"
        return str(v) if v >= 0 else f"(-{-v})"
    if isinstance(e, Field):
        if IDENT_RE.fullmatch(e.name) and e.name not in KEYWORDS:
            return e.name
        return f"`{e.name}`"
    if isinstance(e, Unary):
        sep = " " if e.op == "not" else ""
        return f"({e.op}{sep}{to_source(e.operand)})"
    return f"({to_source(e.left)} {e.op} {to_source(e.right)})"


# ---------------------------------------------------------------------------
# Evaluator
# ---------------------------------------------------------------------------


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _type_name(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "boolean"
    if _is_num(v):
        return "number"
    if isinstance(v, str):
        return "string"
    return type(v).__name__


def _check_result(v):
    if isinstance(v, float) and not math.isfinite(v):
        raise ExprEvalError("arithmetic produced a non-finite number")
    return v


def _logic_operand(v, op):
    if v is None or isinstance(v, bool):
        return v
    raise ExprEvalError(f"operator {op!r} needs boolean operands, got {_type_name(v)}")


def evaluate(e: Expr, row: Mapping[str, Any]) -> Any:
    """Evaluate ``e`` against one property map."""
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Field):
        return row.get(e.name)
    if isinstance(e, Unary):
        v = evaluate(e.operand, row)
        if e.op == "not":
            v = _logic_operand(v, "not")
            return None if v is None else not v
        if v is None:
            return None
        if not _is_num(v):
            raise ExprEvalError(f"unary '-' needs a number, got {_type_name(v)}")
        return -v
    op = e.op
    if op == "and":
        left = _logic_operand(evaluate(e.left, row), op)
        if left is False:
            return False
        right = _logic_operand(evaluate(e.right, row), op)
        if right is False:
            return False
        return None if left is None or right is None else True
    if op == "or":
        left = _logic_operand(evaluate(e.left, row), op)
        if left is True:
            return True
        right = _logic_operand(evaluate(e.right, row), op)
        if right is True:
            return True
        return None if left is None or right is None else False
    a = evaluate(e.left, row)
    b = evaluate(e.right, row)
    if op in CMP_OPS:
        if a is None or b is None:
            return False
        ta, tb = _type_name(a), _type_name(b)
        if ta != tb:
            raise ExprEvalError(f"cannot compare {ta} with {tb} using {op!r}")
        if op == "==":
            return a == b
        if op == "!=":
            return a != b
        if ta == "boolean":
            raise ExprEvalError(f"booleans are not ordered ({op!r})")
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        return a >= b
    # arithmetic
    if a is None or b is None:
        for v in (a, b):
            if v is not None and not _is_num(v):
                raise ExprEvalError(f"operator {op!r} needs numbers, got {_type_name(v)}")
        return None
    if not (_is_num(a) and _is_num(b)):
        raise ExprEvalError(f"operator {op!r} needs numbers, got {_type_name(a)} and {_type_name(b)}")
    try:
        if op == "+":
            return _check_result(a + b)
        if op == "-":
            return _check_result(a - b)
        if op == "*":
            return _check_result(a * b)
        if b == 0:
            raise ExprEvalError("division by zero")
        return _check_result(a / b)
    except OverflowError:
        raise ExprEvalError("arithmetic overflow") from None


def compile_expression(src_or_expr) -> Expr:
    return src_or_expr if isinstance(src_or_expr, (Lit, Field, Unary, Binary)) else parse_expression(src_or_expr)


def field_refs(e: Expr) -> set[str]:
    if isinstance(e, Field):
        return {e.name}
    if isinstance(e, Unary):
        return field_refs(e.operand)
    if isinstance(e, Binary):
        return field_refs(e.left) | field_refs(e.right)
    return set()
