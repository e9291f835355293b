"""Display-filter language: parsing, evaluation, and canonical rendering.

The grammar is a bounded Wireshark-style subset: protocol atoms, field
comparisons over the documented field namespace, and boolean combinators
(both "and/or/not" and "&&/||/!"), with parentheses. Typing is resolved
at parse time so per-packet evaluation is total and branch-simple.
"""

from __future__ import annotations

import ipaddress
import re
from dataclasses import dataclass

from .dissect import DISPLAY_FIELDS, DissectedPacket, FieldSpec, default_registry
from .fields import Address


class ParseError(Exception):
    """Filter text rejected, with the character position of the offense."""

    def __init__(self, position: int, message: str):
        self.position = position
        self.message = message
        super().__init__(f"parse error at {position}: {message}")


@dataclass(frozen=True, slots=True)
class MatchAll:
    """The empty filter: every packet matches."""


@dataclass(frozen=True, slots=True)
class ProtocolAtom:
    name: str


@dataclass(frozen=True, slots=True)
class FieldCmp:
    field_path: str
    op: str  # "==" "!=" "<" "<=" ">" ">=" "contains"
    literal: object  # int | str | Address


@dataclass(frozen=True, slots=True)
class Not:
    child: object


@dataclass(frozen=True, slots=True)
class And:
    left: object
    right: object


@dataclass(frozen=True, slots=True)
class Or:
    left: object
    right: object


FilterExpr = MatchAll | ProtocolAtom | FieldCmp | Not | And | Or

MATCH_ALL = MatchAll()

_ORDERING_OPS = frozenset({"<", "<=", ">", ">="})
_ALLOWED_OPS = {
    "int": frozenset({"==", "!=", "<", "<=", ">", ">="}),
    "text": frozenset({"==", "!=", "contains"}),
    "mac": frozenset({"==", "!="}),
    "ipv4": frozenset({"==", "!="}),
    "ipv6": frozenset({"==", "!="}),
}

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<lparen>\()
    | (?P<rparen>\))
    | (?P<op>==|!=|<=|>=|<|>)
    | (?P<andsym>&&)
    | (?P<orsym>\|\|)
    | (?P<notsym>!)
    | (?P<string>"[^"]*"|'[^']*')
    | (?P<word>[A-Za-z0-9_.:\-]+)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"and": "and", "or": "or", "not": "not", "contains": "contains"}


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # lparen rparen op and or not string word end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            if kind == "word" and value in _KEYWORDS:
                kind = _KEYWORDS[value]
                if kind == "contains":
                    kind, value = "op", "contains"
            elif kind == "andsym":
                kind = "and"
            elif kind == "orsym":
                kind = "or"
            elif kind == "notsym":
                kind = "not"
            tokens.append(_Token(kind, value, m.start()))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], protocols: frozenset):
        self.tokens = tokens
        self.protocols = protocols
        self.at = 0

    def peek(self) -> _Token:
        return self.tokens[self.at]

    def advance(self) -> _Token:
        token = self.tokens[self.at]
        self.at += 1
        return token

    def parse(self) -> FilterExpr:
        expr = self.or_expr()
        tail = self.peek()
        if tail.kind != "end":
            if tail.kind == "rparen":
                raise ParseError(tail.pos, "unbalanced parentheses")
            raise ParseError(tail.pos, f"unexpected {tail.text!r}")
        return expr

    def or_expr(self) -> FilterExpr:
        left = self.and_expr()
        while self.peek().kind == "or":
            self.advance()
            left = Or(left, self.and_expr())
        return left

    def and_expr(self) -> FilterExpr:
        left = self.not_expr()
        while self.peek().kind == "and":
            self.advance()
            left = And(left, self.not_expr())
        return left

    def not_expr(self) -> FilterExpr:
        if self.peek().kind == "not":
            self.advance()
            return Not(self.not_expr())
        return self.primary()

    def primary(self) -> FilterExpr:
        token = self.advance()
        if token.kind == "lparen":
            expr = self.or_expr()
            if self.peek().kind != "rparen":
                raise ParseError(self.peek().pos, "unbalanced parentheses")
            self.advance()
            return expr
        if token.kind == "word":
            if self.peek().kind == "op":
                return self.comparison(token)
            if token.text in self.protocols:
                return ProtocolAtom(token.text)
            if token.text in DISPLAY_FIELDS:
                raise ParseError(
                    token.pos, f"field {token.text!r} requires a comparison operator"
                )
            raise ParseError(token.pos, f"unknown protocol or field {token.text!r}")
        raise ParseError(token.pos, "expected expression")

    def comparison(self, field_token: _Token) -> FieldCmp:
        spec = DISPLAY_FIELDS.get(field_token.text)
        if spec is None:
            raise ParseError(field_token.pos, f"unknown field {field_token.text!r}")
        op_token = self.advance()
        op = op_token.text
        if op not in _ALLOWED_OPS[spec.value_type]:
            raise ParseError(
                op_token.pos,
                f"operator {op!r} not valid for {spec.value_type} field {spec.name!r}",
            )
        lit_token = self.advance()
        if lit_token.kind not in ("word", "string"):
            raise ParseError(lit_token.pos, "expected a comparison value")
        literal = _coerce_literal(spec, lit_token)
        return FieldCmp(spec.name, op, literal)


def _coerce_literal(spec: FieldSpec, token: _Token) -> object:
    text = token.text
    if token.kind == "string":
        text = text[1:-1]
        if spec.value_type != "text":
            raise ParseError(token.pos, f"{spec.name!r} compares against {spec.value_type} values")
        return text
    if spec.value_type == "int":
        try:
            return int(text, 16) if text.lower().startswith("0x") else int(text)
        except ValueError:
            raise ParseError(token.pos, f"{text!r} is not an integer") from None
    if spec.value_type == "text":
        return text
    try:
        if spec.value_type == "mac":
            parts = text.split(":")
            if len(parts) != 6 or not all(len(p) == 2 for p in parts):
                raise ValueError(text)
            return Address("mac", bytes.fromhex(text.replace(":", "")))
        if spec.value_type == "ipv4":
            return Address("ipv4", ipaddress.IPv4Address(text).packed)
        return Address("ipv6", ipaddress.IPv6Address(text).packed)
    except (ValueError, ipaddress.AddressValueError):
        raise ParseError(
            token.pos, f"{text!r} is not a valid {spec.value_type} address"
        ) from None


def parse_filter(text: str, protocols: frozenset | None = None) -> FilterExpr:
    """Parse filter text; blank input is the match-everything filter."""
    if protocols is None:
        protocols = default_registry().protocol_names()
    tokens = _tokenize(text)
    if tokens[0].kind == "end":
        return MATCH_ALL
    return _Parser(tokens, protocols).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _field_instances(spec: FieldSpec, packet: DissectedPacket) -> list:
    if spec.sources[0][0] == "frame":
        return [packet.length] if spec.name == "frame.len" else [packet.index + 1]
    values = []
    for layer in packet.layers:
        proto = layer.protocol
        for source_proto, key in spec.sources:
            if proto == source_proto:
                value = layer.fields.get(key)
                if value is not None:
                    values.append(value)
    return values


def _compare(op: str, value, literal) -> bool:
    try:
        if op == "==":
            return value == literal
        if op == "!=":
            return value != literal
        if op == "contains":
            return isinstance(value, str) and literal in value
        if op == "<":
            return value < literal
        if op == "<=":
            return value <= literal
        if op == ">":
            return value > literal
        return value >= literal
    except TypeError:
        return False


def evaluate(expr: FilterExpr, packet: DissectedPacket) -> bool:
    """Pure per-packet truth value; any-instance semantics for multi-valued fields."""
    if type(expr) is ProtocolAtom:
        name = expr.name
        for layer in packet.layers:
            if layer.protocol == name:
                return True
        return False
    if type(expr) is FieldCmp:
        spec = DISPLAY_FIELDS[expr.field_path]
        for value in _field_instances(spec, packet):
            if _compare(expr.op, value, expr.literal):
                return True
        return False
    if type(expr) is And:
        return evaluate(expr.left, packet) and evaluate(expr.right, packet)
    if type(expr) is Or:
        return evaluate(expr.left, packet) or evaluate(expr.right, packet)
    if type(expr) is Not:
        return not evaluate(expr.child, packet)
    return True  # MatchAll


def apply_filter(packets, expr: FilterExpr) -> list[int]:
    """Ascending indices of matching packets; the index set shared by all views."""
    if type(expr) is MatchAll:
        return list(range(len(packets)))
    return [i for i, packet in enumerate(packets) if evaluate(expr, packet)]


# ---------------------------------------------------------------------------
# Canonical rendering (parse -> render -> parse is structure-stable)
# ---------------------------------------------------------------------------

_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_ATOM = 4


def _precedence(expr: FilterExpr) -> int:
    if type(expr) is Or:
        return _PREC_OR
    if type(expr) is And:
        return _PREC_AND
    if type(expr) is Not:
        return _PREC_NOT
    return _PREC_ATOM


def _render_literal(literal) -> str:
    if isinstance(literal, Address):
        return str(literal)
    if isinstance(literal, str):
        return f"'{literal}'" if '"' in literal else f'"{literal}"'
    return str(literal)


def _wrap(expr: FilterExpr, minimum: int) -> str:
    text = render(expr)
    return f"({text})" if _precedence(expr) < minimum else text


def render(expr: FilterExpr) -> str:
    """Canonical text form; parse_filter(render(e)) reproduces e's structure."""
    kind = type(expr)
    if kind is MatchAll:
        return ""
    if kind is ProtocolAtom:
        return expr.name
    if kind is FieldCmp:
        return f"{expr.field_path} {expr.op} {_render_literal(expr.literal)}"
    if kind is Not:
        return "!" + _wrap(expr.child, _PREC_NOT + 1 if type(expr.child) is not Not else _PREC_NOT)
    if kind is And:
        return f"{_wrap(expr.left, _PREC_AND)} && {_wrap(expr.right, _PREC_AND + 1)}"
    return f"{_wrap(expr.left, _PREC_OR)} || {_wrap(expr.right, _PREC_OR + 1)}"
