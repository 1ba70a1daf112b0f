#!/usr/bin/python
# -*- coding: utf-8 -*-
from __future__ import annotations

__author__ = "bibow"

import math
import struct
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Sequence, Tuple

from ..models.expr_packet import (
    Arg,
    BinOp,
    Digits,
    Expr,
    ExprMode,
    ExprPacket,
    Literal,
    LinkUsage,
    Topology,
    TransmissionReport,
)
from .avnmp_utility import write_csv
from .exceptions import ConfigurationError, EvaluationError, ParseError

OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_DIGITS, OP_ARG, OP_LIT = range(0x01, 0x08)

_BINARY_OPCODES = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}
_OPCODE_SYMBOLS = {code: symbol for symbol, code in _BINARY_OPCODES.items()}
_SYMBOL_ALIASES = {"×": "*", "÷": "/", "−": "-"}

PI_LINK_CAPACITIES: Dict[int, float] = {1: 100.0, 2: 100.0, 3: 1000.0, 4: 1000.0}
PI_FORWARD_ROUTE: Tuple[int, ...] = (1, 2, 3, 4)
PI_RETURN_ROUTE: Tuple[int, ...] = (4, 3, 2, 1)
PI_DEFAULT_PRECISION = 1000


# Text form: prefix tokens, e.g. "/ #1 #2" or "digits / #1 #2 7".
def parse_expression(text: str) -> Expr:
    tokens = text.split()
    if not tokens:
        raise ParseError("empty expression")

    expr, position = _parse_tokens(tokens, 0)
    if position != len(tokens):
        raise ParseError(f"unexpected trailing tokens: {' '.join(tokens[position:])}")
    return expr


def _parse_tokens(tokens: Sequence[str], position: int) -> Tuple[Expr, int]:
    if position >= len(tokens):
        raise ParseError("expression ended early")

    token = _SYMBOL_ALIASES.get(tokens[position], tokens[position])
    if token in _BINARY_OPCODES:
        left, position = _parse_tokens(tokens, position + 1)
        right, position = _parse_tokens(tokens, position)
        return BinOp(token, left, right), position

    if token == "digits":
        inner, position = _parse_tokens(tokens, position + 1)
        if position >= len(tokens) or not tokens[position].isdigit():
            raise ParseError("digits needs a positive integer count")
        n = int(tokens[position])
        if n < 1:
            raise ParseError("digits needs a positive integer count")
        return Digits(inner, n), position + 1

    if token.startswith("#"):
        if not token[1:].isdigit() or not 1 <= int(token[1:]) <= 255:
            raise ParseError(f"bad argument reference '{token}'")
        return Arg(int(token[1:])), position + 1

    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"unknown token '{token}'") from None
    if not math.isfinite(value):
        raise ParseError(f"literal '{token}' is not finite")
    return Literal(value), position + 1


def format_expression(expr: Expr) -> str:
    if isinstance(expr, BinOp):
        return f"{expr.op} {format_expression(expr.left)} {format_expression(expr.right)}"
    if isinstance(expr, Digits):
        return f"digits {format_expression(expr.expr)} {expr.n}"
    if isinstance(expr, Arg):
        return f"#{expr.index}"
    return repr(expr.value)


def serialize_expression(expr: Expr) -> bytes:
    if isinstance(expr, BinOp):
        return (
            bytes([_BINARY_OPCODES[expr.op]])
            + serialize_expression(expr.left)
            + serialize_expression(expr.right)
        )
    if isinstance(expr, Digits):
        return bytes([OP_DIGITS]) + serialize_expression(expr.expr) + struct.pack(">I", expr.n)
    if isinstance(expr, Arg):
        return bytes([OP_ARG, expr.index])
    return bytes([OP_LIT]) + struct.pack(">d", expr.value)


def deserialize_expression(data: bytes) -> Expr:
    expr, position = _read_expression(data, 0)
    if position != len(data):
        raise ParseError(f"{len(data) - position} stray bytes after expression")
    return expr


def _take(data: bytes, position: int, count: int) -> bytes:
    if position + count > len(data):
        raise ParseError(f"opcode stream truncated at byte {position}")
    return data[position : position + count]


def _read_expression(data: bytes, position: int) -> Tuple[Expr, int]:
    opcode = _take(data, position, 1)[0]
    position += 1

    if opcode in _OPCODE_SYMBOLS:
        left, position = _read_expression(data, position)
        right, position = _read_expression(data, position)
        return BinOp(_OPCODE_SYMBOLS[opcode], left, right), position
    if opcode == OP_DIGITS:
        inner, position = _read_expression(data, position)
        (n,) = struct.unpack(">I", _take(data, position, 4))
        return Digits(inner, n), position + 4
    if opcode == OP_ARG:
        return Arg(_take(data, position, 1)[0]), position + 1
    if opcode == OP_LIT:
        (value,) = struct.unpack(">d", _take(data, position, 8))
        return Literal(value), position + 8

    raise ParseError(f"unknown opcode 0x{opcode:02X}")


def algorithmic_packet(code: Expr | str, args: Sequence[float] = ()) -> ExprPacket:
    expr = parse_expression(code) if isinstance(code, str) else code
    return ExprPacket(
        mode=ExprMode.ALGORITHMIC,
        code=expr,
        args=tuple(float(arg) for arg in args),
        code_bytes=serialize_expression(expr),
    )


def static_packet(payload: str) -> ExprPacket:
    return ExprPacket(mode=ExprMode.STATIC, payload=payload)


def decimal_expansion(value: Fraction, precision: int) -> str:
    """Truncate to `precision` significant digits; the integer part is never cut."""
    if precision < 1:
        raise EvaluationError("precision must be at least one digit")

    sign = "-" if value < 0 else ""
    value = abs(value)
    integer, remainder = divmod(value.numerator, value.denominator)

    significant = len(str(integer)) if integer else 0
    digits: List[str] = []
    while remainder and significant < precision:
        digit, remainder = divmod(remainder * 10, value.denominator)
        digits.append(str(digit))
        if significant or digit:
            significant += 1

    fraction = "".join(digits).rstrip("0")
    text = f"{integer}.{fraction}" if fraction else str(integer)
    return "0" if text == "0" else sign + text


def _evaluate(expr: Expr, args: Sequence[float]) -> Fraction:
    if isinstance(expr, Literal):
        return Fraction(expr.value)
    if isinstance(expr, Arg):
        if not 1 <= expr.index <= len(args):
            raise EvaluationError(f"argument #{expr.index} not supplied ({len(args)} given)")
        return Fraction(args[expr.index - 1])
    if isinstance(expr, Digits):
        return Fraction(decimal_expansion(_evaluate(expr.expr, args), expr.n))

    left, right = _evaluate(expr.left, args), _evaluate(expr.right, args)
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    if expr.op == "*":
        return left * right
    if right == 0:
        raise EvaluationError("division by zero")
    return left / right


def operation_count(expr: Expr) -> int:
    """Arithmetic nodes count one operation; digits(e, n) costs n more."""
    if isinstance(expr, BinOp):
        return 1 + operation_count(expr.left) + operation_count(expr.right)
    if isinstance(expr, Digits):
        return expr.n + operation_count(expr.expr)
    return 0


def evaluate(p: ExprPacket, precision: int) -> ExprPacket:
    if precision < 1:
        raise EvaluationError("precision must be at least one digit")
    if p.mode is ExprMode.STATIC:
        return p

    code = p.code
    if isinstance(code, Digits):
        text = decimal_expansion(_evaluate(code.expr, p.args), code.n)
    else:
        text = decimal_expansion(_evaluate(code, p.args), precision)
    return static_packet(text)


def _route_destination(topo: Topology, route: Sequence[int]) -> str:
    last = topo.link(route[-1])
    if len(route) == 1:
        return last.endpoints[1]

    previous = topo.link(route[-2])
    shared = set(last.endpoints) & set(previous.endpoints)
    outward = [endpoint for endpoint in last.endpoints if endpoint not in shared]
    return outward[0] if outward else last.endpoints[1]


def transmit(
    topo: Topology, routes: Sequence[Sequence[int]], packets: Sequence[ExprPacket]
) -> TransmissionReport:
    if len(routes) != len(packets):
        raise ConfigurationError(f"{len(packets)} packets but {len(routes)} routes")

    report = TransmissionReport(
        link_load={link_id: 0 for link_id in topo.links},
        link_transit={link_id: Fraction(0) for link_id in topo.links},
        node_processing={node_id: Fraction(0) for node_id in topo.nodes},
    )

    for index, (route, packet) in enumerate(zip(routes, packets)):
        if not route:
            raise ConfigurationError(f"packet {index} has an empty route")

        for link_id in route:
            link = topo.link(link_id)
            transit = Fraction(packet.size_bytes) / Fraction(link.capacity)
            report.usages.append(LinkUsage(index, link_id, packet.size_bytes, transit))
            report.link_load[link_id] += packet.size_bytes
            report.link_transit[link_id] += transit

        if packet.mode is ExprMode.ALGORITHMIC:
            destination = _route_destination(topo, route)
            rate = Fraction(topo.nodes[destination].processing_rate)
            report.node_processing[destination] += operation_count(packet.code) / rate

    return report


def pi_topology(capacities: Mapping[int, float] | None = None) -> Topology:
    capacities = {**PI_LINK_CAPACITIES, **(capacities or {})}
    topo = Topology()
    for link_id in sorted(capacities):
        topo.add_link(link_id, f"n{link_id - 1}", f"n{link_id}", capacities[link_id])
    return topo


def pi_scenario(
    precision: int = PI_DEFAULT_PRECISION, capacities: Mapping[int, float] | None = None
) -> Tuple[Topology, List[Tuple[int, ...]], List[ExprPacket]]:
    """22/7 sent as code one way and as its decimal expansion the other way."""
    algorithmic = algorithmic_packet("/ #1 #2", (22, 7))
    static = evaluate(algorithmic, precision)
    return (
        pi_topology(capacities),
        [PI_FORWARD_ROUTE, PI_RETURN_ROUTE],
        [algorithmic, static],
    )


def write_transmission_report(path: str | Path, report: TransmissionReport) -> Path:
    """One row per link traversal, in routing order."""
    return write_csv(
        path,
        ("packet", "link_id", "load_bytes", "transit_s"),
        (
            (usage.packet_index, usage.link_id, usage.load_bytes, float(usage.transit_s))
            for usage in report.usages
        ),
    )
