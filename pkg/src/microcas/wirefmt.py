"""Canonical external-string format for transmissible values.

One grammar covers every value that crosses the wire: scalars, quoted
text, bracket lists and `tag(...)` trees.  Rings are written inline in
every ring-dependent value, so any payload parses without session state.
Polynomials appear as bare expression text inside ideal/matrix/gb
argument lists and are interpreted against the preceding ring argument.

Serialization and parsing are exact inverses on canonical text; the
parser additionally tolerates arbitrary whitespace between tokens.
Unknown tags parse into a generic node so third-party tags degrade
gracefully; `ParseRegistry` lets callers override or extend per-tag
handling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import _expr
from .errors import ExprSyntaxError, SerializeError
from .groebner import GroebnerBasis
from .ideals import Ideal, IdealList
from .intalg import Factorization, IntMatrix, SnfResult
from .poly import CCF, QQ, ZZ, Polynomial, PolynomialRing, Zp, cook_poly, to_text
from .solver import SolutionSet


@dataclass(frozen=True)
class PolyMatrix:
    ring: PolynomialRing
    rows: tuple  # tuple of tuples of Polynomial

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise ValueError("matrix must be nonempty")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ValueError("ragged rows")


@dataclass(frozen=True)
class RefValue:
    name: str
    type_tag: str


@dataclass(frozen=True)
class ErrorValue:
    code: int
    message: str


@dataclass(frozen=True)
class GenericNode:
    tag: str
    args: tuple


_INT_RING = PolynomialRing((), ZZ, "grevlex")


# ---------------------------------------------------------------------------
# parse registry


class ParseRegistry:
    """Tag-to-handler dispatch for `tag(...)` forms.

    A handler receives the raw argument AST list and a `Ctx` with cooking
    helpers, and returns the structured value.  Later registrations shadow
    earlier ones; tags without a handler fall through to `GenericNode`.
    """

    def __init__(self):
        self._handlers = dict(_BUILTIN_HANDLERS)

    def register(self, tag: str, handler) -> "ParseRegistry":
        """Return a new registry with `handler` bound to `tag` (shadowing)."""
        if not tag:
            raise ValueError("empty tag")
        clone = ParseRegistry.__new__(ParseRegistry)
        clone._handlers = {**self._handlers, tag: handler}
        return clone

    def lookup(self, tag: str):
        return self._handlers.get(tag)


def register_handler(registry: ParseRegistry, tag: str, handler) -> ParseRegistry:
    return registry.register(tag, handler)


class Ctx:
    """Cooking helpers handed to parse handlers."""

    def __init__(self, registry: ParseRegistry):
        self.registry = registry

    def value(self, node):
        return _cook_value(node, self.registry)

    def ring(self, node) -> PolynomialRing:
        return _cook_ring(node)

    def poly(self, node, ring: PolynomialRing) -> Polynomial:
        if isinstance(node, _expr.Str):
            raise ExprSyntaxError("quoted text where a polynomial was expected", node.pos)
        return cook_poly(node, ring)

    def name(self, node) -> str:
        if not isinstance(node, _expr.Name):
            raise ExprSyntaxError("expected a bare name", getattr(node, "pos", 0))
        return node.ident

    def items(self, node) -> tuple:
        if not isinstance(node, _expr.ListNode):
            raise ExprSyntaxError("expected a [...] list", getattr(node, "pos", 0))
        return node.items

    def int_(self, node) -> int:
        v = self.value(node)
        if not isinstance(v, int) or isinstance(v, bool):
            raise ExprSyntaxError("expected an integer", getattr(node, "pos", 0))
        return v

    def text(self, node) -> str:
        v = self.value(node)
        if not isinstance(v, str):
            raise ExprSyntaxError("expected quoted text", getattr(node, "pos", 0))
        return v

    def real(self, node):
        v = self.value(node)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ExprSyntaxError("expected a number", getattr(node, "pos", 0))
        return float(v)


def _need_args(tag, args, n):
    if len(args) != n:
        raise ExprSyntaxError(f"{tag} takes {n} arguments, got {len(args)}",
                              args[0].pos if args else 0)


def _cook_ring(node) -> PolynomialRing:
    if not isinstance(node, _expr.Call) or node.tag != "ring":
        raise ExprSyntaxError("expected a ring(...) value", getattr(node, "pos", 0))
    _need_args("ring", node.args, 3)
    field_node, vars_node, order_node = node.args
    if isinstance(field_node, _expr.Name):
        if field_node.ident == "QQ":
            field = QQ
        elif field_node.ident == "ZZ":
            field = ZZ
        elif field_node.ident == "CCf":
            field = CCF
        else:
            raise ExprSyntaxError(f"unknown field tag {field_node.ident!r}", field_node.pos)
    elif (isinstance(field_node, _expr.Call) and field_node.tag == "Zp"
          and len(field_node.args) == 1 and isinstance(field_node.args[0], _expr.Num)):
        field = Zp(field_node.args[0].value)
    else:
        raise ExprSyntaxError("bad field tag", getattr(field_node, "pos", 0))
    if not isinstance(vars_node, _expr.ListNode):
        raise ExprSyntaxError("ring variables must be a [...] list", getattr(vars_node, "pos", 0))
    names = []
    for item in vars_node.items:
        if not isinstance(item, _expr.Name):
            raise ExprSyntaxError("ring variable must be a bare name", getattr(item, "pos", 0))
        names.append(item.ident)
    if not isinstance(order_node, _expr.Name):
        raise ExprSyntaxError("bad order tag", getattr(order_node, "pos", 0))
    return PolynomialRing(tuple(names), field, order_node.ident)


def _handle_ring(args, ctx):
    return _cook_ring(_expr.Call("ring", tuple(args)))


def _handle_poly(args, ctx):
    _need_args("poly", args, 2)
    ring = ctx.ring(args[0])
    return ctx.poly(args[1], ring)


def _handle_ideal(args, ctx):
    _need_args("ideal", args, 2)
    ring = ctx.ring(args[0])
    gens = tuple(ctx.poly(n, ring) for n in ctx.items(args[1]))
    return Ideal(ring, gens)


def _handle_gb(args, ctx):
    _need_args("gb", args, 2)
    ring = ctx.ring(args[0])
    gens = tuple(ctx.poly(n, ring) for n in ctx.items(args[1]))
    return GroebnerBasis(ring, gens, True)


def _handle_ideal_list(args, ctx):
    _need_args("idealList", args, 2)
    ctx.ring(args[0])  # shared header; inner ideals are self-describing
    ideals = []
    for node in ctx.items(args[1]):
        v = ctx.value(node)
        if not isinstance(v, Ideal):
            raise ExprSyntaxError("idealList items must be ideals", getattr(node, "pos", 0))
        ideals.append(v)
    return IdealList(tuple(ideals))


def _handle_matrix(args, ctx):
    _need_args("matrix", args, 2)
    ring = ctx.ring(args[0])
    rows = []
    for row_node in ctx.items(args[1]):
        rows.append([ctx.poly(n, ring) for n in ctx.items(row_node)])
    if ring.field.tag == "ZZ" and not ring.variables:
        return IntMatrix.from_rows([[p.constant_value() for p in row] for row in rows])
    return PolyMatrix(ring, tuple(tuple(row) for row in rows))


def _handle_list(args, ctx):
    return [ctx.value(n) for n in args]


def _handle_snf(args, ctx):
    _need_args("snf", args, 3)
    mats = [ctx.value(n) for n in args]
    if not all(isinstance(m, IntMatrix) for m in mats):
        raise ExprSyntaxError("snf takes three integer matrices", 0)
    return SnfResult(P=mats[0], D=mats[1], Q=mats[2])


def _handle_factorization(args, ctx):
    _need_args("factorization", args, 2)
    primes = tuple(ctx.int_(n) for n in ctx.items(args[0]))
    powers = tuple(ctx.int_(n) for n in ctx.items(args[1]))
    return Factorization(primes, powers)


def _handle_solutions(args, ctx):
    _need_args("solutions", args, 3)
    names = tuple(ctx.text(n) for n in ctx.items(args[0]))
    points = tuple(tuple(ctx.real(x) for x in ctx.items(row)) for row in ctx.items(args[1]))
    return SolutionSet(names, points, ctx.real(args[2]))


def _handle_ref(args, ctx):
    _need_args("ref", args, 2)
    return RefValue(ctx.text(args[0]), ctx.text(args[1]))


_BUILTIN_HANDLERS = {
    "ring": _handle_ring,
    "poly": _handle_poly,
    "ideal": _handle_ideal,
    "idealList": _handle_ideal_list,
    "matrix": _handle_matrix,
    "list": _handle_list,
    "gb": _handle_gb,
    "snf": _handle_snf,
    "factorization": _handle_factorization,
    "solutions": _handle_solutions,
    "ref": _handle_ref,
}

_DEFAULT_REGISTRY = ParseRegistry()


def default_registry() -> ParseRegistry:
    return _DEFAULT_REGISTRY


# ---------------------------------------------------------------------------
# parsing


def parse(source: str, registry: ParseRegistry | None = None):
    """Parse canonical (or whitespace-relaxed) wire text into a value."""
    registry = registry or _DEFAULT_REGISTRY
    node = _expr.parse_expression(source, reals=True, juxt=False, calls="always")
    return _cook_value(node, registry)


def _cook_value(node, registry):
    if isinstance(node, _expr.Num):
        return node.value
    if isinstance(node, _expr.Str):
        return node.value
    if isinstance(node, _expr.Name):
        if node.ident == "true":
            return True
        if node.ident == "false":
            return False
        if node.ident == "null":
            return None
        raise ExprSyntaxError(f"bare name {node.ident!r} outside a ring context", node.pos)
    if isinstance(node, _expr.ListNode):
        return [_cook_value(item, registry) for item in node.items]
    if isinstance(node, _expr.Neg):
        inner = _cook_value(node.operand, registry)
        if isinstance(inner, bool) or not isinstance(inner, (int, float, Fraction)):
            raise ExprSyntaxError("minus sign on a non-number", node.pos)
        return -inner
    if isinstance(node, _expr.Bin):
        if node.op == "/":
            left = _cook_value(node.left, registry)
            right = _cook_value(node.right, registry)
            if isinstance(left, int) and isinstance(right, int) and right > 0 \
                    and not isinstance(left, bool) and not isinstance(right, bool):
                return Fraction(left, right)
        raise ExprSyntaxError(f"operator {node.op!r} outside a ring context", node.pos)
    if isinstance(node, _expr.Call):
        handler = registry.lookup(node.tag)
        ctx = Ctx(registry)
        if handler is None:
            return GenericNode(node.tag, tuple(_cook_value(a, registry) for a in node.args))
        return handler(list(node.args), ctx)
    raise ExprSyntaxError("unparseable value", getattr(node, "pos", 0))


# ---------------------------------------------------------------------------
# serialization


def serialize(value) -> str:
    """Canonical single-line text for a transmissible value."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        if not math.isfinite(value):
            raise SerializeError("non-finite real")
        return repr(value)
    if isinstance(value, str):
        return _quote(value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(serialize(v) for v in value) + "]"
    if isinstance(value, PolynomialRing):
        return _ring_text(value)
    if isinstance(value, Polynomial):
        # standalone polynomials carry their ring; inside ideal/gb/matrix
        # argument lists they stay bare expression text
        if value.ring.field.tag == "CCf":
            raise SerializeError("approximate polynomials are never serialized")
        return f"poly({_ring_text(value.ring)},{to_text(value)})"
    if isinstance(value, Ideal):
        return (f"ideal({_ring_text(value.ring)},"
                f"[{','.join(to_text(g) for g in value.generators)}])")
    if isinstance(value, GroebnerBasis):
        return (f"gb({_ring_text(value.ring)},"
                f"[{','.join(to_text(g) for g in value.generators)}])")
    if isinstance(value, IdealList):
        ring = value.items[0].ring
        inner = ",".join(serialize(i) for i in value.items)
        return f"idealList({_ring_text(ring)},[{inner}])"
    if isinstance(value, IntMatrix):
        rows = ",".join("[" + ",".join(str(x) for x in row) + "]"
                        for row in value.row_lists())
        return f"matrix({_ring_text(_INT_RING)},[{rows}])"
    if isinstance(value, PolyMatrix):
        rows = ",".join("[" + ",".join(to_text(p) for p in row) + "]"
                        for row in value.rows)
        return f"matrix({_ring_text(value.ring)},[{rows}])"
    if isinstance(value, SnfResult):
        return f"snf({serialize(value.P)},{serialize(value.D)},{serialize(value.Q)})"
    if isinstance(value, Factorization):
        return (f"factorization([{','.join(map(str, value.primes))}],"
                f"[{','.join(map(str, value.powers))}])")
    if isinstance(value, SolutionSet):
        names = ",".join(_quote(n) for n in value.variable_order)
        rows = ",".join("[" + ",".join(repr(x) for x in row) + "]"
                        for row in value.points)
        return f"solutions([{names}],[{rows}],{repr(value.tolerance)})"
    if isinstance(value, RefValue):
        return f"ref({_quote(value.name)},{_quote(value.type_tag)})"
    if isinstance(value, GenericNode):
        return f"{value.tag}({','.join(serialize(a) for a in value.args)})"
    if isinstance(value, ErrorValue):
        raise SerializeError("errors travel in the protocol status, not the payload")
    raise SerializeError(f"cannot serialize {type(value).__name__}")


def _quote(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{out}"'


def _ring_text(ring: PolynomialRing) -> str:
    field = ring.field
    if field.tag == "Zp":
        tag = f"Zp({field.modulus})"
    elif field.tag == "CCf":
        raise SerializeError("approximate rings are never serialized")
    else:
        tag = field.tag
    return f"ring({tag},[{','.join(ring.variables)}],{ring.order})"


# ---------------------------------------------------------------------------
# structural dumps (interop and golden-corpus testing)


def value_to_plain(value):
    """JSON-friendly structural description of a parsed value.

    Integers ride as decimal strings so consumers without big integers
    can compare exactly.
    """
    if isinstance(value, bool):
        return {"t": "bool", "v": value}
    if value is None:
        return {"t": "null"}
    if isinstance(value, int):
        return {"t": "int", "v": str(value)}
    if isinstance(value, Fraction):
        return {"t": "rat", "num": str(value.numerator), "den": str(value.denominator)}
    if isinstance(value, float):
        return {"t": "real", "v": value}
    if isinstance(value, str):
        return {"t": "text", "v": value}
    if isinstance(value, (list, tuple)):
        return {"t": "list", "items": [value_to_plain(v) for v in value]}
    if isinstance(value, PolynomialRing):
        field = value.field
        ftag = f"Zp:{field.modulus}" if field.tag == "Zp" else field.tag
        return {"t": "ring", "field": ftag, "vars": list(value.variables),
                "order": value.order}
    if isinstance(value, Polynomial):
        terms = []
        for c, m in value.terms:
            if isinstance(c, Fraction) and c.denominator != 1:
                coeff = {"t": "rat", "num": str(c.numerator), "den": str(c.denominator)}
            else:
                coeff = {"t": "int", "v": str(int(c))}
            terms.append([coeff, list(m)])
        return {"t": "poly", "ring": value_to_plain(value.ring), "terms": terms}
    if isinstance(value, Ideal):
        return {"t": "ideal", "ring": value_to_plain(value.ring),
                "gens": [value_to_plain(g) for g in value.generators]}
    if isinstance(value, GroebnerBasis):
        return {"t": "gb", "ring": value_to_plain(value.ring),
                "gens": [value_to_plain(g) for g in value.generators]}
    if isinstance(value, IdealList):
        return {"t": "idealList", "items": [value_to_plain(i) for i in value.items]}
    if isinstance(value, IntMatrix):
        return {"t": "intMatrix", "rows": [[str(x) for x in row] for row in value.row_lists()]}
    if isinstance(value, GenericNode):
        return {"t": "node", "tag": value.tag,
                "args": [value_to_plain(a) for a in value.args]}
    raise SerializeError(f"no structural dump for {type(value).__name__}")
