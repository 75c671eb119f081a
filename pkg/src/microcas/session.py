"""Persistent evaluation session and the single-client socket worker.

The command language is deliberately small and first-order: assignments
(`NAME = expr`), bare expressions, `use <ring>`, and builtin calls over
the kernel (`ring`, `ideal`, `gb`, `radical`, `saturate`, `quotient`,
`dimension`, `primaryDecomposition`, `eliminate`, `snf`, `factorn`,
`solve`, `member`, plus `ls`/`exists`/`getwd`/`vars`).  Ideal-valued
names combine with `+`, `*` and `==`.

Every successful evaluation bumps the output history and binds the result
to `o<n>`.  Bare polynomial expressions resolve their variables against
the most recently used ring that contains all of them.

Wire protocol: 4-byte big-endian length-prefixed UTF-8 frames; the
zero-length frame is the shutdown signal.  A response payload is the line
`STATUS SP LINECOUNT` followed by LINECOUNT output lines.
"""

from __future__ import annotations

import os
import re
import socket
import struct
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

from . import _expr
from .errors import (
    DimensionalityError,
    ExprSyntaxError,
    InternalError,
    ProtocolError,
    RingMismatchError,
    SerializeError,
    UnknownVariableError,
    UnsupportedFieldError,
    UnsupportedIdealShapeError,
)
from .groebner import GroebnerBasis, ideal_member
from .ideals import (
    Ideal,
    IdealList,
    dimension,
    eliminate,
    ideal_product,
    ideal_sum,
    ideal_equals,
    primary_decomposition,
    quotient,
    radical,
    saturate,
)
from .intalg import IntMatrix, factor_n, snf
from .poly import Polynomial, PolynomialRing, cook_poly, poly_parse_text
from .solver import DEFAULT_TOLERANCE, solve_zero_dim
from .wirefmt import Ctx, default_registry, serialize

_HIDDEN = re.compile(r"^_int|^o[0-9]+$")
_KEYWORDS = {"true", "false", "null", "use"}

STATUS_OK = 0
STATUS_EVAL = 1
STATUS_SYNTAX = 2
STATUS_INTERNAL = 3

_EVAL_ERRORS = (
    RingMismatchError,
    UnknownVariableError,
    UnsupportedFieldError,
    UnsupportedIdealShapeError,
    DimensionalityError,
    SerializeError,
    ValueError,
    ZeroDivisionError,
    OverflowError,
)


# ---------------------------------------------------------------------------
# framing


def encode_frame(payload: bytes) -> bytes:
    return struct.pack(">I", len(payload)) + payload


def write_frame(sock: socket.socket, payload: bytes):
    sock.sendall(encode_frame(payload))


def write_shutdown(sock: socket.socket):
    sock.sendall(struct.pack(">I", 0))


def _read_exact(sock: socket.socket, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf


def read_frame(sock: socket.socket) -> bytes | None:
    """Next frame payload; None on the shutdown frame or EOF."""
    header = _read_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    if length == 0:
        return None
    return _read_exact(sock, length)


@dataclass(frozen=True)
class Response:
    status: int
    lines: tuple

    @property
    def line_count(self) -> int:
        return len(self.lines)

    def encode(self) -> bytes:
        head = f"{self.status} {len(self.lines)}"
        if self.lines:
            head += "\n" + "\n".join(self.lines)
        return head.encode("utf-8")

    @classmethod
    def decode(cls, payload: bytes) -> "Response":
        try:
            text = payload.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProtocolError(f"response not UTF-8: {exc}") from None
        first, sep, rest = text.partition("\n")
        parts = first.split(" ")
        if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
            raise ProtocolError(f"bad response header {first!r}")
        status, count = int(parts[0]), int(parts[1])
        lines = tuple(rest.split("\n")) if sep else ()
        if len(lines) != count:
            raise ProtocolError(f"line count mismatch: said {count}, got {len(lines)}")
        return cls(status, lines)


def ok_response(lines) -> Response:
    return Response(STATUS_OK, tuple(lines))


def error_response(status: int, message: str) -> Response:
    return Response(status, tuple(message.split("\n")))


# ---------------------------------------------------------------------------
# session state


@dataclass
class Session:
    bindings: dict = dataclass_field(default_factory=dict)
    history_counter: int = 0
    ring_stack: list = dataclass_field(default_factory=list)
    workdir: str = dataclass_field(default_factory=os.getcwd)

    def push_ring(self, ring: PolynomialRing):
        if ring in self.ring_stack:
            self.ring_stack.remove(ring)
        self.ring_stack.insert(0, ring)

    def scope_ring_for(self, names) -> PolynomialRing:
        names = set(names)
        for ring in self.ring_stack:
            if names <= set(ring.variables):
                return ring
        nowhere = sorted(n for n in names
                         if not any(n in r.variables for r in self.ring_stack))
        missing = nowhere or sorted(names)
        raise UnknownVariableError(
            f"no ring in scope defines: {', '.join(missing)}")


def builtin_ls(session: Session, all_names: bool = False) -> list:
    names = sorted(session.bindings)
    if all_names:
        return names
    return [n for n in names if not _HIDDEN.search(n)]


def builtin_exists(session: Session, names) -> list:
    return [n in session.bindings for n in names]


def builtin_getwd(session: Session) -> str:
    return session.workdir


# ---------------------------------------------------------------------------
# statement evaluation


def eval_statement(session: Session, source: str) -> Response:
    """Evaluate one statement, bind `o<n>`, and serialize the result."""
    try:
        value, bind_name = _execute(session, source)
        text = serialize(value)
    except ExprSyntaxError as exc:
        return error_response(STATUS_SYNTAX, str(exc))
    except _EVAL_ERRORS as exc:
        return error_response(STATUS_EVAL, str(exc))
    except Exception as exc:  # noqa: BLE001 - the worker must always answer
        return error_response(STATUS_INTERNAL, f"internal error: {exc}")
    session.history_counter += 1
    session.bindings[f"o{session.history_counter}"] = value
    if bind_name is not None:
        session.bindings[bind_name] = value
    return ok_response(text.split("\n"))


def _execute(session: Session, source: str):
    tokens = _expr.tokenize(source, reals=True)
    if not tokens:
        raise ExprSyntaxError("empty statement", 0)
    ev = _Evaluator(session)

    if (tokens[0].kind == "NAME" and tokens[0].value == "use"
            and len(tokens) > 1 and tokens[1].kind != "=="):
        node = _parse_from(tokens[1:], len(source))
        ring = ev.eval_top(node)
        if not isinstance(ring, PolynomialRing):
            raise ValueError("use requires a ring")
        session.push_ring(ring)
        return ring, None

    if (len(tokens) >= 2 and tokens[0].kind == "NAME" and tokens[1].kind == "="):
        name = tokens[0].value
        if name in _KEYWORDS:
            raise ExprSyntaxError(f"cannot assign to {name!r}", tokens[0].pos)
        node = _parse_from(tokens[2:], len(source))
        return ev.eval_top(node), name

    node = _parse_from(tokens, len(source))
    return ev.eval_top(node), None


def _parse_from(tokens, end):
    parser = _expr._Parser(tokens, end, juxt=True, calls="adjacent")
    node = parser.parse_expr()
    trailing = parser.peek()
    if trailing is not None:
        raise ExprSyntaxError("trailing input", trailing.pos, "end of input")
    return node


class _Evaluator:
    def __init__(self, session: Session):
        self.session = session
        self.ctx = Ctx(default_registry())

    # -- entry ---------------------------------------------------------------

    def eval_top(self, node):
        if isinstance(node, _expr.Call):
            return self.eval_call(node)
        scope = self._resolve_scope(node)
        return self.eval_node(node, scope)

    def _resolve_scope(self, node):
        names = _expr.free_names(node) - set(self.session.bindings) - _KEYWORDS
        if not names:
            return None
        return self.session.scope_ring_for(names)

    # -- general expressions ---------------------------------------------------

    def eval_node(self, node, ring):
        if isinstance(node, _expr.Num):
            return node.value
        if isinstance(node, _expr.Str):
            return node.value
        if isinstance(node, _expr.Name):
            return self._lookup(node, ring)
        if isinstance(node, _expr.ListNode):
            return [self.eval_node(item, ring) for item in node.items]
        if isinstance(node, _expr.Neg):
            return self._negate(self.eval_node(node.operand, ring), node.pos)
        if isinstance(node, _expr.Bin):
            left = self.eval_node(node.left, ring)
            right = self.eval_node(node.right, ring)
            return _binop(node.op, left, right, node.pos)
        if isinstance(node, _expr.Call):
            return self.eval_call(node)
        raise InternalError(f"unhandled node {node!r}")

    def _lookup(self, node, ring):
        name = node.ident
        if name == "true":
            return True
        if name == "false":
            return False
        if name == "null":
            return None
        if name in self.session.bindings:
            return self.session.bindings[name]
        if ring is None:
            ring_candidates = [r for r in self.session.ring_stack if name in r.variables]
            if ring_candidates:
                return Polynomial.variable(ring_candidates[0], name)
        elif name in ring.variables:
            return Polynomial.variable(ring, name)
        raise UnknownVariableError(f"no ring in scope defines: {name}")

    @staticmethod
    def _negate(value, pos):
        if isinstance(value, (int, float, Fraction, Polynomial)) and not isinstance(value, bool):
            return -value
        raise ValueError("cannot negate this value")

    # -- builtins ---------------------------------------------------------------

    def eval_call(self, node):
        tag, args = node.tag, list(node.args)
        method = getattr(self, f"_b_{tag}", None)
        if tag == "primaryDecomposition":
            method = self._b_primary_decomposition
        if method is None:
            raise ValueError(f"unknown builtin {tag!r}")
        return method(args, node.pos)

    def _b_ring(self, args, pos):
        ring = self.ctx.ring(_expr.Call("ring", tuple(args), pos))
        self.session.push_ring(ring)
        return ring

    def _ring_valued(self, node):
        """Ring literal or a name bound to a ring; None when it is neither."""
        if isinstance(node, _expr.Call) and node.tag == "ring":
            return self._b_ring(list(node.args), node.pos)
        if isinstance(node, _expr.Name):
            value = self.session.bindings.get(node.ident)
            if isinstance(value, PolynomialRing):
                return value
        return None

    def _poly_in(self, node, ring):
        if isinstance(node, _expr.Str):
            return poly_parse_text(node.value, ring)
        if isinstance(node, _expr.Call):
            value = self.eval_call(node)
            if not isinstance(value, Polynomial):
                raise ValueError(f"{node.tag} did not produce a polynomial")
            if value.ring != ring:
                raise RingMismatchError("polynomial argument in a different ring")
            return value
        return cook_poly(node, ring, self._binding_resolver())

    def _binding_resolver(self):
        bindings = self.session.bindings

        def resolve(name):
            value = bindings.get(name)
            if isinstance(value, (Polynomial, int, Fraction)):
                return value
            return None

        return resolve

    def _gen_nodes(self, args):
        if len(args) == 1 and isinstance(args[0], _expr.ListNode):
            return list(args[0].items)
        return args

    def _b_poly(self, args, pos):
        _arity("poly", args, 2)
        ring = self._ring_valued(args[0])
        if ring is None:
            raise ValueError("poly literal needs a ring first argument")
        return self._poly_in(args[1], ring)

    def _b_ideal(self, args, pos):
        if not args:
            raise ValueError("ideal needs generators")
        ring = self._ring_valued(args[0])
        if ring is not None:
            gen_nodes = self._gen_nodes(args[1:])
        else:
            gen_nodes = self._gen_nodes(args)
            names = set()
            for n in gen_nodes:
                if isinstance(n, _expr.Str):
                    names |= {t.value for t in _expr.tokenize(n.value, reals=False)
                              if t.kind == "NAME"}
                else:
                    names |= _expr.free_names(n)
            names -= set(self.session.bindings) | _KEYWORDS
            ring = self.session.scope_ring_for(names)
        gens = tuple(self._poly_in(n, ring) for n in gen_nodes)
        return Ideal(ring, gens)

    def _ideal_arg(self, node, what="argument"):
        value = self.eval_top(node) if isinstance(node, _expr.Call) else self.eval_node(node, None)
        if isinstance(value, GroebnerBasis):
            out = Ideal(value.ring, value.generators)
            out._gb.append(value)
            return out
        if not isinstance(value, Ideal):
            raise ValueError(f"{what} must be an ideal")
        return value

    def _b_gb(self, args, pos):
        if len(args) == 2 and isinstance(args[1], _expr.ListNode):
            ring = self._ring_valued(args[0])
            if ring is None:
                raise ValueError("gb literal needs a ring first argument")
            gens = tuple(self._poly_in(n, ring) for n in args[1].items)
            return GroebnerBasis(ring, gens, True)
        if len(args) != 1:
            raise ValueError("gb takes one ideal")
        value = self.eval_top(args[0]) if isinstance(args[0], _expr.Call) \
            else self.eval_node(args[0], None)
        if isinstance(value, GroebnerBasis):
            return value
        if not isinstance(value, Ideal):
            raise ValueError("gb takes an ideal")
        return value.groebner()

    def _b_radical(self, args, pos):
        _arity("radical", args, 1)
        return radical(self._ideal_arg(args[0]))

    def _b_saturate(self, args, pos):
        _arity("saturate", args, 2)
        return saturate(self._ideal_arg(args[0]), self._ideal_arg(args[1]))

    def _b_quotient(self, args, pos):
        _arity("quotient", args, 2)
        return quotient(self._ideal_arg(args[0]), self._ideal_arg(args[1]))

    def _b_dimension(self, args, pos):
        _arity("dimension", args, 1)
        node = args[0]
        value = self.eval_top(node) if isinstance(node, _expr.Call) else self.eval_node(node, None)
        if isinstance(value, IdealList):
            return [dimension(i) for i in value.items]
        if isinstance(value, GroebnerBasis):
            out = Ideal(value.ring, value.generators)
            out._gb.append(value)
            return dimension(out)
        if isinstance(value, Ideal):
            return dimension(value)
        raise ValueError("dimension takes an ideal or a list of ideals")

    def _b_primary_decomposition(self, args, pos):
        _arity("primaryDecomposition", args, 1)
        return primary_decomposition(self._ideal_arg(args[0]))

    def _b_eliminate(self, args, pos):
        _arity("eliminate", args, 2)
        ideal = self._ideal_arg(args[0])
        if not isinstance(args[1], _expr.ListNode):
            raise ValueError("eliminate takes a [..] list of variables")
        names = []
        for item in args[1].items:
            if isinstance(item, _expr.Name):
                names.append(item.ident)
            elif isinstance(item, _expr.Str):
                names.append(item.value)
            else:
                raise ValueError("eliminate variables must be names")
        return eliminate(ideal, names)

    def _b_member(self, args, pos):
        _arity("member", args, 2)
        target = self.eval_top(args[1]) if isinstance(args[1], _expr.Call) \
            else self.eval_node(args[1], None)
        if isinstance(target, Ideal):
            basis = target.groebner()
        elif isinstance(target, GroebnerBasis):
            basis = target
        else:
            raise ValueError("member tests against an ideal or basis")
        f = self._poly_in(args[0], basis.ring)
        return ideal_member(f, basis)

    def _b_solve(self, args, pos):
        if len(args) not in (1, 2):
            raise ValueError("solve takes an ideal and an optional tolerance")
        ideal = self._ideal_arg(args[0])
        tol = DEFAULT_TOLERANCE
        if len(args) == 2:
            tol = self.eval_node(args[1], None)
            if isinstance(tol, bool) or not isinstance(tol, (int, float, Fraction)):
                raise ValueError("tolerance must be a number")
            tol = float(tol)
        return solve_zero_dim(ideal, tol)

    def _b_snf(self, args, pos):
        _arity("snf", args, 1)
        value = self.eval_node(args[0], None)
        if isinstance(value, list):
            value = IntMatrix.from_rows(value)
        if not isinstance(value, IntMatrix):
            raise ValueError("snf takes an integer matrix")
        return snf(value)

    def _b_matrix(self, args, pos):
        return self.ctx.value(_expr.Call("matrix", tuple(args), pos))

    def _b_factorn(self, args, pos):
        _arity("factorn", args, 1)
        n = self.eval_node(args[0], None)
        if isinstance(n, bool) or not isinstance(n, int):
            raise ValueError("factorn takes an integer")
        return factor_n(n)

    def _b_ls(self, args, pos):
        all_names = False
        if args:
            _arity("ls", args, 1)
            flag = self.eval_node(args[0], None)
            if not isinstance(flag, bool):
                raise ValueError("ls takes true or false")
            all_names = flag
        return builtin_ls(self.session, all_names)

    def _b_exists(self, args, pos):
        names = [self.eval_node(n, None) for n in self._gen_nodes(args)]
        if not all(isinstance(n, str) for n in names):
            raise ValueError("exists takes quoted names")
        return builtin_exists(self.session, names)

    def _b_getwd(self, args, pos):
        _arity("getwd", args, 0)
        return builtin_getwd(self.session)

    def _b_vars(self, args, pos):
        _arity("vars", args, 0)
        if not self.session.ring_stack:
            raise ValueError("no ring in scope")
        return list(self.session.ring_stack[0].variables)


def _arity(tag, args, n):
    if len(args) != n:
        raise ValueError(f"{tag} takes {n} argument{'s' if n != 1 else ''}, got {len(args)}")


def _binop(op, left, right, pos):
    if op == "==":
        if isinstance(left, Ideal) and isinstance(right, Ideal):
            return ideal_equals(left, right)
        return left == right
    if isinstance(left, Ideal) or isinstance(right, Ideal):
        if not (isinstance(left, Ideal) and isinstance(right, Ideal)):
            raise ValueError("ideals only combine with ideals")
        if op == "+":
            return ideal_sum(left, right)
        if op == "*":
            return ideal_product(left, right)
        raise ValueError(f"operator {op!r} is not defined on ideals")
    if op == "^":
        if isinstance(right, bool) or not isinstance(right, int) or right < 0:
            raise ValueError("exponent must be a nonnegative integer")
        return left ** right
    if isinstance(left, bool) or isinstance(right, bool):
        raise ValueError(f"operator {op!r} is not defined on booleans")
    numeric = (int, float, Fraction, Polynomial)
    if not isinstance(left, numeric) or not isinstance(right, numeric):
        raise ValueError(f"operator {op!r} undefined for these values")
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if isinstance(left, Polynomial) or isinstance(right, Polynomial):
            if isinstance(right, Polynomial):
                if not right.is_constant() or right.is_zero():
                    raise ValueError("division only by a nonzero constant")
                right = right.constant_value()
            return left * left.ring.field.inv(left.ring.field.coerce(right)) \
                if isinstance(left, Polynomial) else left / right
        if isinstance(left, int) and isinstance(right, int):
            if right == 0:
                raise ZeroDivisionError("division by zero")
            return Fraction(left, right)
        return left / right
    raise InternalError(f"unhandled operator {op!r}")


# ---------------------------------------------------------------------------
# socket worker


def serve(port: int, workdir: str | None = None, host: str = "127.0.0.1") -> int:
    """Host one session for one client; returns 0 on clean shutdown.

    The listening socket closes right after the first accept, so a second
    connection attempt is refused.  A zero-length frame (or EOF) ends the
    loop; a frame that is not valid UTF-8 gets a status-3 response and the
    loop continues.
    """
    if workdir:
        os.chdir(workdir)
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    listener.bind((host, port))
    listener.listen(1)
    conn, _ = listener.accept()
    listener.close()
    session = Session(workdir=os.getcwd())
    with conn:
        while True:
            try:
                payload = read_frame(conn)
            except OSError:
                break
            if payload is None:
                break
            try:
                source = payload.decode("utf-8")
            except UnicodeDecodeError:
                write_frame(conn, error_response(STATUS_INTERNAL,
                                                 "malformed frame: not UTF-8").encode())
                continue
            response = eval_statement(session, source)
            try:
                write_frame(conn, response.encode())
            except OSError:
                break
    return 0
