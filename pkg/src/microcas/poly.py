"""Exact multivariate polynomial arithmetic with monomial orders.

A ring fixes an ordered variable list, a coefficient field and a monomial
order.  Variables declared earlier rank higher in every order.  Polynomials
are immutable and canonical: terms strictly descending in the ring order,
no zero coefficients, so two polynomials are equal exactly when their term
sequences coincide.

Coefficient domains: exact rationals (QQ), a prime field Z/p (Zp), the
integers (ZZ, matrix work only), and machine-precision complex (CCf, used
internally by the numeric solver and never serialized).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from . import _expr
from .errors import (
    ExprSyntaxError,
    RingMismatchError,
    UnknownVariableError,
    UnsupportedFieldError,
)
from .intalg import is_probable_prime

_VAR_NAME = re.compile(r"[a-zA-Z][a-zA-Z0-9]*\Z")

Monomial = tuple  # exponent vector, one entry per ring variable


@dataclass(frozen=True)
class CoefficientField:
    tag: str  # QQ | ZZ | Zp | CCf
    modulus: int | None = None

    def __post_init__(self):
        if self.tag not in ("QQ", "ZZ", "Zp", "CCf"):
            raise UnsupportedFieldError(f"unknown coefficient domain {self.tag!r}")
        if self.tag == "Zp":
            if self.modulus is None or self.modulus < 2 or not is_probable_prime(self.modulus):
                raise UnsupportedFieldError(f"Zp modulus must be prime, got {self.modulus}")
        elif self.modulus is not None:
            raise UnsupportedFieldError(f"{self.tag} takes no modulus")

    @property
    def is_field(self) -> bool:
        return self.tag in ("QQ", "Zp", "CCf")

    @property
    def exact(self) -> bool:
        return self.tag in ("QQ", "Zp", "ZZ")

    def coerce(self, x):
        """Map an int/Fraction/float/complex into this domain."""
        if self.tag == "QQ":
            if isinstance(x, (int, Fraction)):
                return Fraction(x)
            raise UnsupportedFieldError(f"cannot coerce {x!r} into QQ")
        if self.tag == "Zp":
            p = self.modulus
            if isinstance(x, int):
                return x % p
            if isinstance(x, Fraction):
                den = x.denominator % p
                if den == 0:
                    raise ZeroDivisionError("denominator divisible by the modulus")
                return x.numerator * pow(den, -1, p) % p
            raise UnsupportedFieldError(f"cannot coerce {x!r} into Z/{p}")
        if self.tag == "ZZ":
            if isinstance(x, int):
                return x
            if isinstance(x, Fraction) and x.denominator == 1:
                return x.numerator
            raise UnsupportedFieldError(f"cannot coerce {x!r} into ZZ")
        # CCf
        if isinstance(x, (int, float, complex)):
            return complex(x)
        if isinstance(x, Fraction):
            return complex(x)
        raise UnsupportedFieldError(f"cannot coerce {x!r} into CCf")

    def add(self, a, b):
        return (a + b) % self.modulus if self.tag == "Zp" else a + b

    def mul(self, a, b):
        return (a * b) % self.modulus if self.tag == "Zp" else a * b

    def neg(self, a):
        return (-a) % self.modulus if self.tag == "Zp" else -a

    def inv(self, a):
        if self.tag == "Zp":
            return pow(a, -1, self.modulus)
        if self.tag == "QQ":
            return Fraction(1) / a
        if self.tag == "CCf":
            return 1.0 / a
        raise UnsupportedFieldError("ZZ is not a field")

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)


QQ = CoefficientField("QQ")
ZZ = CoefficientField("ZZ")
CCF = CoefficientField("CCf")


def Zp(p: int) -> CoefficientField:
    return CoefficientField("Zp", p)


_FIELD_TAGS = {"QQ": QQ, "ZZ": ZZ, "CCf": CCF}
ORDERS = ("lex", "grlex", "grevlex")


@dataclass(frozen=True)
class PolynomialRing:
    variables: tuple
    field: CoefficientField
    order: str = "grevlex"

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"unknown monomial order {self.order!r}")
        seen = set()
        for v in self.variables:
            if not isinstance(v, str) or not _VAR_NAME.match(v):
                raise ValueError(f"bad variable name {v!r}")
            if v in seen:
                raise ValueError(f"duplicate variable {v!r}")
            seen.add(v)
        object.__setattr__(self, "variables", tuple(self.variables))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def var_index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    def sort_key(self, mono: Monomial):
        """Monotone key: bigger key = greater monomial in this ring's order."""
        return monomial_key(self.order, mono)

    def describe(self) -> str:
        field = self.field.tag if self.field.tag != "Zp" else f"Zp({self.field.modulus})"
        return f"{field}[{','.join(self.variables)}] {self.order}"


def ring_new(variables, coefring, order: str = "grevlex") -> PolynomialRing:
    """Construct a ring from plain tags (`"QQ"`, `"ZZ"`, `("Zp", p)` or a field)."""
    if isinstance(coefring, CoefficientField):
        field = coefring
    elif isinstance(coefring, str):
        if coefring in _FIELD_TAGS:
            field = _FIELD_TAGS[coefring]
        else:
            raise UnsupportedFieldError(f"unknown coefficient tag {coefring!r}")
    elif isinstance(coefring, tuple) and len(coefring) == 2 and coefring[0] == "Zp":
        field = Zp(coefring[1])
    else:
        raise UnsupportedFieldError(f"unknown coefficient tag {coefring!r}")
    return PolynomialRing(tuple(variables), field, order)


# ---------------------------------------------------------------------------
# monomials


def monomial_key(order: str, mono: Monomial):
    if order == "lex":
        return mono
    total = sum(mono)
    if order == "grlex":
        return (total, mono)
    if order == "grevlex":
        return (total, tuple(-e for e in reversed(mono)))
    raise ValueError(f"unknown monomial order {order!r}")


def monomial_cmp(order: str, a: Monomial, b: Monomial) -> int:
    """-1, 0 or 1 as `a` is less than, equal to, or greater than `b`."""
    if len(a) != len(b):
        raise ValueError("exponent vectors of different length")
    ka, kb = monomial_key(order, a), monomial_key(order, b)
    return (ka > kb) - (ka < kb)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_degree(a: Monomial) -> int:
    return sum(a)


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Polynomial:
    ring: PolynomialRing
    terms: tuple  # ((coeff, mono), ...) strictly descending in the ring order

    @classmethod
    def from_dict(cls, ring: PolynomialRing, coeffs: dict) -> "Polynomial":
        terms = [(c, m) for m, c in coeffs.items() if c != 0]
        terms.sort(key=lambda t: ring.sort_key(t[1]), reverse=True)
        return cls(ring, tuple(terms))

    @classmethod
    def zero(cls, ring: PolynomialRing) -> "Polynomial":
        return cls(ring, ())

    @classmethod
    def const(cls, ring: PolynomialRing, value) -> "Polynomial":
        c = ring.field.coerce(value)
        if c == 0:
            return cls(ring, ())
        return cls(ring, ((c, (0,) * ring.nvars),))

    @classmethod
    def variable(cls, ring: PolynomialRing, name: str) -> "Polynomial":
        i = ring.var_index(name)
        mono = tuple(1 if j == i else 0 for j in range(ring.nvars))
        return cls(ring, ((ring.field.one(), mono),))

    # -- predicates and accessors ------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or mono_degree(self.terms[0][1]) == 0

    def constant_value(self):
        if not self.terms:
            return self.ring.field.zero()
        if not self.is_constant():
            raise ValueError("not a constant polynomial")
        return self.terms[0][0]

    def leading(self) -> tuple:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0]

    def leading_monomial(self) -> Monomial:
        return self.leading()[1]

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(mono_degree(m) for _, m in self.terms)

    def degree_in(self, name: str) -> int:
        i = self.ring.var_index(name)
        return max((m[i] for _, m in self.terms), default=0)

    # -- arithmetic ----------------------------------------------------------

    def _check_ring(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingMismatchError(
                f"operands in different rings: {self.ring.describe()} vs {other.ring.describe()}")

    def _coerce_operand(self, other):
        if isinstance(other, Polynomial):
            self._check_ring(other)
            return other
        if isinstance(other, (int, Fraction, float, complex)):
            return Polynomial.const(self.ring, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        field = self.ring.field
        acc = {m: c for c, m in self.terms}
        for c, m in other.terms:
            s = field.add(acc.get(m, field.zero()), c)
            if s == 0:
                acc.pop(m, None)
            else:
                acc[m] = s
        return Polynomial.from_dict(self.ring, acc)

    __radd__ = __add__

    def __neg__(self):
        field = self.ring.field
        return Polynomial(self.ring, tuple((field.neg(c), m) for c, m in self.terms))

    def __sub__(self, other):
        other = self._coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        field = self.ring.field
        acc: dict = {}
        for c1, m1 in self.terms:
            for c2, m2 in other.terms:
                m = mono_mul(m1, m2)
                s = field.add(acc.get(m, field.zero()), field.mul(c1, c2))
                if s == 0:
                    acc.pop(m, None)
                else:
                    acc[m] = s
        return Polynomial.from_dict(self.ring, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.const(self.ring, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        c = self.ring.field.coerce(c)
        if c == 0:
            return Polynomial.zero(self.ring)
        field = self.ring.field
        return Polynomial(self.ring, tuple((field.mul(c, coeff), m) for coeff, m in self.terms))

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.terms[0][0]))

    def term_poly(self, c, m) -> "Polynomial":
        """Single-term polynomial c*x^m in this ring."""
        if c == 0:
            return Polynomial.zero(self.ring)
        return Polynomial(self.ring, ((c, m),))

    def __str__(self):
        return to_text(self)


# ---------------------------------------------------------------------------
# variable queries, substitution, evaluation


def vars_of(f: Polynomial) -> set:
    """Variables appearing with a nonzero exponent somewhere in f."""
    out = set()
    for _, m in f.terms:
        for i, e in enumerate(m):
            if e:
                out.add(f.ring.variables[i])
    return out


def is_univariate(f: Polynomial) -> bool:
    return len(vars_of(f)) <= 1


def substitute(f: Polynomial, var: str, value) -> Polynomial:
    """Plug `value` in for `var`; the result lives in the ring without it.

    An int/Fraction value keeps the coefficient field; a float or complex
    value promotes the result to approximate complex coefficients.
    """
    i = f.ring.var_index(var)
    approx = isinstance(value, (float, complex))
    field = CCF if (approx or f.ring.field.tag == "CCf") else f.ring.field
    new_vars = f.ring.variables[:i] + f.ring.variables[i + 1:]
    new_ring = PolynomialRing(new_vars, field, f.ring.order)
    val = field.coerce(value)
    acc: dict = {}
    for c, m in f.terms:
        e = m[i]
        new_m = m[:i] + m[i + 1:]
        c2 = field.coerce(c)
        if e:
            c2 = field.mul(c2, _field_pow(field, val, e))
        s = field.add(acc.get(new_m, field.zero()), c2)
        if s == 0:
            acc.pop(new_m, None)
        else:
            acc[new_m] = s
    return Polynomial.from_dict(new_ring, acc)


def _field_pow(field, val, e):
    if field.tag == "Zp":
        return pow(val, e, field.modulus)
    return val ** e


def evaluate(f: Polynomial, point: dict):
    """Evaluate f at a {name: value} point covering all its variables."""
    missing = vars_of(f) - set(point)
    if missing:
        raise UnknownVariableError(f"missing assignment for {sorted(missing)}")
    idx = [(f.ring.var_index(name), point[name]) for name in point if name in f.ring.variables]
    total = 0
    for c, m in f.terms:
        term = c
        for i, value in idx:
            e = m[i]
            if e:
                term = term * value ** e
        total = total + term
    return total


# ---------------------------------------------------------------------------
# text input and canonical output


def poly_parse_text(source: str, ring: PolynomialRing) -> Polynomial:
    """Parse human polynomial text against `ring`.

    Grammar: + - * ^, parentheses, integer and a/b rational literals, and
    implicit multiplication by juxtaposition ("x z", "2x", "(x-1) x (x+1)").
    """
    node = _expr.parse_expression(source, reals=False, juxt=True, calls="never")
    return cook_poly(node, ring)


def cook_poly(node, ring: PolynomialRing, resolve=None) -> Polynomial:
    """Evaluate an expression AST into a polynomial over `ring`.

    `resolve`, when given, maps an identifier to a replacement value
    (used by the session to let bindings shadow ring variables); it
    returns None to fall through to ring-variable lookup.
    """
    out = _cook(node, ring, resolve)
    if isinstance(out, Polynomial):
        return out
    return Polynomial.const(ring, out)


def _cook(node, ring, resolve):
    if isinstance(node, _expr.Num):
        if isinstance(node.value, float) and ring.field.exact:
            raise ExprSyntaxError("real literal in an exact ring", node.pos)
        return node.value
    if isinstance(node, _expr.Name):
        if resolve is not None:
            hit = resolve(node.ident)
            if hit is not None:
                return hit
        if node.ident in ring.variables:
            return Polynomial.variable(ring, node.ident)
        raise UnknownVariableError(f"unknown identifier {node.ident!r}")
    if isinstance(node, _expr.Neg):
        return -_as_poly(_cook(node.operand, ring, resolve), ring)
    if isinstance(node, _expr.Bin):
        if node.op == "^":
            base = _as_poly(_cook(node.left, ring, resolve), ring)
            exp = _cook(node.right, ring, resolve)
            if not isinstance(exp, int) or exp < 0:
                raise ExprSyntaxError("exponent must be a nonnegative integer", node.pos)
            return base ** exp
        left = _cook(node.left, ring, resolve)
        right = _cook(node.right, ring, resolve)
        if node.op == "/":
            if isinstance(left, int) and isinstance(right, int):
                if right == 0:
                    raise ZeroDivisionError("division by zero in coefficient")
                return Fraction(left, right)
            right_p = _as_poly(right, ring)
            if not right_p.is_constant() or right_p.is_zero():
                raise ExprSyntaxError("division only by a nonzero constant", node.pos)
            return _as_poly(left, ring).scale(ring.field.inv(right_p.constant_value()))
        left_p = _as_poly(left, ring)
        right_p = _as_poly(right, ring)
        if node.op == "+":
            return left_p + right_p
        if node.op == "-":
            return left_p - right_p
        if node.op == "*":
            return left_p * right_p
        raise ExprSyntaxError(f"operator {node.op!r} not allowed here", node.pos)
    if isinstance(node, _expr.Str):
        raise ExprSyntaxError("text literal inside a polynomial", node.pos)
    if isinstance(node, _expr.Call):
        raise ExprSyntaxError(f"call {node.tag!r} inside a polynomial", node.pos)
    raise ExprSyntaxError("not a polynomial expression", getattr(node, "pos", 0))


def _as_poly(x, ring):
    if isinstance(x, Polynomial):
        if x.ring != ring:
            raise RingMismatchError("mixed rings inside one expression")
        return x
    return Polynomial.const(ring, x)


def _coeff_text(c) -> str:
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def to_text(f: Polynomial) -> str:
    """Canonical text: terms descending, explicit `*` and `^`, no spaces."""
    if not f.terms:
        return "0"
    if f.ring.field.tag == "CCf":
        raise UnsupportedFieldError("approximate polynomials have no canonical text")
    chunks = []
    for c, m in f.terms:
        factors = [
            name if e == 1 else f"{name}^{e}"
            for name, e in zip(f.ring.variables, m)
            if e
        ]
        text = _coeff_text(c)
        if factors:
            body = "*".join(factors)
            if text == "1":
                text = body
            elif text == "-1":
                text = "-" + body
            else:
                text = f"{text}*{body}"
        chunks.append(text)
    out = chunks[0]
    for chunk in chunks[1:]:
        out += chunk if chunk.startswith("-") else "+" + chunk
    return out


def change_ring(f: Polynomial, new_ring: PolynomialRing) -> Polynomial:
    """Re-express f in `new_ring` (matching variables by name)."""
    used = vars_of(f)
    if not used <= set(new_ring.variables):
        missing = sorted(used - set(new_ring.variables))
        raise UnknownVariableError(f"target ring lacks variables {missing}")
    positions = []
    for i, name in enumerate(f.ring.variables):
        positions.append(new_ring.variables.index(name) if name in new_ring.variables else None)
    acc: dict = {}
    for c, m in f.terms:
        new_m = [0] * new_ring.nvars
        for i, e in enumerate(m):
            if e:
                new_m[positions[i]] = e
        acc[tuple(new_m)] = new_ring.field.coerce(c)
    return Polynomial.from_dict(new_ring, acc)
