"""Computer algebra microkernel with a socket session protocol.

Library surface: exact polynomial arithmetic (`poly`), Groebner bases
(`groebner`), ideal operations (`ideals`), integer linear algebra and
factorization (`intalg`), a zero-dimensional solver (`solver`), the
canonical wire format (`wirefmt`), and the session/worker, gateway and
client layers (`session`, `gateway`, `client`, `repl`).
"""

from .client import Client, ClientConn, RemoteRef, connect, connect_via_gateway, start_local
from .errors import CasError
from .groebner import GroebnerBasis, buchberger, ideal_member, reduce, s_poly
from .ideals import (
    Ideal,
    IdealList,
    dimension,
    eliminate,
    ideal_equals,
    ideal_new,
    ideal_product,
    ideal_sum,
    intersect,
    is_radical,
    primary_decomposition,
    quotient,
    radical,
    saturate,
)
from .intalg import Factorization, IntMatrix, SnfResult, factor_n, snf
from .poly import (
    CoefficientField,
    Polynomial,
    PolynomialRing,
    evaluate,
    is_univariate,
    monomial_cmp,
    poly_parse_text,
    ring_new,
    substitute,
    to_text,
    vars_of,
)
from .solver import SolutionSet, real_roots, solve_zero_dim
from .wirefmt import ParseRegistry, default_registry, parse, register_handler, serialize

__version__ = "0.1.0"

__all__ = [
    "CasError",
    "Client",
    "ClientConn",
    "CoefficientField",
    "Factorization",
    "GroebnerBasis",
    "Ideal",
    "IdealList",
    "IntMatrix",
    "ParseRegistry",
    "Polynomial",
    "PolynomialRing",
    "RemoteRef",
    "SnfResult",
    "SolutionSet",
    "buchberger",
    "connect",
    "connect_via_gateway",
    "default_registry",
    "dimension",
    "eliminate",
    "evaluate",
    "factor_n",
    "ideal_equals",
    "ideal_member",
    "ideal_new",
    "ideal_product",
    "ideal_sum",
    "intersect",
    "is_radical",
    "is_univariate",
    "monomial_cmp",
    "parse",
    "poly_parse_text",
    "primary_decomposition",
    "quotient",
    "radical",
    "real_roots",
    "reduce",
    "register_handler",
    "ring_new",
    "s_poly",
    "saturate",
    "serialize",
    "snf",
    "solve_zero_dim",
    "start_local",
    "substitute",
    "to_text",
    "vars_of",
]
