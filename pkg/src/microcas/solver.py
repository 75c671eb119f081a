"""Real-root extraction and the recursive zero-dimensional system solver.

Roots of a univariate polynomial are found by Aberth-Ehrlich simultaneous
iteration on the complex plane; real roots are the ones whose imaginary
part falls below the caller's tolerance.  Systems are solved from a lex
basis: solve the univariate eliminant in the least variable, plug each
root into the rest, recurse.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

from .errors import DimensionalityError, InternalError, UnsupportedFieldError
from .ideals import Ideal, dimension
from .groebner import buchberger
from .poly import (
    Polynomial,
    PolynomialRing,
    change_ring,
    is_univariate,
    substitute,
    vars_of,
)

_RESIDUAL_TARGET = 1e-14
_MAX_ITERATIONS = 200
DEFAULT_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SolutionSet:
    variable_order: tuple
    points: tuple  # row tuples of floats, one row per solution
    tolerance: float

    def __len__(self):
        return len(self.points)

    def as_dicts(self):
        return [dict(zip(self.variable_order, row)) for row in self.points]


def _coeff_list(f: Polynomial) -> tuple[str | None, list[complex]]:
    """Dense ascending coefficients of a univariate polynomial."""
    names = vars_of(f)
    if len(names) > 1:
        raise ValueError("polynomial is not univariate")
    if not names:
        return None, [complex(f.constant_value())]
    (name,) = names
    i = f.ring.var_index(name)
    degree = max(m[i] for _, m in f.terms)
    coeffs = [0j] * (degree + 1)
    for c, m in f.terms:
        coeffs[m[i]] += complex(c)
    return name, coeffs


def _poly_val(coeffs, z):
    """Horner evaluation returning (p(z), p'(z), sum |a_i| |z|^i)."""
    p = 0j
    dp = 0j
    scale = 0.0
    az = abs(z)
    for a in reversed(coeffs):
        dp = dp * z + p
        p = p * z + a
        scale = scale * az + abs(a)
    return p, dp, scale


def real_roots(f: Polynomial, tol: float) -> list[float]:
    """All real roots of a univariate polynomial, ascending.

    The full complex root set is located by Aberth-Ehrlich iteration
    started on a perturbed circle; a root counts as real when its
    imaginary part is below `tol` in magnitude.  Duplicates within `tol`
    collapse, so pick a tolerance at least as large as the expected root
    accuracy (multiple roots are only accurate to roughly eps^(1/m)).
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if f.is_zero():
        raise ValueError("zero polynomial has every number as a root")
    if f.ring.field.tag not in ("QQ", "CCf"):
        raise UnsupportedFieldError("real roots need rational or approximate coefficients")
    _, coeffs = _coeff_list(f)
    if f.ring.field.tag == "CCf":
        while len(coeffs) > 1 and abs(coeffs[-1]) < tol:
            coeffs.pop()
    if len(coeffs) <= 1:
        raise ValueError("constant polynomial has no roots")
    roots = _aberth(coeffs)
    reals = sorted(z.real for z in roots if abs(z.imag) < tol)
    out: list[float] = []
    for r in reals:
        if not out or abs(r - out[-1]) > tol:
            out.append(r)
    return out


def _aberth(coeffs: list[complex]) -> list[complex]:
    lead = coeffs[-1]
    monic = [a / lead for a in coeffs]
    n = len(monic) - 1
    radius = 1.0 + max(abs(a) for a in monic[:-1])
    z = [radius * cmath.exp(2j * cmath.pi * (k / n) + 0.4j) * (1 + 1e-6 * k)
         for k in range(n)]
    for _ in range(_MAX_ITERATIONS):
        converged = True
        for k in range(n):
            p, dp, scale = _poly_val(monic, z[k])
            if abs(p) <= _RESIDUAL_TARGET * max(scale, 1e-300):
                continue
            converged = False
            if dp == 0:
                z[k] += 1e-8 * (1 + abs(z[k]))
                continue
            newton = p / dp
            repulsion = sum(1 / (z[k] - z[j]) for j in range(n) if j != k)
            denom = 1 - newton * repulsion
            z[k] -= newton if denom == 0 else newton / denom
        if converged:
            return z
    raise InternalError("root iteration failed to converge")


def _near_zero(f: Polynomial, tol: float) -> bool:
    return all(abs(c) < tol for c, _ in f.terms)


def _residual_ok(f: Polynomial, root: float, tol: float) -> bool:
    name, coeffs = _coeff_list(f)
    if name is None:
        return abs(coeffs[0]) < tol
    p, _, scale = _poly_val(coeffs, complex(root))
    return abs(p) <= tol * max(scale, 1.0)


def solve_zero_dim(ideal: Ideal, tol: float = DEFAULT_TOLERANCE) -> SolutionSet:
    """All real solutions of a zero-dimensional system over QQ.

    A lex basis guarantees a univariate eliminant in the least variable;
    its real roots are substituted into the remaining generators (terms
    whose coefficients all fall below `tol` drop out) and the reduced
    systems recurse.  Columns report the first-solved variable first;
    rows come out sorted and deduplicated under `tol`.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if ideal.ring.field.tag != "QQ":
        raise UnsupportedFieldError("solver operates over QQ only")
    order = tuple(reversed(ideal.ring.variables))

    lex_ring = PolynomialRing(ideal.ring.variables, ideal.ring.field, "lex")
    basis = buchberger([change_ring(g, lex_ring) for g in ideal.generators], lex_ring)
    gens = basis.generators
    if len(gens) == 1 and gens[0].is_constant():
        return SolutionSet(order, (), tol)  # inconsistent system
    lex_ideal = Ideal(lex_ring, gens)
    lex_ideal._gb.append(basis)
    if not gens or dimension(lex_ideal) > 0:
        raise DimensionalityError("system is not zero-dimensional")

    assignments = _solve_rec(list(gens), tol)
    rows = set()
    for point in assignments:
        try:
            rows.add(tuple(point[v] for v in order))
        except KeyError as missing:
            raise InternalError(f"variable {missing} left unsolved") from None
    deduped: list[tuple] = []
    for row in sorted(rows):
        if not any(all(abs(a - b) <= tol for a, b in zip(row, kept)) for kept in deduped):
            deduped.append(row)
    return SolutionSet(order, tuple(deduped), tol)


def _solve_rec(system: list[Polynomial], tol: float) -> list[dict]:
    if not system:
        return [{}]
    if any(p.is_constant() and not _near_zero(p, tol) for p in system):
        return []  # inconsistent branch
    univariate = [p for p in system if is_univariate(p) and not p.is_constant()]
    if not univariate:
        raise DimensionalityError("no univariate polynomial at this level")

    # solve the least-ranked variable first; with several eliminants in the
    # same variable, take roots from the lowest degree one and keep only
    # roots consistent with the rest
    def var_rank(p):
        (name,) = vars_of(p)
        return p.ring.var_index(name)

    target_rank = max(var_rank(p) for p in univariate)
    candidates = sorted((p for p in univariate if var_rank(p) == target_rank),
                        key=lambda p: p.degree())
    primary = candidates[0]
    (name,) = vars_of(primary)

    roots = [r for r in real_roots(primary, tol)
             if all(_residual_ok(p, r, tol) for p in candidates[1:])]

    solutions = []
    for root in roots:
        rest = []
        for p in system:
            if p is primary:
                continue
            q = substitute(p, name, float(root)) if name in p.ring.variables else p
            if not _near_zero(q, tol):
                rest.append(q)
        for sub in _solve_rec(rest, tol):
            point = {name: float(root)}
            point.update(sub)
            solutions.append(point)
    return solutions
