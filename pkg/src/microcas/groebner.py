"""Multivariate division, S-polynomials and Buchberger's algorithm.

Only field coefficients (QQ, Zp) are admitted.  The returned bases are
reduced and monic, which makes them the unique canonical representative
of their ideal for the ring's monomial order.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import RingMismatchError, UnsupportedFieldError
from .poly import (
    Polynomial,
    PolynomialRing,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
)


@dataclass(frozen=True)
class GroebnerBasis:
    ring: PolynomialRing
    generators: tuple
    reduced: bool = True


def _require_field(ring: PolynomialRing):
    if ring.field.tag not in ("QQ", "Zp"):
        raise UnsupportedFieldError(
            f"basis computation needs QQ or Zp coefficients, not {ring.field.tag}")


def reduce(f: Polynomial, divisors) -> Polynomial:
    """Remainder of f on division by the sequence `divisors`.

    Deterministic: at each step the current term is tried against the
    divisors in sequence order; the first whose leading monomial divides
    it is used.  No term of the remainder is divisible by any divisor's
    leading monomial.
    """
    divisors = [g for g in divisors if not g.is_zero()]
    if divisors:
        _require_field(f.ring)
    for g in divisors:
        if g.ring != f.ring:
            raise RingMismatchError("divisor in a different ring")
    field = f.ring.field
    leads = [(g.terms[0][0], g.terms[0][1], g) for g in divisors]
    remainder: dict = {}
    work = f
    while not work.is_zero():
        c, m = work.terms[0]
        for lc, lm, g in leads:
            if mono_divides(lm, m):
                factor = field.mul(c, field.inv(lc))
                shift = mono_div(m, lm)
                work = work - g.term_poly(factor, shift) * g
                break
        else:
            remainder[m] = c
            work = Polynomial(work.ring, work.terms[1:])
    return Polynomial.from_dict(f.ring, remainder)


def s_poly(f: Polynomial, g: Polynomial) -> Polynomial:
    """Cancellation combination of the leading terms of f and g."""
    if f.ring != g.ring:
        raise RingMismatchError("operands in different rings")
    if f.is_zero() or g.is_zero():
        raise ValueError("s_poly of a zero polynomial")
    field = f.ring.field
    cf, mf = f.terms[0]
    cg, mg = g.terms[0]
    lcm = mono_lcm(mf, mg)
    left = f.term_poly(field.inv(cf), mono_div(lcm, mf)) * f
    right = g.term_poly(field.inv(cg), mono_div(lcm, mg)) * g
    return left - right


def buchberger(gens, ring: PolynomialRing) -> GroebnerBasis:
    """Reduced, monic basis of the ideal generated by `gens`.

    Normal selection strategy (pairs by ascending lcm of leading
    monomials in the ring order) with the coprime-lead criterion; the
    final basis is minimalized, interreduced and sorted descending by
    leading monomial.  All-zero input yields the zero ideal's empty basis.
    """
    gens = [g for g in gens if not g.is_zero()]
    for g in gens:
        if g.ring != ring:
            raise RingMismatchError("generator in a different ring")
    if not gens:
        return GroebnerBasis(ring, (), True)
    _require_field(ring)

    basis: list[Polynomial] = []
    pairs: set = set()
    for g in gens:
        _add_to_basis(basis, pairs, g.monic())

    key = ring.sort_key
    while pairs:
        i, j = min(pairs, key=lambda p: (key(mono_lcm(basis[p[0]].terms[0][1],
                                                      basis[p[1]].terms[0][1])), p))
        pairs.discard((i, j))
        f, g = basis[i], basis[j]
        mf, mg = f.terms[0][1], g.terms[0][1]
        if mono_lcm(mf, mg) == mono_mul(mf, mg):
            continue  # coprime leads: S-polynomial reduces to zero
        r = reduce(s_poly(f, g), basis)
        if not r.is_zero():
            _add_to_basis(basis, pairs, r.monic())

    reduced = _interreduce(_minimalize(basis, key), key)
    return GroebnerBasis(ring, tuple(reduced), True)


def _add_to_basis(basis, pairs, f):
    basis.append(f)
    n = len(basis) - 1
    for i in range(n):
        pairs.add((i, n))


def _minimalize(basis, key):
    out = []
    for f in sorted(basis, key=lambda g: key(g.terms[0][1])):
        if not any(mono_divides(g.terms[0][1], f.terms[0][1]) for g in out):
            out.append(f)
    return out


def _interreduce(basis, key):
    out = []
    for i, f in enumerate(basis):
        others = basis[:i] + basis[i + 1:]
        r = reduce(f, others)
        if not r.is_zero():
            out.append(r.monic())
    out.sort(key=lambda g: key(g.terms[0][1]), reverse=True)
    return out


def ideal_member(f: Polynomial, gb: GroebnerBasis) -> bool:
    """Membership test against a reduced basis."""
    if f.ring != gb.ring:
        raise RingMismatchError("polynomial and basis in different rings")
    return reduce(f, gb.generators).is_zero()
