"""Ideal type and ideal-level operations.

Sum, product, equality, elimination, quotient, saturation, a restricted
radical, Krull dimension and primary decomposition of squarefree monomial
ideals.  Intersections run through the classic one-auxiliary-variable
construction; elimination runs through a lex basis with the dropped
variables ranked greatest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    InternalError,
    RingMismatchError,
    UnknownVariableError,
    UnsupportedIdealShapeError,
)
from .groebner import GroebnerBasis, buchberger, ideal_member, reduce
from .poly import (
    Polynomial,
    PolynomialRing,
    change_ring,
    is_univariate,
    mono_degree,
    to_text,
    vars_of,
)

SATURATION_CAP = 64


@dataclass(frozen=True)
class Ideal:
    ring: PolynomialRing
    generators: tuple
    _gb: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self):
        gens = tuple(g for g in self.generators if not g.is_zero())
        for g in gens:
            if g.ring != self.ring:
                raise RingMismatchError("generator outside the ideal's ring")
        object.__setattr__(self, "generators", gens)

    def groebner(self) -> GroebnerBasis:
        """Reduced basis, computed once and cached."""
        if not self._gb:
            self._gb.append(buchberger(self.generators, self.ring))
        return self._gb[0]

    def contains(self, f: Polynomial) -> bool:
        return ideal_member(f, self.groebner())

    def is_zero(self) -> bool:
        return not self.groebner().generators


@dataclass(frozen=True)
class IdealList:
    items: tuple

    def __post_init__(self):
        if not self.items:
            raise ValueError("empty ideal list")
        ring = self.items[0].ring
        if any(i.ring != ring for i in self.items):
            raise RingMismatchError("ideal list spans several rings")


def ideal_new(ring: PolynomialRing, gens) -> Ideal:
    return Ideal(ring, tuple(gens))


def _check_rings(i: Ideal, j: Ideal):
    if i.ring != j.ring:
        raise RingMismatchError("ideals in different rings")


def ideal_sum(i: Ideal, j: Ideal) -> Ideal:
    _check_rings(i, j)
    return Ideal(i.ring, i.generators + j.generators)


def ideal_product(i: Ideal, j: Ideal) -> Ideal:
    _check_rings(i, j)
    gens = tuple(f * g for f in i.generators for g in j.generators)
    return Ideal(i.ring, gens)


def ideal_equals(i: Ideal, j: Ideal) -> bool:
    _check_rings(i, j)
    return i.groebner().generators == j.groebner().generators


# ---------------------------------------------------------------------------
# elimination and intersection


def eliminate(i: Ideal, drop) -> Ideal:
    """Generators of the contraction to the sub-ring without `drop`."""
    drop = set(drop)
    unknown = drop - set(i.ring.variables)
    if unknown:
        raise UnknownVariableError(f"cannot eliminate unknown variables {sorted(unknown)}")
    keep = tuple(v for v in i.ring.variables if v not in drop)
    target = PolynomialRing(keep, i.ring.field, i.ring.order)
    if not drop:
        return i
    return _eliminate_into(i.ring, i.generators, drop, target)


def _eliminate_into(ring, gens, drop, target) -> Ideal:
    """Shared elimination core: lex basis with dropped variables greatest."""
    ordered = tuple(v for v in ring.variables if v in drop) + target.variables
    elim_ring = PolynomialRing(ordered, ring.field, "lex")
    basis = buchberger([change_ring(g, elim_ring) for g in gens], elim_ring)
    kept = [g for g in basis.generators if not (vars_of(g) & drop)]
    return Ideal(target, tuple(change_ring(g, target) for g in kept))


def _fresh_aux_name(ring: PolynomialRing) -> str:
    k = 0
    while f"w{k}" in ring.variables:
        k += 1
    return f"w{k}"


def intersect(i: Ideal, j: Ideal) -> Ideal:
    """I ∩ J via the auxiliary-variable construction <t*I, (1-t)*J>."""
    _check_rings(i, j)
    ring = i.ring
    aux = _fresh_aux_name(ring)
    ext = PolynomialRing((aux,) + ring.variables, ring.field, "lex")
    t = Polynomial.variable(ext, aux)
    one = Polynomial.const(ext, 1)
    gens = [t * change_ring(g, ext) for g in i.generators]
    gens += [(one - t) * change_ring(g, ext) for g in j.generators]
    return _eliminate_into(ext, gens, {aux}, ring)


# ---------------------------------------------------------------------------
# quotient and saturation


def _exact_divide(g: Polynomial, f: Polynomial) -> Polynomial:
    """g / f for f dividing g; tracked through the division algorithm."""
    ring = g.ring
    field = ring.field
    from .poly import mono_div, mono_divides  # local names for the hot loop

    quotient: dict = {}
    work = g
    lc, lm = f.terms[0]
    while not work.is_zero():
        c, m = work.terms[0]
        if not mono_divides(lm, m):
            raise InternalError("exact division left a remainder")
        factor = field.mul(c, field.inv(lc))
        shift = mono_div(m, lm)
        quotient[shift] = field.add(quotient.get(shift, field.zero()), factor)
        work = work - f.term_poly(factor, shift) * f
    return Polynomial.from_dict(ring, quotient)


def quotient(i: Ideal, j: Ideal) -> Ideal:
    """Ideal quotient I : J (all f with f*J inside I)."""
    _check_rings(i, j)
    if not j.generators:
        raise ValueError("quotient by the zero ideal")
    result = None
    for f in j.generators:
        meet = intersect(i, Ideal(i.ring, (f,)))
        single = Ideal(i.ring, tuple(_exact_divide(g, f) for g in meet.generators))
        result = single if result is None else intersect(result, single)
    return result


def saturate(i: Ideal, j: Ideal) -> Ideal:
    """Stable limit I : J^inf of iterated quotients."""
    current = i
    for _ in range(SATURATION_CAP):
        step = quotient(current, j)
        if ideal_equals(step, current):
            return current
        current = step
    raise InternalError("saturation failed to stabilize")


# ---------------------------------------------------------------------------
# radical (restricted shapes)


def _is_monomial_ideal(i: Ideal) -> bool:
    return bool(i.generators) and all(len(g.terms) == 1 for g in i.generators)


def _squarefree_monomial(g: Polynomial) -> Polynomial:
    _, m = g.terms[0]
    return Polynomial(g.ring, ((g.ring.field.one(), tuple(1 if e else 0 for e in m)),))


def _derivative(f: Polynomial, name: str) -> Polynomial:
    i = f.ring.var_index(name)
    acc: dict = {}
    field = f.ring.field
    for c, m in f.terms:
        if m[i]:
            new_m = m[:i] + (m[i] - 1,) + m[i + 1:]
            acc[new_m] = field.add(acc.get(new_m, field.zero()), field.mul(c, field.coerce(m[i])))
    return Polynomial.from_dict(f.ring, acc)


def _univariate_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while not b.is_zero():
        a, b = b, reduce(a, [b])
    return a.monic() if not a.is_zero() else a


def _squarefree_part(f: Polynomial) -> Polynomial:
    names = vars_of(f)
    if not names:
        return f.monic()
    (name,) = names
    g = _univariate_gcd(f, _derivative(f, name))
    if g.is_constant():
        return f.monic()
    return _exact_divide(f, g).monic()


def radical(i: Ideal) -> Ideal:
    """Radical for the supported shapes.

    Supported inputs: (a) monomial ideals, (b) a principal ideal with a
    univariate generator, (c) zero-dimensional ideals over QQ or Zp
    (per-variable eliminants, squarefree parts adjoined, then a fresh
    basis).  Anything else raises UnsupportedIdealShapeError.
    """
    if _is_monomial_ideal(i):
        return Ideal(i.ring, tuple(_squarefree_monomial(g) for g in i.generators))
    if len(i.generators) == 1 and is_univariate(i.generators[0]):
        return Ideal(i.ring, (_squarefree_part(i.generators[0]),))
    if i.ring.field.tag in ("QQ", "Zp") and i.generators and dimension(i) <= 0:
        gens = list(i.generators)
        for v in i.ring.variables:
            others = set(i.ring.variables) - {v}
            eliminant = eliminate(i, others)
            if eliminant.generators:
                uni = _squarefree_part(eliminant.generators[0])
                gens.append(change_ring(uni, i.ring))
        basis = buchberger(gens, i.ring)
        out = Ideal(i.ring, basis.generators)
        out._gb.append(basis)
        return out
    raise UnsupportedIdealShapeError(
        "radical supports monomial ideals, principal univariate ideals, "
        "and zero-dimensional ideals over QQ or Zp")


def is_radical(i: Ideal) -> bool:
    return ideal_equals(i, radical(i))


# ---------------------------------------------------------------------------
# dimension


def dimension(i: Ideal) -> int:
    """Krull dimension of ring/I.

    Combinatorial rule on the leading monomials L of the reduced basis:
    the dimension is the largest size of a variable set S such that no
    monomial of L has its support inside S; equivalently nvars minus a
    minimum hitting set of the supports.  Unit ideal: -1.  Zero ideal:
    the variable count.
    """
    basis = i.groebner()
    gens = basis.generators
    if not gens:
        return i.ring.nvars
    supports = []
    for g in gens:
        support = frozenset(k for k, e in enumerate(g.terms[0][1]) if e)
        if not support:
            return -1  # a unit leads the basis
        supports.append(support)
    minimal = [s for s in set(supports)
               if not any(t < s for t in set(supports))]
    return i.ring.nvars - _min_hitting_set(minimal)


def _min_hitting_set(supports) -> int:
    if not supports:
        return 0
    best = len({v for s in supports for v in s})

    def search(remaining, chosen):
        nonlocal best
        if chosen >= best:
            return
        if not remaining:
            best = chosen
            return
        pivot = min(remaining, key=len)
        for v in sorted(pivot):
            rest = [s for s in remaining if v not in s]
            search(rest, chosen + 1)

    search(supports, 0)
    return best


# ---------------------------------------------------------------------------
# primary decomposition of squarefree monomial ideals


def primary_decomposition(i: Ideal) -> IdealList:
    """Minimal primes of a squarefree monomial ideal.

    Recursive splitting on a composite generator m = v*m': the variety
    splits into the v = 0 part and the m' = 0 part.  Components are
    deduplicated, non-minimal ones dropped, and the list ordered by
    descending component dimension, then generator text.
    """
    for g in i.generators:
        if len(g.terms) != 1:
            raise UnsupportedIdealShapeError("generators must be monomials")
        m = g.terms[0][1]
        if mono_degree(m) == 0:
            raise UnsupportedIdealShapeError("constant generator (unit ideal)")
        if any(e > 1 for e in m):
            raise UnsupportedIdealShapeError("generators must be squarefree")
    if not i.generators:
        raise UnsupportedIdealShapeError("zero ideal has no monomial decomposition")

    supports = {frozenset(k for k, e in enumerate(g.terms[0][1]) if e)
                for g in i.generators}
    components = _split(frozenset(supports))
    minimal = sorted(
        (s for s in components if not any(t < s for t in components)),
        key=lambda s: (len(s), sorted(s)),
    )

    ring = i.ring
    ideals = []
    for s in minimal:
        gens = tuple(Polynomial.variable(ring, ring.variables[k]) for k in sorted(s))
        ideals.append(Ideal(ring, gens))
    ideals.sort(key=lambda j: (len(j.generators), tuple(to_text(g) for g in j.generators)))
    return IdealList(tuple(ideals))


def _split(supports: frozenset) -> set:
    # drop generators that are multiples of another generator
    supports = {s for s in supports if not any(t < s for t in supports)}
    composite = sorted((s for s in supports if len(s) > 1),
                       key=lambda s: (len(s), sorted(s)))
    if not composite:
        return {frozenset(v for s in supports for v in s)}
    m = composite[0]
    v = min(m)
    rest = frozenset(m - {v})
    others = frozenset(supports - {m})
    return _split(others | {frozenset({v})}) | _split(others | {rest})
