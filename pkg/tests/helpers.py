"""Shared random generators for the property suites."""

from fractions import Fraction

from microcas.poly import Polynomial, PolynomialRing, QQ, Zp, ring_new


def random_monomial(rng, nvars, max_deg):
    total = rng.randint(0, max_deg)
    mono = [0] * nvars
    for _ in range(total):
        mono[rng.randrange(nvars)] += 1
    return tuple(mono)


def random_poly(rng, ring, max_terms=4, max_deg=3, zero_ok=False):
    coeffs = {}
    for _ in range(rng.randint(1, max_terms)):
        m = random_monomial(rng, ring.nvars, max_deg)
        c = ring.field.coerce(rng.randint(-5, 5))
        coeffs[m] = ring.field.add(coeffs.get(m, ring.field.zero()), c)
    p = Polynomial.from_dict(ring, coeffs)
    if p.is_zero() and not zero_ok:
        return Polynomial.const(ring, rng.randint(1, 5))
    return p


def random_ring(rng, max_vars=3, fields=("QQ",)):
    nvars = rng.randint(1, max_vars)
    names = tuple("abcxyz"[i] for i in range(nvars))
    order = rng.choice(["lex", "grlex", "grevlex"])
    tag = rng.choice(list(fields))
    field = QQ if tag == "QQ" else Zp(32003)
    return PolynomialRing(names, field, order)


def random_wire_value(rng, depth=0):
    """Serializable value tree, canonical by construction (depth <= 4)."""
    scalar_picks = ("int", "bigint", "rat", "real", "bool", "null", "text")
    deep_picks = scalar_picks + ("list", "poly", "ideal", "ring", "matrix")
    kind = rng.choice(scalar_picks if depth >= 4 else deep_picks)
    if kind == "int":
        return rng.randint(-10**6, 10**6)
    if kind == "bigint":
        return rng.randint(10**20, 10**30) * rng.choice([-1, 1])
    if kind == "rat":
        num = rng.randint(-999, 999)
        den = rng.randint(2, 999)
        f = Fraction(num, den)
        return f if f.denominator > 1 else f + Fraction(1, 7)
    if kind == "real":
        mantissa = rng.uniform(-100, 100)
        return mantissa * 10 ** rng.randint(-12, 12)
    if kind == "bool":
        return rng.choice([True, False])
    if kind == "null":
        return None
    if kind == "text":
        alphabet = 'abc "\\\n xyz09'
        return "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12)))
    if kind == "list":
        return [random_wire_value(rng, depth + 1) for _ in range(rng.randint(0, 4))]
    if kind == "ring":
        return random_ring(rng, fields=("QQ", "Zp"))
    if kind == "poly":
        ring = random_ring(rng, fields=("QQ", "Zp"))
        return random_poly(rng, ring, zero_ok=True)
    if kind == "ideal":
        from microcas.ideals import Ideal

        ring = random_ring(rng, fields=("QQ", "Zp"))
        gens = tuple(random_poly(rng, ring) for _ in range(rng.randint(0, 3)))
        return Ideal(ring, gens)
    if kind == "matrix":
        from microcas.intalg import IntMatrix

        rows = rng.randint(1, 3)
        cols = rng.randint(1, 3)
        return IntMatrix.from_rows(
            [[rng.randint(-99, 99) for _ in range(cols)] for _ in range(rows)])
    raise AssertionError(kind)


def qq_ring(*names, order="grevlex"):
    return ring_new(names, "QQ", order)
