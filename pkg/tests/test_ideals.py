"""Ideal operations: sum/product/equality, elimination, quotient,
saturation, radical, dimension, primary decomposition."""

import itertools
import random

import pytest

from microcas.errors import RingMismatchError, UnsupportedIdealShapeError
from microcas.ideals import (
    Ideal,
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
from microcas.poly import Polynomial, poly_parse_text, to_text

from helpers import qq_ring, random_monomial

TXYZ = qq_ring("t", "x", "y", "z")


def make_ideal(ring, *sources):
    return ideal_new(ring, [poly_parse_text(s, ring) for s in sources])


def gen_texts(ideal):
    return [to_text(g) for g in ideal.generators]


class TestSumProductEquality:
    def test_sum(self):
        assert gen_texts(ideal_sum(make_ideal(TXYZ, "x", "y"),
                                   make_ideal(TXYZ, "z"))) == ["x", "y", "z"]

    def test_product(self):
        assert gen_texts(ideal_product(make_ideal(TXYZ, "x", "y"),
                                       make_ideal(TXYZ, "z"))) == ["x*z", "y*z"]

    def test_sum_with_empty(self):
        i = make_ideal(TXYZ, "x", "y")
        assert ideal_equals(ideal_sum(i, Ideal(TXYZ, ())), i)

    def test_equality_false(self):
        assert not ideal_equals(make_ideal(TXYZ, "x", "y"), make_ideal(TXYZ, "z"))

    def test_equality_reflexive(self):
        i = make_ideal(TXYZ, "x", "y")
        assert ideal_equals(i, i)

    def test_unit_ideal_equality(self):
        r = qq_ring("x")
        assert ideal_equals(make_ideal(r, "x - 1", "x + 1"), make_ideal(r, "1"))

    def test_equality_invariant_under_presentation(self):
        rng = random.Random(5)
        r = qq_ring("x", "y")
        from helpers import random_poly
        for _ in range(20):
            gens = [random_poly(rng, r) for _ in range(2)]
            i = Ideal(r, tuple(gens))
            shuffled = gens[:]
            rng.shuffle(shuffled)
            j = Ideal(r, tuple(g.scale(rng.choice([2, -1, 5])) for g in shuffled))
            assert ideal_equals(i, j)

    def test_ring_mismatch(self):
        with pytest.raises(RingMismatchError):
            ideal_sum(make_ideal(TXYZ, "x"), make_ideal(qq_ring("x"), "x"))


class TestEliminate:
    def test_twisted_cubic_t_free(self):
        i = make_ideal(TXYZ, "t^4 - x", "t^3 - y", "t^2 - z")
        out = eliminate(i, {"t"})
        assert out.ring.variables == ("x", "y", "z")
        zz = poly_parse_text("z^2 - x", out.ring)
        assert out.contains(zz)

    def test_empty_drop_is_identity(self):
        i = make_ideal(TXYZ, "x z", "y z")
        assert ideal_equals(eliminate(i, set()), i)

    def test_no_pure_y_combination(self):
        r = qq_ring("x", "y")
        out = eliminate(make_ideal(r, "x - y"), {"x"})
        assert out.ring.variables == ("y",)
        assert out.groebner().generators == ()
        y = Polynomial.variable(out.ring, "y")
        for k in range(1, 4):
            assert not out.contains(y ** k)

    def test_unknown_variable(self):
        from microcas.errors import UnknownVariableError
        with pytest.raises(UnknownVariableError):
            eliminate(make_ideal(TXYZ, "x"), {"q"})


class TestQuotientSaturate:
    def test_principal_quotient(self):
        r = qq_ring("x")
        out = quotient(make_ideal(r, "x^2"), make_ideal(r, "x"))
        assert ideal_equals(out, make_ideal(r, "x"))

    def test_quotient_by_unit(self):
        i = make_ideal(TXYZ, "x z", "y z")
        assert ideal_equals(quotient(i, make_ideal(TXYZ, "1")), i)

    def test_quotient_divisibility(self):
        out = quotient(make_ideal(TXYZ, "x z", "y z"), make_ideal(TXYZ, "z"))
        assert ideal_equals(out, make_ideal(TXYZ, "x", "y"))

    def test_saturation_removes_origin(self):
        r = qq_ring("x")
        out = saturate(make_ideal(r, "(x-1) x (x+1)"), make_ideal(r, "x"))
        assert ideal_equals(out, make_ideal(r, "x^2 - 1"))

    def test_saturate_by_unit(self):
        i = make_ideal(TXYZ, "x z")
        assert ideal_equals(saturate(i, make_ideal(TXYZ, "1")), i)

    def test_saturate_multiplicity(self):
        r = qq_ring("x", "y")
        out = saturate(make_ideal(r, "x^2 y"), make_ideal(r, "x"))
        assert ideal_equals(out, make_ideal(r, "y"))

    def test_zero_divisor_rejected(self):
        r = qq_ring("x")
        with pytest.raises(ValueError):
            quotient(make_ideal(r, "x"), Ideal(r, ()))

    def test_monotone_chain(self):
        r = qq_ring("x", "y")
        i = make_ideal(r, "x^2 y^2")
        j = make_ideal(r, "x")
        q = quotient(i, j)
        s = saturate(i, j)
        for g in i.generators:
            assert q.contains(g)
        for g in q.generators:
            assert s.contains(g)

    def test_intersection(self):
        r = qq_ring("x", "y")
        out = intersect(make_ideal(r, "x"), make_ideal(r, "y"))
        assert ideal_equals(out, make_ideal(r, "x y"))


class TestRadical:
    def test_principal_square(self):
        r = qq_ring("x")
        assert gen_texts(radical(make_ideal(r, "x^2"))) == ["x"]

    def test_variables_already_radical(self):
        i = make_ideal(TXYZ, "x", "y")
        assert is_radical(i)

    def test_monomial_squarefree_support(self):
        r = qq_ring("x", "y")
        assert gen_texts(radical(make_ideal(r, "x^2 y^3"))) == ["x*y"]

    def test_univariate_multiplicity(self):
        r = qq_ring("x")
        out = radical(make_ideal(r, "(x-1)^2 (x+2)^3"))
        assert ideal_equals(out, make_ideal(r, "(x-1) (x+2)"))

    def test_zero_dimensional(self):
        r = qq_ring("x", "y")
        out = radical(make_ideal(r, "x^2", "y^2 - x"))
        assert ideal_equals(out, make_ideal(r, "x", "y"))

    def test_unsupported_shape_reports(self):
        r = qq_ring("x", "y")
        # principal but multivariate, positive-dimensional
        with pytest.raises(UnsupportedIdealShapeError, match="monomial|principal|zero"):
            radical(make_ideal(r, "x y + x"))
        r3 = qq_ring("a", "b", "c")
        with pytest.raises(UnsupportedIdealShapeError):
            radical(make_ideal(r3, "a + b", "b c"))

    def test_idempotent(self):
        r = qq_ring("x", "y")
        for srcs in [("x^2 y",), ("x^3",), ("x^2", "y^2 - x")]:
            i = make_ideal(r, *srcs)
            once = radical(i)
            assert ideal_equals(radical(once), once)


class TestDimension:
    def test_paper_values(self):
        assert dimension(make_ideal(TXYZ, "z")) == 3
        assert dimension(make_ideal(TXYZ, "x", "y")) == 2

    def test_zero_ideal(self):
        assert dimension(Ideal(TXYZ, ())) == 4

    def test_unit_ideal(self):
        assert dimension(make_ideal(TXYZ, "1")) == -1

    def test_independence_model(self):
        r = qq_ring("p00", "p01", "p10", "p11")
        indep = make_ideal(
            r,
            "p00 - (p00 + p01) (p00 + p10)",
            "p01 - (p00 + p01) (p01 + p11)",
            "p10 - (p10 + p11) (p00 + p10)",
            "p11 - (p10 + p11) (p01 + p11)",
            "p00 + p01 + p10 + p11 - 1",
        )
        assert dimension(indep) == 2
        assert dimension(make_ideal(r, "p00 + p01 + p10 + p11 - 1")) == 3

    def test_matches_exhaustive_oracle(self):
        rng = random.Random(21)
        names = ("a", "b", "c", "x")
        r = qq_ring(*names)
        for _ in range(100):
            monos = []
            for _ in range(rng.randint(1, 4)):
                m = random_monomial(rng, 4, 3)
                monos.append(m)
            gens = tuple(Polynomial(r, ((r.field.one(), m),)) for m in monos
                         if sum(m) > 0)
            if not gens:
                continue
            i = Ideal(r, gens)
            # oracle: largest S over all 2^n subsets with no lead support inside S
            leads = [g.terms[0][1] for g in i.groebner().generators]
            best = -1
            for size in range(5):
                for keep in itertools.combinations(range(4), size):
                    s = set(keep)
                    if all(not {k for k, e in enumerate(m) if e} <= s for m in leads):
                        best = max(best, size)
            assert dimension(i) == best


class TestPrimaryDecomposition:
    def test_plane_and_axis(self):
        comps = primary_decomposition(make_ideal(TXYZ, "x z", "y z")).items
        assert [gen_texts(c) for c in comps] == [["z"], ["x", "y"]]
        assert [dimension(c) for c in comps] == [3, 2]

    def test_already_prime(self):
        comps = primary_decomposition(make_ideal(TXYZ, "x")).items
        assert [gen_texts(c) for c in comps] == [["x"]]

    def test_two_lines(self):
        r = qq_ring("x", "y")
        comps = primary_decomposition(make_ideal(r, "x y")).items
        assert [gen_texts(c) for c in comps] == [["x"], ["y"]]

    def test_non_squarefree_rejected(self):
        r = qq_ring("x", "y")
        with pytest.raises(UnsupportedIdealShapeError):
            primary_decomposition(make_ideal(r, "x^2 y"))
        with pytest.raises(UnsupportedIdealShapeError):
            primary_decomposition(make_ideal(r, "x + y"))

    def test_components_intersect_back(self):
        rng = random.Random(31)
        r = qq_ring("a", "b", "c")
        for _ in range(15):
            monos = set()
            for _ in range(rng.randint(1, 3)):
                m = tuple(rng.randint(0, 1) for _ in range(3))
                if sum(m):
                    monos.add(m)
            if not monos:
                continue
            gens = tuple(Polynomial(r, ((r.field.one(), m),)) for m in monos)
            i = Ideal(r, gens)
            comps = primary_decomposition(i).items
            meet = comps[0]
            for c in comps[1:]:
                meet = intersect(meet, c)
            assert ideal_equals(meet, i)
            for c in comps:
                from microcas.poly import mono_degree
                assert all(mono_degree(g.terms[0][1]) == 1 for g in c.generators)
