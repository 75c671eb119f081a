"""Wire grammar: serializer, parser, registry dispatch, round trips."""

import random
from fractions import Fraction

import pytest

from microcas.errors import ExprSyntaxError, SerializeError
from microcas.groebner import GroebnerBasis
from microcas.ideals import Ideal, IdealList, ideal_new
from microcas.intalg import IntMatrix, SnfResult
from microcas.poly import CCF, Polynomial, PolynomialRing, poly_parse_text, ring_new
from microcas.solver import SolutionSet
from microcas.wirefmt import (
    ErrorValue,
    GenericNode,
    ParseRegistry,
    RefValue,
    default_registry,
    parse,
    register_handler,
    serialize,
    value_to_plain,
)

from helpers import qq_ring, random_wire_value


class TestSerialize:
    def test_scalars(self):
        assert serialize(2) == "2"
        assert serialize(-3) == "-3"
        assert serialize(Fraction(3, 4)) == "3/4"
        assert serialize(Fraction(2, 1)) == "2"
        assert serialize(1.2) == "1.2"
        assert serialize(True) == "true"
        assert serialize(False) == "false"
        assert serialize(None) == "null"
        assert serialize("a\"b\\c\nd") == '"a\\"b\\\\c\\nd"'

    def test_ideal_canonical_text(self):
        r = qq_ring("x")
        ideal = ideal_new(r, [poly_parse_text("x^2 - 1", r)])
        assert serialize(ideal) == "ideal(ring(QQ,[x],grevlex),[x^2-1])"

    def test_real_not_m2_style(self):
        # shortest round-tripping decimal, not an exponent-p encoding
        assert serialize(1.2) == "1.2"
        assert parse("1.2") == 1.2

    def test_rejects_ccf(self):
        ring = PolynomialRing(("x",), CCF, "grevlex")
        f = Polynomial.const(ring, 2.5 + 0j)
        with pytest.raises(SerializeError):
            serialize(f)

    def test_rejects_error_value(self):
        with pytest.raises(SerializeError):
            serialize(ErrorValue(1, "nope"))

    def test_no_whitespace(self):
        r = ring_new(["t", "x"], ("Zp", 7), "lex")
        ideal = ideal_new(r, [poly_parse_text("3 t x - 2", r)])
        text = serialize(IdealList((ideal,)))
        assert " " not in text


class TestParse:
    def test_integer(self):
        assert parse("2") == 2

    def test_whitespace_tolerated(self):
        r = qq_ring("x")
        ideal = ideal_new(r, [poly_parse_text("x^2 - 1", r)])
        spaced = "ideal( ring( QQ , [ x ] , grevlex ) , [ x^2 - 1 ] )"
        assert parse(spaced) == ideal

    def test_ideal_list_shape(self):
        text = ("idealList(ring(QQ,[t,x,y,z],grevlex),"
                "[ideal(ring(QQ,[t,x,y,z],grevlex),[z]),"
                "ideal(ring(QQ,[t,x,y,z],grevlex),[x,y])])")
        value = parse(text)
        assert isinstance(value, IdealList)
        assert len(value.items) == 2
        assert serialize(value) == text

    def test_syntax_error_offset_and_hint(self):
        with pytest.raises(ExprSyntaxError) as info:
            parse("[1, 2")
        assert info.value.offset == 5
        assert info.value.expected

    def test_totality_on_garbage(self):
        rng = random.Random(3)
        alphabet = "ring([])x,1.5\"\\+-*/^ ideal"
        for _ in range(300):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 20)))
            try:
                parse(text)
            except ExprSyntaxError:
                pass  # structured failure is the contract

    def test_matrix_forms(self):
        m = parse("matrix(ring(ZZ,[],grevlex),[[1,-2],[3,4]])")
        assert isinstance(m, IntMatrix)
        assert m.row_lists() == [[1, -2], [3, 4]]
        pm = parse("matrix(ring(QQ,[x],grevlex),[[x+1,0],[2,x^2]])")
        assert pm.rows[0][0] == poly_parse_text("x+1", qq_ring("x"))

    def test_gb_and_ref(self):
        g = parse("gb(ring(QQ,[x],grevlex),[x])")
        assert isinstance(g, GroebnerBasis) and g.reduced
        ref = parse('ref("o3","gb")')
        assert ref == RefValue("o3", "gb")


class TestRegistry:
    def test_snf_handler_registration(self):
        reg = ParseRegistry()
        text = ("snf(matrix(ring(ZZ,[],grevlex),[[1]]),"
                "matrix(ring(ZZ,[],grevlex),[[2]]),"
                "matrix(ring(ZZ,[],grevlex),[[3]]))")
        structured = parse(text, reg)
        assert isinstance(structured, SnfResult)
        assert structured.D.at(0, 0) == 2

    def test_unknown_tag_generic_node(self):
        value = parse("widget(1,2)")
        assert value == GenericNode("widget", (1, 2))
        assert serialize(value) == "widget(1,2)"

    def test_shadowing_with_counter(self):
        reg = default_registry()
        seen = []
        original = reg.lookup("ideal")

        def counting(args, ctx):
            seen.append(1)
            return original(args, ctx)

        reg2 = register_handler(reg, "ideal", counting)
        r = qq_ring("x")
        ideal = ideal_new(r, [poly_parse_text("x^2", r)])
        assert parse(serialize(ideal), reg2) == ideal
        assert len(seen) == 1
        # the original registry is untouched
        assert reg.lookup("ideal") is original

    def test_empty_tag_rejected(self):
        with pytest.raises(ValueError):
            default_registry().register("", lambda a, c: None)


class TestRoundTrip:
    def test_random_values(self):
        rng = random.Random(2024)
        for _ in range(500):
            value = random_wire_value(rng)
            text = serialize(value)
            back = parse(text)
            assert back == value, text
            assert serialize(back) == text  # canonicality

    def test_solution_set(self):
        sols = SolutionSet(("z", "y"), ((1.5, -0.25), (2.0, 0.0)), 1e-08)
        text = serialize(sols)
        assert parse(text) == sols


class TestPlainDump:
    def test_big_integers_ride_as_strings(self):
        dump = value_to_plain(10**30)
        assert dump == {"t": "int", "v": str(10**30)}

    def test_poly_terms(self):
        r = qq_ring("x", "y")
        dump = value_to_plain(poly_parse_text("3/4 x^2 - y", r))
        assert dump["t"] == "poly"
        assert dump["terms"][0] == [{"t": "rat", "num": "3", "den": "4"}, [2, 0]]
        assert dump["terms"][1] == [{"t": "int", "v": "-1"}, [0, 1]]
