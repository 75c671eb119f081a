"""Smith normal form and integer factorization."""

import random
from fractions import Fraction

import pytest

from microcas.intalg import (
    Factorization,
    IntMatrix,
    det,
    factor_n,
    is_probable_prime,
    snf,
)


def rational_rank(m: IntMatrix) -> int:
    """Independent rank oracle: Gauss elimination over Fraction."""
    a = [[Fraction(x) for x in row] for row in m.row_lists()]
    rank = 0
    col = 0
    while rank < m.rows and col < m.cols:
        pivot = next((i for i in range(rank, m.rows) if a[i][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        for i in range(m.rows):
            if i != rank and a[i][col] != 0:
                f = a[i][col] / a[rank][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
        col += 1
    return rank


class TestSnf:
    def test_worked_example(self):
        m = IntMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
        res = snf(m)
        assert res.D.row_lists() == [[12, 0, 0], [0, 6, 0], [0, 0, 2]]
        assert (res.P @ m) @ res.Q == res.D
        assert abs(det(res.P)) == 1
        assert abs(det(res.Q)) == 1

    def test_identity(self):
        m = IntMatrix.identity(3)
        res = snf(m)
        assert res.D == m
        assert abs(det(res.P)) == 1 and abs(det(res.Q)) == 1

    def test_random_reconstruction(self):
        rng = random.Random(17)
        for _ in range(200):
            rows = rng.randint(1, 4)
            cols = rng.randint(1, 4)
            m = IntMatrix.from_rows(
                [[rng.randint(-50, 50) for _ in range(cols)] for _ in range(rows)])
            res = snf(m)
            assert (res.P @ m) @ res.Q == res.D
            assert res.D.is_diagonal()
            assert abs(det(res.P)) == 1
            assert abs(det(res.Q)) == 1
            diag = [res.D.at(i, i) for i in range(min(rows, cols))]
            nonzero = [d for d in diag if d]
            assert diag[len(nonzero):] == [0] * (len(diag) - len(nonzero))
            assert all(d > 0 for d in nonzero)
            for prev, nxt in zip(nonzero, nonzero[1:]):
                assert prev % nxt == 0  # descending divisibility
            assert len(nonzero) == rational_rank(m)

    def test_rectangular(self):
        m = IntMatrix.from_rows([[2, 4, 6]])
        res = snf(m)
        assert (res.P @ m) @ res.Q == res.D
        assert res.D.at(0, 0) == 2


class TestFactorN:
    def test_worked_example(self):
        f = factor_n(174636000)
        assert f.primes == (2, 3, 5, 7, 11)
        assert f.powers == (5, 4, 3, 2, 1)

    def test_one(self):
        assert factor_n(1) == Factorization((), ())

    def test_mersenne_prime(self):
        import sympy
        n = 2147483647
        assert sympy.isprime(n)  # independent primality oracle
        assert is_probable_prime(n)
        assert factor_n(n) == Factorization((n,), (1,))

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            factor_n(0)
        with pytest.raises(ValueError):
            factor_n(-12)

    def test_round_trip_random(self):
        rng = random.Random(23)
        for _ in range(500):
            n = rng.randint(2, 10**12)
            f = factor_n(n)
            prod = 1
            for p, k in zip(f.primes, f.powers):
                prod *= p ** k
            assert prod == n
            assert list(f.primes) == sorted(set(f.primes))
            assert all(k >= 1 for k in f.powers)

    def test_against_sympy_oracle(self):
        import sympy
        rng = random.Random(29)
        for _ in range(25):
            n = rng.randint(2, 10**9)
            f = factor_n(n)
            assert dict(zip(f.primes, f.powers)) == sympy.factorint(n)
