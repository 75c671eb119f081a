"""Integer linear algebra and integer factorization.

Everything here runs on Python's arbitrary-precision integers; the
intermediate entries of a normal-form computation routinely outgrow any
fixed machine width even for tiny inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InternalError


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple  # row-major

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError("matrix dimensions must be positive")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match dimensions")

    @classmethod
    def from_rows(cls, rows) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged rows")
        flat = tuple(int(x) for r in rows for x in r)
        return cls(len(rows), width, flat)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row_lists(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        a, b = self.row_lists(), other.row_lists()
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                out.append(sum(a[i][k] * b[k][j] for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def is_diagonal(self) -> bool:
        return all(self.at(i, j) == 0 for i in range(self.rows) for j in range(self.cols) if i != j)


@dataclass(frozen=True)
class SnfResult:
    P: IntMatrix
    D: IntMatrix
    Q: IntMatrix


@dataclass(frozen=True)
class Factorization:
    primes: tuple
    powers: tuple


def det(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    a = m.row_lists()
    n = m.rows
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


class _SnfWork:
    """Mutable state for the normal-form elimination."""

    def __init__(self, m: IntMatrix):
        self.a = m.row_lists()
        self.rows = m.rows
        self.cols = m.cols
        self.p = IntMatrix.identity(m.rows).row_lists()
        self.q = IntMatrix.identity(m.cols).row_lists()

    # row operations mirror into P (left transform), column operations into Q.

    def swap_rows(self, i, j):
        if i != j:
            self.a[i], self.a[j] = self.a[j], self.a[i]
            self.p[i], self.p[j] = self.p[j], self.p[i]

    def swap_cols(self, i, j):
        if i != j:
            for row in self.a:
                row[i], row[j] = row[j], row[i]
            for row in self.q:
                row[i], row[j] = row[j], row[i]

    def add_row(self, dst, src, factor):
        if factor:
            self.a[dst] = [x + factor * y for x, y in zip(self.a[dst], self.a[src])]
            self.p[dst] = [x + factor * y for x, y in zip(self.p[dst], self.p[src])]

    def add_col(self, dst, src, factor):
        if factor:
            for row in self.a:
                row[dst] += factor * row[src]
            for row in self.q:
                row[dst] += factor * row[src]

    def negate_row(self, i):
        self.a[i] = [-x for x in self.a[i]]
        self.p[i] = [-x for x in self.p[i]]


def snf(m: IntMatrix) -> SnfResult:
    """Diagonalize an integer matrix as D = P*M*Q with unimodular P, Q.

    Classic elimination: pull the smallest nonzero entry of the trailing
    block into the pivot slot, clear its row and column by exact division
    steps, then enforce that the pivot divides the whole trailing block.
    The nonzero diagonal entries come out positive and are ordered so that
    each divides the one before it.
    """
    w = _SnfWork(m)
    a = w.a
    limit = min(w.rows, w.cols)
    for t in range(limit):
        if not _move_pivot(w, t):
            break  # trailing block is zero
        while True:
            _clear_cross(w, t)
            offender = _find_nondivisible(w, t)
            if offender is None:
                break
            # folding the offending row into row t shrinks the pivot
            w.add_row(t, offender, 1)
        if a[t][t] < 0:
            w.negate_row(t)

    # descending divisibility: reverse the nonzero diagonal block
    nonzero = sum(1 for t in range(limit) if a[t][t] != 0)
    for i in range(nonzero // 2):
        j = nonzero - 1 - i
        w.swap_rows(i, j)
        w.swap_cols(i, j)

    d = IntMatrix.from_rows(a)
    p = IntMatrix.from_rows(w.p)
    q = IntMatrix.from_rows(w.q)
    if (p @ m) @ q != d:
        raise InternalError("normal form reconstruction failed")
    return SnfResult(P=p, D=d, Q=q)


def _move_pivot(w, t):
    """Swap the absolutely smallest nonzero entry of a[t:,t:] to (t,t)."""
    best = None
    for i in range(t, w.rows):
        for j in range(t, w.cols):
            v = w.a[i][j]
            if v != 0 and (best is None or abs(v) < abs(w.a[best[0]][best[1]])):
                best = (i, j)
    if best is None:
        return False
    w.swap_rows(t, best[0])
    w.swap_cols(t, best[1])
    return True


def _clear_cross(w, t):
    """Zero out column t below and row t right of the pivot."""
    a = w.a
    while True:
        # column sweep; a nonzero remainder becomes the new, smaller pivot
        restart = False
        for i in range(t + 1, w.rows):
            if a[i][t] != 0:
                q = a[i][t] // a[t][t]
                w.add_row(i, t, -q)
                if a[i][t] != 0:
                    w.swap_rows(t, i)
                    restart = True
                    break
        if restart:
            continue
        for j in range(t + 1, w.cols):
            if a[t][j] != 0:
                q = a[t][j] // a[t][t]
                w.add_col(j, t, -q)
                if a[t][j] != 0:
                    w.swap_cols(t, j)
                    restart = True
                    break
        if restart:
            continue
        return


def _find_nondivisible(w, t):
    d = w.a[t][t]
    for i in range(t + 1, w.rows):
        for j in range(t + 1, w.cols):
            if w.a[i][j] % d != 0:
                return i
    return None


# ---------------------------------------------------------------------------
# integer factorization

_TRIAL_LIMIT = 10_000
_small_primes: list[int] = []

# deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10**24
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _sieve() -> list[int]:
    global _small_primes
    if not _small_primes:
        flags = bytearray([1]) * (_TRIAL_LIMIT + 1)
        flags[0] = flags[1] = 0
        for i in range(2, int(_TRIAL_LIMIT ** 0.5) + 1):
            if flags[i]:
                flags[i * i::i] = bytearray(len(flags[i * i::i]))
        _small_primes = [i for i, f in enumerate(flags) if f]
    return _small_primes


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with a fixed witness set (deterministic below 3.3e24)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Brent-cycle rho; n must be odd, composite, and not a prime power pitfall-free."""
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise InternalError(f"rho failed to split {n}")


def factor_n(n: int) -> Factorization:
    """Prime decomposition of a positive integer.

    Trial division up to 10**4, then rho splitting with Miller-Rabin
    certification of the remaining cofactors.
    """
    if n <= 0:
        raise ValueError("factor_n requires a positive integer")
    if n == 1:
        return Factorization((), ())
    counts: dict[int, int] = {}
    for p in _sieve():
        if p * p > n:
            break
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    primes = tuple(sorted(counts))
    return Factorization(primes, tuple(counts[p] for p in primes))
