"""Exact linear algebra over GF(p) and integer Smith normal form.

Vectors over GF(2) are packed into Python ints (bit ``i`` is coordinate
``i``); the generic small-prime path works on lists of residues.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class InfiniteCokernelError(ValueError):
    """The relation matrix does not present a finite abelian group."""


@dataclass(frozen=True)
class MatGFp:
    p: int
    rows: tuple[tuple[int, ...], ...]
    ncols: int

    def __post_init__(self):
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged matrix")
            if any(not 0 <= x < self.p for x in r):
                raise ValueError(f"entry out of range for GF({self.p})")

    @classmethod
    def from_rows(cls, p: int, rows: Iterable[Sequence[int]], ncols: int | None = None) -> "MatGFp":
        rows = [tuple(int(x) % p for x in r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(p, tuple(rows), ncols)

    @classmethod
    def identity(cls, p: int, n: int) -> "MatGFp":
        return cls(p, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def zero(cls, p: int, nrows: int, ncols: int) -> "MatGFp":
        return cls(p, tuple((0,) * ncols for _ in range(nrows)), ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def __matmul__(self, other: "MatGFp") -> "MatGFp":
        if self.ncols != other.nrows or self.p != other.p:
            raise ValueError("shape mismatch")
        p = self.p
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        out = [
            tuple(sum(a * b for a, b in zip(r, c)) % p for c in cols) if other.nrows else (0,) * other.ncols
            for r in self.rows
        ]
        return MatGFp(p, tuple(out), other.ncols)


# --- GF(2) bit-packed kernels -------------------------------------------------


def lowbit(v: int) -> int:
    return (v & -v).bit_length() - 1


def rref_bits(rows: Iterable[int]) -> list[int]:
    """Reduced echelon basis of the span of ``rows``.

    Pivot of a row is its lowest set bit. The returned list is in
    pivot-descending order, which makes it a canonical key for the span.
    """
    basis: dict[int, int] = {}
    for v in rows:
        for piv, b in basis.items():
            if v >> piv & 1:
                v ^= b
        if not v:
            continue
        piv = lowbit(v)
        for q in list(basis):
            if basis[q] >> piv & 1:
                basis[q] ^= v
        basis[piv] = v
    return [basis[q] for q in sorted(basis, reverse=True)]


def reduce_bits(v: int, basis: Sequence[int]) -> int:
    """Reduce ``v`` modulo the span of an RREF basis (from :func:`rref_bits`)."""
    for b in basis:
        if v >> lowbit(b) & 1:
            v ^= b
    return v


def mat_vec_bits(v: int, mat: Sequence[int]) -> int:
    """Row vector ``v`` times the matrix whose rows are ``mat``."""
    out = 0
    i = 0
    while v:
        if v & 1:
            out ^= mat[i]
        v >>= 1
        i += 1
    return out


def bits_to_list(v: int, n: int) -> list[int]:
    return [v >> i & 1 for i in range(n)]


def list_to_bits(xs: Iterable[int]) -> int:
    out = 0
    for i, x in enumerate(xs):
        if x % 2:
            out |= 1 << i
    return out


# --- generic GF(p) ------------------------------------------------------------


def rref(M: MatGFp) -> tuple[MatGFp, list[int], int]:
    """Reduced row echelon form; returns (matrix, pivot columns, rank).

    Zero rows end up at the bottom; the shape is kept.
    """
    p = M.p
    A = [list(r) for r in M.rows]
    pivots: list[int] = []
    r = 0
    for c in range(M.ncols):
        sel = next((i for i in range(r, len(A)) if A[i][c]), None)
        if sel is None:
            continue
        A[r], A[sel] = A[sel], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return MatGFp(p, tuple(tuple(row) for row in A), M.ncols), pivots, len(pivots)


def rank(M: MatGFp) -> int:
    return rref(M)[2]


def nullspace(M: MatGFp) -> MatGFp:
    """Basis (as rows) of the right kernel {v : M v^T = 0}."""
    p = M.p
    R, pivots, rk = rref(M)
    free = [c for c in range(M.ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * M.ncols
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = -R.rows[i][f] % p
        basis.append(tuple(v))
    return MatGFp(p, tuple(basis), M.ncols)


def row_space_contains(M: MatGFp, v: Sequence[int]) -> bool:
    before = rank(M)
    return rank(MatGFp.from_rows(M.p, list(M.rows) + [v], M.ncols)) == before


def canonical_subspace(M: MatGFp) -> MatGFp:
    """RREF basis of the row space, nonzero rows only, pivot-descending."""
    R, pivots, rk = rref(M)
    rows = list(R.rows[:rk])
    rows.reverse()
    return MatGFp(M.p, tuple(rows), M.ncols)


def gaussian_binomial(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def enumerate_subspaces(n: int, k: int, p: int = 2) -> list[MatGFp]:
    """All subspaces of GF(p)^n of codimension ``k``, canonical form.

    Built from RREF pivot patterns: choose the pivot set, then fill the free
    entries to the right of each pivot that are not themselves pivot columns.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    dim = n - k
    out = []
    for pivots in itertools.combinations(range(n), dim):
        slots = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for fill in itertools.product(range(p), repeat=len(slots)):
            rows = [[0] * n for _ in range(dim)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, c), x in zip(slots, fill):
                rows[i][c] = x
            rows.reverse()
            out.append(MatGFp(p, tuple(tuple(r) for r in rows), n))
    return out


def iter_subspaces_bits(n: int, dim: int) -> Iterator[tuple[int, ...]]:
    """GF(2) subspaces of dimension ``dim`` in GF(2)^n as canonical bit bases."""
    for pivots in itertools.combinations(range(n), dim):
        pset = set(pivots)
        slots = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pset]
        for fill in range(1 << len(slots)):
            rows = [1 << pc for pc in pivots]
            for j, (i, c) in enumerate(slots):
                if fill >> j & 1:
                    rows[i] |= 1 << c
            yield tuple(reversed(rows))


# --- integers -----------------------------------------------------------------


def smith_diagonal(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Nonzero elementary divisors of an integer matrix, in divisibility order.

    Pivoting picks the entry of least absolute value in the active block.
    """
    A = [list(map(int, r)) for r in rows if any(r)]
    m = len(A)
    n = ncols
    diag: list[int] = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = A[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // piv
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // piv
                    for row in A:
                        row[j] -= q * row[t]
                    if A[t][j]:
                        dirty = True
            if not dirty:
                # divisibility fix-up: pivot must divide the rest of the block
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv),
                    None,
                )
                if bad is None:
                    break
                A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
                continue
            # re-pivot on the smallest remaining entry of row/column t
            cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
            cand += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
            _, i, j = min(cand)
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


@dataclass(frozen=True, order=True)
class AbelianInvariants:
    """Cyclic orders of a finite abelian p-group, ascending (e.g. ``[2,4,16]``)."""

    orders: tuple[int, ...]

    def __post_init__(self):
        if any(o <= 1 for o in self.orders):
            raise ValueError("orders must exceed 1")
        if list(self.orders) != sorted(self.orders):
            raise ValueError("orders must be ascending")

    @classmethod
    def of(cls, orders: Iterable[int]) -> "AbelianInvariants":
        return cls(tuple(sorted(int(o) for o in orders if o != 1)))

    @property
    def order(self) -> int:
        out = 1
        for o in self.orders:
            out *= o
        return out

    @property
    def rank(self) -> int:
        return len(self.orders)

    def __len__(self):
        return len(self.orders)

    def __iter__(self):
        return iter(self.orders)

    def __str__(self):
        return "[" + ",".join(map(str, self.orders)) + "]"

    __repr__ = __str__

    @classmethod
    def parse(cls, text: str) -> "AbelianInvariants":
        body = text.strip().strip("[]").strip()
        return cls.of(int(x) for x in body.split(",") if x.strip()) if body else cls(())


def _p_part(x: int, p: int) -> int:
    out = 1
    while x % p == 0:
        x //= p
        out *= p
    return out


def smith_invariants(rows: Sequence[Sequence[int]], ncols: int, p: int) -> AbelianInvariants:
    """Invariants of the p-part of Z^ncols / rowspan(rows)."""
    diag = smith_diagonal(rows, ncols)
    if len(diag) < ncols:
        raise InfiniteCokernelError(f"relation matrix has rank {len(diag)} < {ncols}")
    return AbelianInvariants.of(_p_part(d, p) for d in diag)


def is_quotient(a: AbelianInvariants, b: AbelianInvariants) -> bool:
    """True iff an abelian p-group with invariants ``a`` is an image of one with ``b``."""
    if len(a) > len(b):
        return False
    xs = sorted(a.orders, reverse=True)
    ys = sorted(b.orders, reverse=True)
    xs += [1] * (len(ys) - len(xs))
    return all(y % x == 0 for x, y in zip(xs, ys))


# --- vector-space helpers used by the descendant machinery ---------------------


class GF2Space:
    """GF(2)^dim with vectors packed into ints."""

    p = 2

    def __init__(self, dim: int):
        self.dim = dim

    zero = 0

    def unit(self, i: int) -> int:
        return 1 << i

    def add(self, a: int, b: int) -> int:
        return a ^ b

    def scale(self, a: int, c: int) -> int:
        return a if c & 1 else 0

    def coord(self, v: int, i: int) -> int:
        return v >> i & 1

    def from_list(self, xs: Sequence[int]) -> int:
        return list_to_bits(xs)

    def to_list(self, v: int) -> list[int]:
        return bits_to_list(v, self.dim)

    def echelon(self, rows: Iterable[int]) -> tuple[int, ...]:
        return tuple(rref_bits(rows))

    def reduce(self, v: int, basis: Sequence[int]) -> int:
        return reduce_bits(v, basis)

    def pivot(self, v: int) -> int:
        return lowbit(v)

    def matvec(self, v: int, mat: Sequence[int]) -> int:
        return mat_vec_bits(v, mat)

    def all_vectors(self, basis: Sequence[int]) -> Iterator[int]:
        for mask in range(1 << len(basis)):
            v = 0
            for i, b in enumerate(basis):
                if mask >> i & 1:
                    v ^= b
            yield v


class GFpSpace:
    """GF(p)^dim with vectors as tuples; the unoptimized generic path."""

    def __init__(self, dim: int, p: int):
        self.dim = dim
        self.p = p
        self.zero = (0,) * dim

    def unit(self, i: int) -> tuple:
        return tuple(int(j == i) for j in range(self.dim))

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def scale(self, a, c):
        p = self.p
        return tuple(x * c % p for x in a)

    def coord(self, v, i):
        return v[i]

    def from_list(self, xs):
        return tuple(int(x) % self.p for x in xs)

    def to_list(self, v):
        return list(v)

    def echelon(self, rows):
        rows = list(rows)
        if not rows:
            return ()
        return canonical_subspace(MatGFp.from_rows(self.p, rows, self.dim)).rows

    def reduce(self, v, basis):
        for b in basis:
            piv = self.pivot(b)
            c = v[piv]
            if c:
                v = self.add(v, self.scale(b, self.p - c))
        return v

    def pivot(self, v) -> int:
        for i, x in enumerate(v):
            if x:
                return i
        return -1

    def matvec(self, v, mat):
        out = self.zero
        for c, row in zip(v, mat):
            if c:
                out = self.add(out, self.scale(row, c))
        return out

    def all_vectors(self, basis):
        for coeffs in itertools.product(range(self.p), repeat=len(basis)):
            v = self.zero
            for c, b in zip(coeffs, basis):
                if c:
                    v = self.add(v, self.scale(b, c))
            yield v


def vector_space(dim: int, p: int):
    return GF2Space(dim) if p == 2 else GFpSpace(dim, p)
