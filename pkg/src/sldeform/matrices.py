"""Dense n by n matrices over a Ring, plus elementary and signed permutation
matrices.
"""

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .rings import Ring


class NotInvertibleError(ValueError):
    pass


class Mat:
    """An immutable square matrix with entries stored row-major as ring codes."""

    def __init__(self, ring: Ring, n: int, entries: Iterable[int]):
        entries = tuple(entries)
        if n < 2:
            raise ValueError(f"matrices must have n >= 2, got {n}")
        if len(entries) != n * n:
            raise ValueError(f"expected {n * n} entries, got {len(entries)}")
        self.ring = ring
        self.n = n
        self.entries = entries

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Mat":
        return cls.scalar(ring, n, ring.one)

    @classmethod
    def scalar(cls, ring: Ring, n: int, value: int) -> "Mat":
        return cls(
            ring, n, (value if r == c else ring.zero for r in range(n) for c in range(n))
        )

    @classmethod
    def fromRows(cls, ring: Ring, rows: Sequence[Sequence[int]]) -> "Mat":
        return cls(ring, len(rows), (x for row in rows for x in row))

    @classmethod
    def fromArray(cls, ring: Ring, array: np.ndarray) -> "Mat":
        n = array.shape[0]
        return cls(ring, n, (int(x) for x in array.reshape(-1)))

    def __getitem__(self, index: tuple[int, int]) -> int:
        r, c = index
        return self.entries[r * self.n + c]

    def rows(self) -> list[tuple[int, ...]]:
        n = self.n
        return [self.entries[r * n : (r + 1) * n] for r in range(n)]

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (
            self.n == other.n and self.ring == other.ring and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.n, self.entries))

    def __repr__(self):
        return f"Mat({self.ring.key}, {formatMat(self)})"

    def _checkCompatible(self, other: "Mat"):
        if self.n != other.n or self.ring != other.ring:
            raise ValueError("matrices must share ring and dimension")

    def __matmul__(self, other: "Mat") -> "Mat":
        self._checkCompatible(other)
        ring, n = self.ring, self.n
        add, mul = ring.add, ring.mul
        a, b = self.entries, other.entries
        result = []
        for r in range(n):
            row = a[r * n : (r + 1) * n]
            for c in range(n):
                acc = ring.zero
                for k in range(n):
                    acc = add(acc, mul(row[k], b[k * n + c]))
                result.append(acc)
        return Mat(ring, n, result)

    def __add__(self, other: "Mat") -> "Mat":
        self._checkCompatible(other)
        return Mat(
            self.ring, self.n, (self.ring.add(x, y) for x, y in zip(self.entries, other.entries))
        )

    def __sub__(self, other: "Mat") -> "Mat":
        self._checkCompatible(other)
        return Mat(
            self.ring, self.n, (self.ring.sub(x, y) for x, y in zip(self.entries, other.entries))
        )

    def scaled(self, value: int) -> "Mat":
        return Mat(self.ring, self.n, (self.ring.mul(value, x) for x in self.entries))

    def map(self, table: Sequence[int], ring: Ring) -> "Mat":
        """Apply an entrywise map given as a code table into another ring."""
        return Mat(ring, self.n, (table[x] for x in self.entries))

    def trace(self) -> int:
        acc = self.ring.zero
        for r in range(self.n):
            acc = self.ring.add(acc, self[r, r])
        return acc

    @cached_property
    def key(self) -> bytes:
        return bytes(self.entries) if self.ring.size <= 256 else repr(self.entries).encode()

    def toArray(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.uint8).reshape(self.n, self.n)

    # determinant and inverse

    def det(self) -> int:
        """Unit-pivot elimination, falling back to cofactor expansion when a
        column of the remaining block has no unit.
        """
        ring, n = self.ring, self.n
        rows = [list(row) for row in self.rows()]
        det = ring.one
        for c in range(n):
            pivot = next((r for r in range(c, n) if ring.isUnit(rows[r][c])), None)
            if pivot is None:
                block = [row[c:] for row in rows[c:]]
                return ring.mul(det, _cofactorDet(ring, block))
            if pivot != c:
                rows[c], rows[pivot] = rows[pivot], rows[c]
                det = ring.neg(det)
            pivotValue = rows[c][c]
            det = ring.mul(det, pivotValue)
            pivotInverse = ring.inv(pivotValue)
            for r in range(c + 1, n):
                factor = ring.mul(rows[r][c], pivotInverse)
                if factor:
                    rows[r] = [
                        ring.sub(x, ring.mul(factor, y)) for x, y in zip(rows[r], rows[c])
                    ]
        return det

    def cofactorDet(self) -> int:
        return _cofactorDet(self.ring, [list(row) for row in self.rows()])

    @cached_property
    def _inverse(self) -> "Mat":
        ring, n = self.ring, self.n
        rows = [list(row) + [ring.one if r == c else ring.zero for c in range(n)]
                for r, row in enumerate(self.rows())]
        for c in range(n):
            pivot = next((r for r in range(c, n) if ring.isUnit(rows[r][c])), None)
            if pivot is None:
                raise NotInvertibleError(f"matrix is not invertible: {formatMat(self)}")
            rows[c], rows[pivot] = rows[pivot], rows[c]
            pivotInverse = ring.inv(rows[c][c])
            rows[c] = [ring.mul(pivotInverse, x) for x in rows[c]]
            for r in range(n):
                factor = rows[r][c]
                if r != c and factor:
                    rows[r] = [
                        ring.sub(x, ring.mul(factor, y)) for x, y in zip(rows[r], rows[c])
                    ]
        return Mat(ring, n, (x for row in rows for x in row[n:]))

    def inverse(self) -> "Mat":
        return self._inverse

    def isInvertible(self) -> bool:
        return self.ring.isUnit(self.det())


def _cofactorDet(ring: Ring, rows: list[list[int]]) -> int:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return ring.sub(
            ring.mul(rows[0][0], rows[1][1]), ring.mul(rows[0][1], rows[1][0])
        )
    acc = ring.zero
    for c in range(n):
        entry = rows[0][c]
        if not entry:
            continue
        minor = [row[:c] + row[c + 1 :] for row in rows[1:]]
        term = ring.mul(entry, _cofactorDet(ring, minor))
        acc = ring.add(acc, term) if c % 2 == 0 else ring.sub(acc, term)
    return acc


def commutator(a: Mat, b: Mat) -> Mat:
    return a @ b @ a.inverse() @ b.inverse()


def batchMatmul(ring: Ring, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Products of stacked code matrices, broadcasting over leading axes.
    Needs the ring's operation tables.
    """
    if ring.mulTable is None:
        raise ValueError(f"{ring.key} is too large for table arithmetic")
    terms = ring.mulTable[a[..., :, :, None], b[..., None, :, :]]
    acc = terms[..., 0, :]
    for k in range(1, terms.shape[-2]):
        acc = ring.addTable[acc, terms[..., k, :]]
    return acc


# distinguished matrices, 1-based indices as in E_ij(x)


@dataclass(frozen=True)
class ElemMove:
    i: int
    j: int
    x: int

    def __post_init__(self):
        if self.i == self.j:
            raise ValueError(f"elementary move needs i != j, got ({self.i}, {self.j})")

    def realize(self, ring: Ring, n: int) -> Mat:
        return elementary(ring, n, self.i, self.j, self.x)

    def describe(self, ring: Ring) -> list:
        return [self.i, self.j, ring.format(self.x)]


def _checkIndex(n: int, *indices: int):
    for index in indices:
        if not 1 <= index <= n:
            raise IndexError(f"index {index} out of range 1..{n}")


def elementary(ring: Ring, n: int, i: int, j: int, x: int) -> Mat:
    _checkIndex(n, i, j)
    if i == j:
        raise ValueError(f"E_ij needs i != j, got ({i}, {j})")
    entries = list(Mat.identity(ring, n).entries)
    entries[(i - 1) * n + (j - 1)] = x
    return Mat(ring, n, entries)


def multiplyWord(ring: Ring, n: int, word: Sequence[ElemMove]) -> Mat:
    result = Mat.identity(ring, n)
    for move in word:
        result = result @ move.realize(ring, n)
    return result


def transposition(ring: Ring, n: int, r: int, s: int) -> Mat:
    """The permutation matrix (rs): the identity with rows r and s swapped."""
    _checkIndex(n, r, s)
    rows = [list(row) for row in Mat.identity(ring, n).rows()]
    rows[r - 1], rows[s - 1] = rows[s - 1], rows[r - 1]
    return Mat.fromRows(ring, rows)


def signMatrix(ring: Ring, n: int, r: int) -> Mat:
    """D_r: the identity with -1 in position (r, r)."""
    _checkIndex(n, r)
    entries = list(Mat.identity(ring, n).entries)
    entries[(r - 1) * n + (r - 1)] = ring.minusOne
    return Mat(ring, n, entries)


@dataclass(frozen=True)
class SignedPerm:
    """A product of transposition matrices (rs) and sign matrices D_r, written
    as a sequence of factors like ("D", 2), ("T", 1, n), multiplied left to right.
    """

    n: int
    factors: tuple[tuple, ...]

    def realize(self, ring: Ring) -> Mat:
        result = Mat.identity(ring, self.n)
        for factor in self.factors:
            if factor[0] == "D":
                result = result @ signMatrix(ring, self.n, factor[1])
            else:
                result = result @ transposition(ring, self.n, factor[1], factor[2])
        return result

    def describe(self) -> str:
        parts = []
        for factor in self.factors:
            if factor[0] == "D":
                parts.append(f"D{factor[1]}")
            else:
                parts.append(f"({factor[1]}{factor[2]})")
        return "".join(parts) or "I"


def tijFactors(i: int, j: int, n: int) -> SignedPerm:
    _checkIndex(n, i, j)
    if i == j:
        raise ValueError(f"T_ij needs i != j, got ({i}, {j})")
    if (i, j) == (1, n):
        factors: tuple = ()
    elif (i, j) == (n, 1):
        factors = (("D", 2), ("T", 1, n))
    elif i == 1:
        factors = (("D", n), ("T", j, n))
    elif j == n:
        factors = (("D", 1), ("T", 1, i))
    elif j == 1:
        # (1i)(nj) read so that 1 -> i and n -> j; here the two transpositions
        # overlap in 1, and (1i) must act first
        factors = (("T", n, 1), ("T", 1, i))
    else:
        factors = (("T", 1, i), ("T", n, j))
    return SignedPerm(n, factors)


def buildTij(i: int, j: int, n: int, ring: Ring) -> Mat:
    return tijFactors(i, j, n).realize(ring)


# text form


def formatMat(mat: Mat) -> str:
    rows = [[json.loads(mat.ring.format(x)) for x in row] for row in mat.rows()]
    return json.dumps(rows, separators=(",", ":"))


def matToData(mat: Mat) -> list:
    return [[mat.ring.format(x) for x in row] for row in mat.rows()]


def parseMat(text: str, ring: Ring) -> Mat:
    rows = json.loads(text)
    if not rows or any(len(row) != len(rows) for row in rows):
        raise ValueError(f"expected a square matrix, got {text!r}")
    return Mat.fromRows(
        ring, [[ring.parse(json.dumps(x)) for x in row] for row in rows]
    )
