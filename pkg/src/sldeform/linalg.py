"""Linear algebra over F_p on numpy integer arrays.

Row vectors throughout: a system is a 2-d array whose rows are equations, and
an augmented system carries the constant term in its last column.
"""

import numpy as np


def inverseTable(p: int) -> np.ndarray:
    table = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        table[x] = pow(x, -1, p)
    return table


def rref(matrix, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    a = np.array(matrix, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {a.shape}")
    numRows, numCols = a.shape
    inv = inverseTable(p)
    pivots: list[int] = []
    r = 0
    for c in range(numCols):
        if r == numRows:
            break
        nonzero = np.nonzero(a[r:, c])[0]
        if nonzero.size == 0:
            continue
        k = r + int(nonzero[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * inv[a[r, c]]) % p
        column = a[:, c].copy()
        column[r] = 0
        others = np.nonzero(column)[0]
        if others.size:
            a[others] = (a[others] - np.outer(column[others], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(matrix, p: int) -> int:
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0
    return len(rref(matrix, p)[1])


def nullSpace(matrix, p: int, numCols: int | None = None) -> np.ndarray:
    """Basis of {x : matrix @ x = 0}, one basis vector per row."""
    matrix = np.asarray(matrix, dtype=np.int64)
    if numCols is None:
        numCols = matrix.shape[1]
    if matrix.size == 0:
        return np.eye(numCols, dtype=np.int64)
    reduced, pivots = rref(matrix.reshape(-1, numCols), p)
    free = [c for c in range(numCols) if c not in set(pivots)]
    basis = np.zeros((len(free), numCols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, c in zip(reduced, pivots):
            basis[i, c] = (-row[f]) % p
    return basis


def solve(matrix, rhs, p: int) -> np.ndarray | None:
    """One solution x of matrix @ x = rhs, or None."""
    matrix = np.asarray(matrix, dtype=np.int64)
    rhs = np.asarray(rhs, dtype=np.int64).reshape(-1, 1)
    numCols = matrix.shape[1]
    reduced, pivots = rref(np.hstack([matrix, rhs]), p)
    if pivots and pivots[-1] == numCols:
        return None
    x = np.zeros(numCols, dtype=np.int64)
    for row, c in zip(reduced, pivots):
        x[c] = row[numCols]
    return x


def columnBasis(columns, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduce a set of column vectors to a basis that is the identity on its
    pivot rows. Returns (basis with one column per vector, pivot rows).
    """
    reduced, pivots = rref(np.asarray(columns, dtype=np.int64).T, p)
    return reduced.T.copy(), pivots


def subspaceKey(rows, p: int) -> bytes:
    reduced, _ = rref(rows, p)
    return reduced.astype(np.uint8).tobytes() + bytes([reduced.shape[0]])


class Echelon:
    """An incrementally grown row space kept in reduced row echelon form."""

    def __init__(self, numCols: int, p: int):
        self.numCols = numCols
        self.p = p
        self.rows = np.zeros((0, numCols), dtype=np.int64)
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, self.numCols) % self.p
        if self.pivots and rows.size:
            rows = (rows - rows[:, self.pivots] @ self.rows) % self.p
        return rows

    def addRows(self, rows: np.ndarray) -> bool:
        """Add rows; return True when the rank grew."""
        reduced = self.reduce(rows)
        reduced = reduced[np.any(reduced, axis=1)]
        if not reduced.shape[0]:
            return False
        self.rows, self.pivots = rref(np.vstack([self.rows, reduced]), self.p)
        return True

    def contains(self, vector) -> bool:
        return not np.any(self.reduce(vector))

    def hasPivot(self, column: int) -> bool:
        return column in self.pivots

    def particularSolution(self) -> np.ndarray:
        """For an augmented system (constant in the last column) with no pivot
        there, the solution with all free unknowns set to zero.
        """
        numUnknowns = self.numCols - 1
        x = np.zeros(numUnknowns, dtype=np.int64)
        for row, c in zip(self.rows, self.pivots):
            x[c] = (-row[numUnknowns]) % self.p
        return x
