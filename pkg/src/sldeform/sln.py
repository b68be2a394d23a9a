"""Checks and algorithms for SL_n over a finite local ring: the Steinberg
relations, decomposition into elementary matrices, the T_ij conjugation law,
the commutant of the upper unitriangular generators and commutator witnesses.
"""

import itertools
import logging
import random
from typing import Iterator

import numpy as np

from .base import Budgets, BudgetExceededError, Report, defaultBudgets
from .matrices import (
    ElemMove,
    Mat,
    batchMatmul,
    buildTij,
    commutator,
    elementary,
    formatMat,
    matToData,
    multiplyWord,
    tijFactors,
)
from .rings import Ring

logger = logging.getLogger(__name__)


class DecompositionError(RuntimeError):
    pass


def _checkN(n: int):
    if n < 3:
        raise ValueError(f"n must be at least 3, got {n}")


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]


# Steinberg relations


def _relationIndices(n: int) -> Iterator[tuple[str, tuple[int, ...]]]:
    pairs = _pairs(n)
    for i, j in pairs:
        yield "a", (i, j)
    for i, j in pairs:
        for k in range(1, n + 1):
            if k != i and k != j:
                yield "b", (i, j, k)
    for i, j in pairs:
        for k, l in pairs:
            if j != k and i != l:
                yield "c", (i, j, k, l)


def _elementaryStack(ring: Ring, n: int, i: int, j: int) -> np.ndarray:
    stack = np.zeros((ring.size, n, n), dtype=np.uint8)
    for r in range(n):
        stack[:, r, r] = ring.one
    stack[:, i - 1, j - 1] = np.arange(ring.size, dtype=np.uint8)
    return stack


def _inverseStack(ring: Ring, stack: np.ndarray) -> np.ndarray:
    return np.stack([Mat.fromArray(ring, m).inverse().toArray() for m in stack])


def _steinbergExhaustive(ring: Ring, n: int, report: Report) -> dict[str, int]:
    stacks = {}
    inverses = {}
    for i, j in _pairs(n):
        stacks[i, j] = _elementaryStack(ring, n, i, j)
        inverses[i, j] = _inverseStack(ring, stacks[i, j])
    identity = Mat.identity(ring, n).toArray()
    xs, ys = np.meshgrid(
        np.arange(ring.size), np.arange(ring.size), indexing="ij"
    )
    counts = {"a": 0, "b": 0, "c": 0}
    for relation, indices in _relationIndices(n):
        left, right = indices[:2], indices[-2:]
        if relation == "a":
            s = stacks[left]
            actual = batchMatmul(ring, s[:, None], s[None, :])
            expected = s[ring.addTable[xs, ys]]
        else:
            if relation == "b":
                i, j, k = indices
                right = (j, k)
            a, b = stacks[left], stacks[right]
            ab = batchMatmul(ring, a[:, None], b[None, :])
            aba = batchMatmul(ring, ab, inverses[left][:, None])
            actual = batchMatmul(ring, aba, inverses[right][None, :])
            if relation == "b":
                expected = stacks[i, k][ring.mulTable[xs, ys]]
            else:
                expected = np.broadcast_to(identity, actual.shape)
        counts[relation] += ring.size**2
        bad = np.nonzero(np.any(actual != expected, axis=(2, 3)))
        if bad[0].size:
            x, y = int(bad[0][0]), int(bad[1][0])
            report.fail(
                relation=relation,
                indices=list(indices),
                x=ring.format(x),
                y=ring.format(y),
            )
            break
    return counts


def _steinbergSampled(
    ring: Ring, n: int, samples: int, rng: random.Random, report: Report
) -> dict[str, int]:
    families: dict[str, list] = {"a": [], "b": [], "c": []}
    for relation, indices in _relationIndices(n):
        families[relation].append(indices)
    counts = {"a": 0, "b": 0, "c": 0}
    perFamily = max(1, samples // 3)
    for relation, choices in families.items():
        for _ in range(perFamily):
            indices = rng.choice(choices)
            x = ring.randomElement(rng)
            y = ring.randomElement(rng)
            if relation == "a":
                i, j = indices
                ok = elementary(ring, n, i, j, x) @ elementary(
                    ring, n, i, j, y
                ) == elementary(ring, n, i, j, ring.add(x, y))
            elif relation == "b":
                i, j, k = indices
                ok = commutator(
                    elementary(ring, n, i, j, x), elementary(ring, n, j, k, y)
                ) == elementary(ring, n, i, k, ring.mul(x, y))
            else:
                i, j, k, l = indices
                ok = commutator(
                    elementary(ring, n, i, j, x), elementary(ring, n, k, l, y)
                ) == Mat.identity(ring, n)
            counts[relation] += 1
            if not ok:
                report.fail(
                    relation=relation,
                    indices=list(indices),
                    x=ring.format(x),
                    y=ring.format(y),
                )
                return counts
    return counts


def steinbergCheck(
    ring: Ring,
    n: int,
    mode: str = "auto",
    budgets: Budgets = defaultBudgets,
    seed: int = 0,
) -> Report:
    """Check E_ij(x)E_ij(y) = E_ij(x+y), [E_ij(x), E_jk(y)] = E_ik(xy) and
    [E_ij(x), E_kl(y)] = 1 for j != k, i != l.

    mode is "exhaustive", "sampled" or "auto" (exhaustive when within budget).
    """
    _checkN(n)
    if mode not in ("auto", "exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    work = ring.size**2 * n**4
    canTabulate = ring.mulTable is not None
    if mode == "exhaustive":
        budgets.check("Steinberg sweep", work, budgets.exhaustiveBudget)
        if not canTabulate:
            raise BudgetExceededError(
                "Steinberg sweep ring size", ring.size, budgets.tableCap
            )
    elif mode == "auto":
        mode = (
            "exhaustive"
            if canTabulate and work <= budgets.exhaustiveBudget
            else "sampled"
        )
    report = Report(
        "steinberg", "steinberg-relations", seed=seed if mode == "sampled" else None
    )
    if mode == "exhaustive":
        counts = _steinbergExhaustive(ring, n, report)
    else:
        counts = _steinbergSampled(ring, n, budgets.samples, random.Random(seed), report)
    report.certificate = {"ring": ring.key, "n": n, "mode": mode, "checked": counts}
    logger.info(f"Steinberg relations over {ring.key}, n={n}: {report.verdict.value}")
    return report


# decomposition


def _wordForDiagonal(ring: Ring, n: int, diagonal: list[int]) -> list[ElemMove]:
    """Write diag(u_1, ..., u_n) with product 1 as a product of h_i(v_i),
    v_i = u_1...u_i, each h_i(v) spelled with six elementary moves.
    """
    moves = []
    v = ring.one
    for i in range(1, n):
        v = ring.mul(v, diagonal[i - 1])
        if v == ring.one:
            continue
        vInverse = ring.inv(v)
        moves += [
            ElemMove(i, i + 1, v),
            ElemMove(i + 1, i, ring.neg(vInverse)),
            ElemMove(i, i + 1, v),
            ElemMove(i, i + 1, ring.minusOne),
            ElemMove(i + 1, i, ring.one),
            ElemMove(i, i + 1, ring.minusOne),
        ]
    return moves


def elementaryDecompose(mat: Mat) -> list[ElemMove]:
    """A word of elementary matrices whose product, left to right, is mat.

    Unit-pivot elimination by row operations; a column whose pivot is not a
    unit is repaired by adding the first lower row that has one.
    """
    ring, n = mat.ring, mat.n
    if mat.det() != ring.one:
        raise ValueError(f"determinant is not 1: {formatMat(mat)}")
    rows = [list(row) for row in mat.rows()]
    applied: list[ElemMove] = []

    def addRowMultiple(target: int, source: int, factor: int):
        rows[target] = [
            ring.add(x, ring.mul(factor, y)) for x, y in zip(rows[target], rows[source])
        ]
        applied.append(ElemMove(target + 1, source + 1, factor))

    for c in range(n):
        if not ring.isUnit(rows[c][c]):
            repair = next((r for r in range(c + 1, n) if ring.isUnit(rows[r][c])), None)
            if repair is None:
                raise DecompositionError(
                    f"no unit below the pivot in column {c + 1}: {formatMat(mat)}"
                )
            addRowMultiple(c, repair, ring.one)
        pivotInverse = ring.inv(rows[c][c])
        for r in range(n):
            if r != c and rows[r][c]:
                addRowMultiple(r, c, ring.neg(ring.mul(rows[r][c], pivotInverse)))

    word = [ElemMove(move.i, move.j, ring.neg(move.x)) for move in applied]
    word += _wordForDiagonal(ring, n, [rows[r][r] for r in range(n)])
    if multiplyWord(ring, n, word) != mat:
        raise DecompositionError(f"decomposition does not multiply back: {formatMat(mat)}")
    return word


def decompositionBound(n: int) -> int:
    return n * n + 7 * n


def randomElementaryProduct(
    ring: Ring, n: int, rng: random.Random, length: int = 20
) -> Mat:
    result = Mat.identity(ring, n)
    pairs = _pairs(n)
    for _ in range(length):
        i, j = rng.choice(pairs)
        result = result @ elementary(ring, n, i, j, ring.randomElement(rng))
    return result


# T_ij conjugation and commutant


def conjugationCheck(ring: Ring, n: int) -> Report:
    _checkN(n)
    report = Report("conjugation", "elementary-conjugation")
    checked = 0
    for i, j in _pairs(n):
        t = buildTij(i, j, n, ring)
        tInverse = t.inverse()
        for x in ring.elements():
            checked += 1
            if t @ elementary(ring, n, 1, n, x) @ tInverse != elementary(ring, n, i, j, x):
                report.fail(i=i, j=j, x=ring.format(x), t=tijFactors(i, j, n).describe())
                break
        if not report.passed:
            break
    report.certificate = {"ring": ring.key, "n": n, "checked": checked}
    return report


def isScalarCorner(mat: Mat) -> bool:
    """Whether mat has the shape lambda * E_1n(x) with lambda a unit."""
    ring, n = mat.ring, mat.n
    scalar = mat[0, 0]
    if not ring.isUnit(scalar):
        return False
    for r in range(n):
        for c in range(n):
            if r == c:
                if mat[r, c] != scalar:
                    return False
            elif (r, c) != (0, n - 1) and mat[r, c] != ring.zero:
                return False
    return True


def expectedCommutant(ring: Ring, n: int) -> set[Mat]:
    result = set()
    for scalar in ring.units:
        for x in ring.elements():
            result.add(Mat.scalar(ring, n, scalar) @ elementary(ring, n, 1, n, x))
    return result


def commutantClassify(
    ring: Ring, n: int, budgets: Budgets = defaultBudgets
) -> list[Mat]:
    """All invertible X commuting with every E_ij(1), i < j, by brute force."""
    _checkN(n)
    budgets.check("commutant enumeration", ring.size ** (n * n), budgets.enumerationCap)
    if ring.mulTable is None:
        raise BudgetExceededError("commutant ring size", ring.size, budgets.tableCap)
    candidates = np.array(
        list(itertools.product(range(ring.size), repeat=n * n)), dtype=np.uint8
    ).reshape(-1, n, n)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            e = elementary(ring, n, i, j, ring.one).toArray()
            left = batchMatmul(ring, candidates, e[None])
            right = batchMatmul(ring, e[None], candidates)
            candidates = candidates[np.all(left == right, axis=(1, 2))]
    result = []
    for array in candidates:
        mat = Mat.fromArray(ring, array)
        if mat.isInvertible():
            result.append(mat)
    logger.info(f"commutant over {ring.key}, n={n}: {len(result)} matrices")
    return result


def commutantReport(ring: Ring, n: int, budgets: Budgets = defaultBudgets) -> Report:
    report = Report("commutant", "scalar-corner-commutant")
    found = commutantClassify(ring, n, budgets)
    expected = expectedCommutant(ring, n)
    foundSet = set(found)
    expectedCount = len(ring.units) * ring.size
    report.certificate = {
        "ring": ring.key,
        "n": n,
        "count": len(found),
        "expectedCount": expectedCount,
    }
    wrongShape = [mat for mat in found if not isScalarCorner(mat)]
    if wrongShape:
        report.fail(wrongShape=matToData(wrongShape[0]))
    elif foundSet != expected or len(found) != expectedCount:
        missing = sorted(expected - foundSet, key=lambda m: m.entries)
        report.fail(missing=[matToData(m) for m in missing[:3]])
    return report


# commutator witnesses


def commutatorWitness(ring: Ring, i: int, j: int, x: int, n: int) -> tuple[Mat, Mat]:
    """(E_ik(x), E_kj(1)) with k the least index distinct from i and j; their
    commutator is E_ij(x).
    """
    _checkN(n)
    k = next(k for k in range(1, n + 1) if k != i and k != j)
    return elementary(ring, n, i, k, x), elementary(ring, n, k, j, ring.one)


def checkCommutatorWitness(ring: Ring, i: int, j: int, x: int, n: int) -> bool:
    a, b = commutatorWitness(ring, i, j, x, n)
    c = commutator(a, b)
    return c == elementary(ring, n, i, j, x) and c.det() == ring.one
