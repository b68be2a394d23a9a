"""Finite matrix groups materialized by closure under a generating set.

Elements are stored as an (order, n, n) uint8 array of ring codes; the packed
bytes of an element are its hash key. Index 0 is the identity and BFS order is
deterministic: elements in index order, generators in the given order.
"""

import logging
import pathlib
import random
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .base import BudgetExceededError, Budgets, defaultBudgets, stableHash
from .matrices import Mat, batchMatmul, elementary, signMatrix
from .rings import Ring

logger = logging.getLogger(__name__)

CACHE_FORMAT_VERSION = 1


class ClosureCapError(BudgetExceededError):
    pass


@dataclass(eq=False)
class GroupTable:
    ring: Ring
    n: int
    gens: list[Mat]
    elements: np.ndarray  # (order, n, n) uint8
    cayley: np.ndarray  # (order, len(gens)) int32, index of element * gen
    parent: np.ndarray  # (order,) int32, -1 for the identity
    parentGen: np.ndarray  # (order,) int32

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return self.order

    @property
    def numGens(self) -> int:
        return len(self.gens)

    @cached_property
    def index(self) -> dict[bytes, int]:
        return {self.elements[i].tobytes(): i for i in range(self.order)}

    def element(self, i: int) -> Mat:
        return Mat.fromArray(self.ring, self.elements[i])

    def indexOf(self, mat: Mat) -> int | None:
        return self.index.get(mat.toArray().tobytes())

    def __contains__(self, mat: Mat) -> bool:
        return self.indexOf(mat) is not None

    def word(self, i: int) -> list[int]:
        """Generator indices whose product, left to right, is element i."""
        word = []
        while i:
            word.append(int(self.parentGen[i]))
            i = int(self.parent[i])
        word.reverse()
        return word

    def multiplyIndex(self, i: int, j: int) -> int:
        product = batchMatmul(self.ring, self.elements[i], self.elements[j])
        index = self.index.get(product.tobytes())
        if index is None:
            raise ValueError(f"product of elements {i} and {j} is not in the group")
        return index

    @cached_property
    def inverseIndex(self) -> np.ndarray:
        inverse = np.zeros(self.order, dtype=np.int32)
        for i in range(self.order):
            index = self.indexOf(self.element(i).inverse())
            assert index is not None
            inverse[i] = index
        return inverse

    def isTreeEdge(self, g: np.ndarray, s: int) -> np.ndarray:
        h = self.cayley[g, s]
        return (self.parent[h] == g) & (self.parentGen[h] == s)

    def randomIndex(self, rng: random.Random) -> int:
        return rng.randrange(self.order)


def closure(
    gens: list[Mat],
    cap: int | None = None,
    budgets: Budgets = defaultBudgets,
) -> GroupTable:
    if not gens:
        raise ValueError("closure needs at least one generator")
    ring, n = gens[0].ring, gens[0].n
    for gen in gens:
        if gen.ring != ring or gen.n != n:
            raise ValueError("generators must share ring and dimension")
        if not gen.isInvertible():
            raise ValueError(f"generator is not invertible: {gen!r}")
    if ring.mulTable is None:
        raise BudgetExceededError("closure ring size", ring.size, budgets.tableCap)
    if cap is None:
        cap = budgets.closureCap

    blockSize = n * n
    genArrays = [gen.toArray() for gen in gens]
    keys = [Mat.identity(ring, n).toArray().tobytes()]
    index = {keys[0]: 0}
    parent = [-1]
    parentGen = [-1]
    cayleyRows: list[list[int]] = []
    level = [0]
    levelArray = np.frombuffer(keys[0], dtype=np.uint8).reshape(1, n, n)
    while level:
        blobs = [batchMatmul(ring, levelArray, g[None]).tobytes() for g in genArrays]
        nextLevel = []
        for b, elementIndex in enumerate(level):
            row = []
            for s, blob in enumerate(blobs):
                key = blob[b * blockSize : (b + 1) * blockSize]
                target = index.get(key)
                if target is None:
                    target = len(keys)
                    keys.append(key)
                    index[key] = target
                    parent.append(elementIndex)
                    parentGen.append(s)
                    nextLevel.append(target)
                row.append(target)
            cayleyRows.append(row)
        if len(keys) > cap:
            raise ClosureCapError("group closure", len(keys), cap)
        level = nextLevel
        if level:
            levelArray = np.frombuffer(
                b"".join(keys[level[0] :]), dtype=np.uint8
            ).reshape(-1, n, n)
    logger.info(f"closure over {ring.key}, n={n}: order {len(keys)}")
    return GroupTable(
        ring=ring,
        n=n,
        gens=list(gens),
        elements=np.frombuffer(b"".join(keys), dtype=np.uint8).reshape(-1, n, n).copy(),
        cayley=np.array(cayleyRows, dtype=np.int32).reshape(len(keys), len(gens)),
        parent=np.array(parent, dtype=np.int32),
        parentGen=np.array(parentGen, dtype=np.int32),
    )


# generating sets and orders


def additiveBasis(ring: Ring) -> list[int]:
    """Elements with a single coordinate equal to 1; they generate the
    additive group. For a field this is the power basis 1, x, ..., x^(d-1).
    """
    size = len(ring.moduli)
    return [ring.encode(tuple(int(c == i) for c in range(size))) for i in range(size)]


def elementaryGenerators(ring: Ring, n: int) -> list[Mat]:
    return [
        elementary(ring, n, i, j, b)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i != j
        for b in additiveBasis(ring)
    ]


def signedCycle(ring: Ring, n: int) -> Mat:
    """The permutation matrix of e_a -> e_(a+1 mod n), with a sign on the first
    column when n is even so that the determinant is 1.
    """
    rows = [[ring.zero] * n for _ in range(n)]
    for a in range(n):
        rows[(a + 1) % n][a] = ring.one
    cycle = Mat.fromRows(ring, rows)
    if n % 2 == 0:
        cycle = cycle @ signMatrix(ring, n, 1)
    return cycle


def compactGenerators(ring: Ring, n: int) -> list[Mat]:
    """E_12(b) for b in the additive basis, plus a signed n-cycle."""
    return [elementary(ring, n, 1, 2, b) for b in additiveBasis(ring)] + [
        signedCycle(ring, n)
    ]


def unitriangularGenerators(ring: Ring, n: int) -> list[Mat]:
    return [
        elementary(ring, n, i, j, b)
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        for b in additiveBasis(ring)
    ]


def slOrder(q: int, n: int) -> int:
    order = q ** (n * (n - 1) // 2)
    for i in range(2, n + 1):
        order *= q**i - 1
    return order


def glOrder(q: int, n: int) -> int:
    return slOrder(q, n) * (q - 1)


def specialLinear(
    field: Ring, n: int, budgets: Budgets = defaultBudgets, compact: bool = False
) -> GroupTable:
    gens = compactGenerators(field, n) if compact else elementaryGenerators(field, n)
    return closure(gens, budgets=budgets)


def sylowUnitriangular(
    field: Ring, n: int, budgets: Budgets = defaultBudgets
) -> GroupTable:
    if not field.isField:
        raise ValueError(f"{field.key} is not a field")
    return closure(unitriangularGenerators(field, n), budgets=budgets)


# disk cache


class GroupTableCache:
    def __init__(self, cacheDir: str | pathlib.Path, budgets: Budgets = defaultBudgets):
        self.cacheDir = pathlib.Path(cacheDir).resolve()
        self.cacheDir.mkdir(parents=True, exist_ok=True)
        self.budgets = budgets

    def _path(self, gens: list[Mat]) -> pathlib.Path:
        ring, n = gens[0].ring, gens[0].n
        key = stableHash(ring.spec, n, [gen.entries for gen in gens])
        return self.cacheDir / f"group-{key}.npz"

    def closure(self, gens: list[Mat]) -> GroupTable:
        path = self._path(gens)
        table = self._load(path, gens)
        if table is not None:
            logger.debug(f"loaded group table from {path}")
            return table
        table = closure(gens, budgets=self.budgets)
        tempPath = path.with_suffix(".tmp.npz")
        np.savez_compressed(
            tempPath,
            version=np.array(CACHE_FORMAT_VERSION),
            gens=np.stack([gen.toArray() for gen in gens]),
            elements=table.elements,
            cayley=table.cayley,
            parent=table.parent,
            parentGen=table.parentGen,
        )
        tempPath.replace(path)
        return table

    def _load(self, path: pathlib.Path, gens: list[Mat]) -> GroupTable | None:
        if not path.exists():
            return None
        try:
            with np.load(path) as data:
                if int(data["version"]) != CACHE_FORMAT_VERSION:
                    return None
                storedGens = data["gens"]
                if not np.array_equal(
                    storedGens, np.stack([gen.toArray() for gen in gens])
                ):
                    return None
                return GroupTable(
                    ring=gens[0].ring,
                    n=gens[0].n,
                    gens=list(gens),
                    elements=data["elements"],
                    cayley=data["cayley"],
                    parent=data["parent"],
                    parentGen=data["parentGen"],
                )
        except (OSError, KeyError, ValueError) as e:
            logger.warning(f"ignoring unreadable group cache {path}: {e!r}")
            return None
