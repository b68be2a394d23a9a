"""Modules for SL_n(k) acting by conjugation, and the first-cohomology and
extension-splitting computations built on them.

Vectors are F_p coordinate vectors. For M a matrix entry (i, j) contributes
d coordinates, the field coordinates of the entry, at positions
((i * n) + j) * d + c. Actions are column conventions: v -> A @ v.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from .base import Budgets, defaultBudgets
from .groups import (
    GroupTable,
    additiveBasis,
    closure,
    elementaryGenerators,
    glOrder,
    slOrder,
)
from .linalg import Echelon, columnBasis, nullSpace, rank, rref, subspaceKey
from .matrices import Mat, batchMatmul, formatMat
from .rings import Ring, RingSpec, makeRing

logger = logging.getLogger(__name__)


class ModuleError(ValueError):
    pass


class GaschutzError(ValueError):
    pass


class ModuleKind(str, Enum):
    M = "M"
    M0 = "M0"
    S = "S"
    V = "V"
    TRIVIAL = "k"


# coordinates of matrices over a field


def matCoords(mat: Mat) -> np.ndarray:
    field = mat.ring
    return np.array(
        [c for code in mat.entries for c in field.decode(code)], dtype=np.int64
    )


def coordsToMat(field: Ring, n: int, coords) -> Mat:
    d = field.d
    coords = [int(c) for c in coords]
    return Mat(field, n, (field.encode(coords[e * d : (e + 1) * d]) for e in range(n * n)))


def _matrixLabels(field: Ring, n: int) -> list[str]:
    labels = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for c in range(field.d):
                labels.append(f"e{i}{j}" if field.d == 1 else f"e{i}{j}*x^{c}")
    return labels


def _describeVector(vector: np.ndarray, labels: list[str], p: int) -> str:
    terms = []
    for coefficient, label in zip(vector, labels):
        coefficient = int(coefficient) % p
        if coefficient == 1:
            terms.append(label)
        elif coefficient == p - 1:
            terms.append(f"-{label}")
        elif coefficient:
            terms.append(f"{coefficient}*{label}")
    return " + ".join(terms).replace("+ -", "- ") or "0"


def multiplicationByX(field: Ring) -> np.ndarray:
    """The F_p-linear map y -> x*y on field coordinates."""
    basis = additiveBasis(field)
    x = basis[1]
    return np.array(
        [field.decode(field.mul(x, b)) for b in basis], dtype=np.int64
    ).T.copy()


@dataclass(eq=False)
class GModule:
    group: GroupTable
    kind: ModuleKind
    field: Ring
    n: int
    labels: list[str]
    genActions: np.ndarray  # (numGens, dim, dim)
    # multiplication by the field generator x, present when d > 1
    kAction: np.ndarray | None = None
    # module coordinates -> coordinates in M (representatives for quotients)
    basisInM: np.ndarray | None = None
    # coordinates in M of a vector of the relevant subspace -> module coordinates
    fromM: np.ndarray | None = None

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def dimK(self) -> int:
        return self.dim // self.field.d

    def __repr__(self):
        return f"GModule({self.kind.value}, {self.field.key}, n={self.n}, dim={self.dim})"

    @cached_property
    def elementActions(self) -> np.ndarray:
        """Action matrices of all group elements, propagated along the
        spanning tree: A[g * s] = A[g] @ A[s].
        """
        group, p, dim = self.group, self.p, self.dim
        actions = np.zeros((group.order, dim, dim), dtype=np.uint8)
        actions[0] = np.eye(dim, dtype=np.uint8)
        gens = self.genActions.astype(np.int64)
        for h in range(1, group.order):
            g, s = group.parent[h], group.parentGen[h]
            actions[h] = (actions[g].astype(np.int64) @ gens[s]) % p
        return actions

    def act(self, g: int, vector) -> np.ndarray:
        return (self.elementActions[g].astype(np.int64) @ np.asarray(vector)) % self.p

    def coordinates(self, vectorInM) -> np.ndarray:
        if self.fromM is None:
            raise ModuleError(f"{self.kind.value} has no coordinates in M")
        return (self.fromM @ np.asarray(vectorInM, dtype=np.int64)) % self.p

    def toM(self, vector) -> np.ndarray:
        if self.basisInM is None:
            raise ModuleError(f"{self.kind.value} has no representatives in M")
        return (self.basisInM @ np.asarray(vector, dtype=np.int64)) % self.p

    def describe(self, vector) -> str:
        return _describeVector(np.asarray(vector), self.labels, self.p)


def _fullMatrixModule(group: GroupTable, field: Ring, n: int) -> GModule:
    d = field.d
    dim = n * n * d
    basis = additiveBasis(field)
    actions = []
    for gen in group.gens:
        genInverse = gen.inverse()
        columns = []
        for e in range(n * n):
            for c in range(d):
                entries = [field.zero] * (n * n)
                entries[e] = basis[c]
                conjugate = gen @ Mat(field, n, entries) @ genInverse
                columns.append(matCoords(conjugate))
        actions.append(np.array(columns, dtype=np.int64).T)
    kAction = None
    if d > 1:
        kAction = np.kron(np.eye(n * n, dtype=np.int64), multiplicationByX(field))
    identity = np.eye(dim, dtype=np.int64)
    return GModule(
        group=group,
        kind=ModuleKind.M,
        field=field,
        n=n,
        labels=_matrixLabels(field, n),
        genActions=np.array(actions, dtype=np.int64).reshape(-1, dim, dim),
        kAction=kAction,
        basisInM=identity,
        fromM=identity,
    )


def _submodule(parent: GModule, kind: ModuleKind, columns: np.ndarray) -> GModule:
    """Restrict parent to the span of the given column vectors, which must be
    stable under the action.
    """
    p = parent.p
    basis, pivots = columnBasis(columns, p)
    actions = np.array(
        [((action @ basis) % p)[pivots, :] for action in parent.genActions],
        dtype=np.int64,
    ).reshape(-1, len(pivots), len(pivots))
    kAction = None
    if parent.kAction is not None:
        kAction = ((parent.kAction @ basis) % p)[pivots, :]
    selection = np.eye(parent.dim, dtype=np.int64)[pivots, :]
    labels = [_describeVector(column, parent.labels, p) for column in basis.T]
    assert parent.basisInM is not None and parent.fromM is not None
    return GModule(
        group=parent.group,
        kind=kind,
        field=parent.field,
        n=parent.n,
        labels=labels,
        genActions=actions,
        kAction=kAction,
        basisInM=(parent.basisInM @ basis) % p,
        fromM=(selection @ parent.fromM) % p,
    )


def _quotient(parent: GModule, kind: ModuleKind, subColumns: np.ndarray) -> GModule:
    """parent / span(subColumns), coordinates taken at the non-pivot rows of
    the reduced subspace basis.
    """
    p = parent.p
    sub, pivots = columnBasis(subColumns, p)
    complement = [r for r in range(parent.dim) if r not in set(pivots)]
    selection = np.eye(parent.dim, dtype=np.int64)[pivots, :]
    projection = ((np.eye(parent.dim, dtype=np.int64) - sub @ selection) % p)[
        complement, :
    ]
    lift = np.eye(parent.dim, dtype=np.int64)[:, complement]
    actions = np.array(
        [(projection @ action @ lift) % p for action in parent.genActions],
        dtype=np.int64,
    ).reshape(-1, len(complement), len(complement))
    kAction = None
    if parent.kAction is not None:
        kAction = (projection @ parent.kAction @ lift) % p
    assert parent.basisInM is not None and parent.fromM is not None
    return GModule(
        group=parent.group,
        kind=kind,
        field=parent.field,
        n=parent.n,
        labels=[f"[{parent.labels[r]}]" for r in complement],
        genActions=actions,
        kAction=kAction,
        basisInM=(parent.basisInM @ lift) % p,
        fromM=(projection @ parent.fromM) % p,
    )


def _traceZeroColumns(field: Ring, n: int) -> np.ndarray:
    d, p = field.d, field.p
    columns = []
    for i in range(n):
        for j in range(n):
            for c in range(d):
                column = np.zeros(n * n * d, dtype=np.int64)
                if i != j:
                    column[(i * n + j) * d + c] = 1
                elif i < n - 1:
                    column[(i * n + i) * d + c] = 1
                    column[((n - 1) * n + (n - 1)) * d + c] = p - 1
                else:
                    continue
                columns.append(column)
    return np.array(columns, dtype=np.int64).T


def scalarColumns(field: Ring, n: int) -> np.ndarray:
    """I * x^c for the power basis of k, as coordinates in M."""
    d = field.d
    columns = []
    for c in range(d):
        column = np.zeros(n * n * d, dtype=np.int64)
        for i in range(n):
            column[(i * n + i) * d + c] = 1
        columns.append(column)
    return np.array(columns, dtype=np.int64).T


def _trivialModule(group: GroupTable, field: Ring) -> GModule:
    d = field.d
    return GModule(
        group=group,
        kind=ModuleKind.TRIVIAL,
        field=field,
        n=group.n,
        labels=["1"] if d == 1 else [f"x^{c}" for c in range(d)],
        genActions=np.array(
            [np.eye(d, dtype=np.int64)] * group.numGens, dtype=np.int64
        ).reshape(-1, d, d),
        kAction=multiplicationByX(field) if d > 1 else None,
    )


def makeModule(kind: ModuleKind | str, group: GroupTable) -> GModule:
    """M, M0, S, V = M0/S or the trivial module k over a group of matrices over
    a field k, acting by conjugation.
    """
    kind = ModuleKind(kind)
    field, n = group.ring, group.n
    if not field.isField:
        raise ModuleError(f"modules are defined over a residue field, not {field.key}")
    if kind in (ModuleKind.S, ModuleKind.V) and n % field.p:
        raise ModuleError(f"{kind.value} needs p | n, got p={field.p}, n={n}")
    if kind == ModuleKind.TRIVIAL:
        return _trivialModule(group, field)
    full = _fullMatrixModule(group, field, n)
    if kind == ModuleKind.M:
        return full
    if kind == ModuleKind.S:
        return _submodule(full, kind, scalarColumns(field, n))
    traceZero = _submodule(full, ModuleKind.M0, _traceZeroColumns(field, n))
    if kind == ModuleKind.M0:
        return traceZero
    return _quotient(traceZero, kind, traceZero.coordinates(scalarColumns(field, n)))


def checkAction(module: GModule, samples: int = 1000, seed: int = 0) -> bool:
    """Sampled check that element actions multiply like the group elements."""
    group = module.group
    rng = random.Random(seed)
    actions = module.elementActions.astype(np.int64)
    for _ in range(samples):
        g, h = group.randomIndex(rng), group.randomIndex(rng)
        gh = group.multiplyIndex(g, h)
        if not np.array_equal(actions[gh], (actions[g] @ actions[h]) % module.p):
            return False
    return True


def fixedPoints(module: GModule) -> np.ndarray:
    """Basis of M^G, one vector per row."""
    dim = module.dim
    stacked = np.vstack(
        [(action - np.eye(dim, dtype=np.int64)) % module.p for action in module.genActions]
    ) if module.group.numGens else np.zeros((0, dim), dtype=np.int64)
    return nullSpace(stacked, module.p, dim)


def fixedPointDim(module: GModule) -> int:
    return len(fixedPoints(module))


# submodules


def _allVectors(p: int, dim: int) -> np.ndarray:
    return np.array(list(itertools.product(range(p), repeat=dim)), dtype=np.int64)


def _orbits(images: list[np.ndarray], size: int) -> list[list[int]]:
    seen = np.zeros(size, dtype=bool)
    seen[0] = True
    orbits = []
    for start in range(1, size):
        if seen[start]:
            continue
        seen[start] = True
        orbit = [start]
        stack = [start]
        while stack:
            v = stack.pop()
            for image in images:
                w = int(image[v])
                if not seen[w]:
                    seen[w] = True
                    orbit.append(w)
                    stack.append(w)
        orbits.append(orbit)
    return orbits


def submoduleLattice(
    module: GModule,
    useKStructure: bool = True,
    budgets: Budgets = defaultBudgets,
) -> list[np.ndarray]:
    """All proper nonzero submodules, each as a reduced basis (one vector per
    row): spans of single-vector orbits, then pairwise sums until nothing new
    appears. With useKStructure the orbits include multiplication by k, so
    only k-subspaces are found.
    """
    p, dim = module.p, module.dim
    if dim == 0:
        return []
    budgets.check("submodule vector enumeration", p**dim, budgets.vectorCap)
    operators = list(module.genActions)
    if useKStructure and module.kAction is not None:
        operators.append(module.kAction)
    vectors = _allVectors(p, dim)
    weights = p ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    images = [((vectors @ op.T) % p) @ weights for op in operators]
    found: dict[bytes, np.ndarray] = {}
    for orbit in _orbits(images, len(vectors)):
        span, _ = rref(vectors[orbit], p)
        if 0 < len(span) < dim:
            found.setdefault(span.astype(np.uint8).tobytes() + bytes([len(span)]), span)
    logger.debug(f"{len(found)} cyclic submodules of {module!r}")
    frontier = list(found.values())
    while frontier:
        current = list(found.values())
        newOnes = []
        for a in frontier:
            for b in current:
                span, _ = rref(np.vstack([a, b]), p)
                if len(span) < dim:
                    key = span.astype(np.uint8).tobytes() + bytes([len(span)])
                    if key not in found:
                        found[key] = span
                        newOnes.append(span)
        frontier = newOnes
    return sorted(found.values(), key=lambda span: (len(span), span.tobytes()))


def sameSubspace(a: np.ndarray, b: np.ndarray, p: int) -> bool:
    return subspaceKey(a, p) == subspaceKey(b, p)


# equivariant maps


@dataclass(frozen=True)
class Dimension:
    fp: int
    k: int


def equivariantHomDim(
    src: GModule, dst: GModule, budgets: Budgets = defaultBudgets
) -> Dimension:
    """Dimension of the space of G-equivariant k-linear maps src -> dst."""
    if src.group is not dst.group:
        raise ModuleError("equivariant maps need modules over the same group table")
    p = src.p
    unknowns = src.dim * dst.dim
    budgets.check("equivariant map unknowns", unknowns, budgets.unknownCap)
    pairs = list(zip(dst.genActions, src.genActions))
    if src.kAction is not None and dst.kAction is not None:
        pairs.append((dst.kAction, src.kAction))
    blocks = [
        np.kron(a, np.eye(src.dim, dtype=np.int64))
        - np.kron(np.eye(dst.dim, dtype=np.int64), b.T)
        for a, b in pairs
    ]
    fp = unknowns - rank(np.vstack(blocks) % p, p) if blocks else unknowns
    return Dimension(fp, fp // src.field.d)


# crossed homomorphisms


def _propagate(
    module: GModule, constants: np.ndarray | None
) -> np.ndarray:
    """psi[h] as a (dim, unknowns + 1) matrix: psi(h) = psi(g) + g.v_s (+ c(g, s))
    along the spanning tree, unknowns being the values v_s on the generators.
    """
    group, p, dim = module.group, module.p, module.dim
    numUnknowns = group.numGens * dim
    actions = module.elementActions
    psi = np.zeros((group.order, dim, numUnknowns + 1), dtype=np.uint8)
    for h in range(1, group.order):
        g, s = group.parent[h], group.parentGen[h]
        row = psi[g].astype(np.int64)
        row[:, s * dim : (s + 1) * dim] += actions[g]
        if constants is not None:
            row[:, numUnknowns] += constants[g, s]
        psi[h] = row % p
    return psi


def _crossedHomSystem(
    module: GModule,
    constants: np.ndarray | None = None,
    stopRank: int | None = None,
    budgets: Budgets = defaultBudgets,
) -> tuple[Echelon, np.ndarray]:
    """Constraints psi(g) + g.v_s (+ c(g, s)) - psi(g * s) = 0 from the Cayley
    edges outside the spanning tree, reduced incrementally. Stops at the first
    pivot in the constant column, or once stopRank is reached.
    """
    group, p, dim = module.group, module.p, module.dim
    numUnknowns = group.numGens * dim
    budgets.check("crossed-hom unknowns", numUnknowns, budgets.unknownCap)
    psi = _propagate(module, constants)
    actions = module.elementActions
    echelon = Echelon(numUnknowns + 1, p)
    chunkSize = max(1, 4096 // max(dim, 1))
    for start in range(0, group.order, chunkSize):
        g = np.arange(start, min(group.order, start + chunkSize))
        for s in range(group.numGens):
            gs = g[~group.isTreeEdge(g, s)]
            if not gs.size:
                continue
            h = group.cayley[gs, s]
            rows = psi[gs].astype(np.int64) - psi[h]
            rows[:, :, s * dim : (s + 1) * dim] += actions[gs]
            if constants is not None:
                rows[:, :, numUnknowns] += constants[gs, s]
            echelon.addRows(rows.reshape(-1, numUnknowns + 1) % p)
            if echelon.hasPivot(numUnknowns):
                return echelon, psi
            if stopRank is not None and echelon.rank >= stopRank:
                return echelon, psi
    return echelon, psi


@dataclass(frozen=True)
class H1Result:
    fp: int
    k: int
    cocyclesFp: int
    coboundariesFp: int
    fixedFp: int
    unknowns: int


def h1Dim(
    group: GroupTable, module: GModule, budgets: Budgets = defaultBudgets
) -> H1Result:
    """dim H^1(group, module), as Z^1 - (dim M - dim M^G)."""
    if module.group is not group:
        raise ModuleError("the module must be built over the same group table")
    dim = module.dim
    numUnknowns = group.numGens * dim
    fixed = fixedPointDim(module)
    coboundaries = dim - fixed
    echelon, _ = _crossedHomSystem(
        module, stopRank=numUnknowns - coboundaries, budgets=budgets
    )
    cocycles = numUnknowns - echelon.rank
    h1 = cocycles - coboundaries
    assert h1 >= 0
    logger.info(
        f"H^1({group.ring.key} n={group.n}, {module.kind.value}): "
        f"F_p-dimension {h1} (Z^1 {cocycles}, B^1 {coboundaries})"
    )
    return H1Result(
        fp=h1,
        k=h1 // module.field.d,
        cocyclesFp=cocycles,
        coboundariesFp=coboundaries,
        fixedFp=fixed,
        unknowns=numUnknowns,
    )


def defectSpace(module: GModule, genValues: np.ndarray) -> np.ndarray:
    """Propagate fixed generator values v_s along the spanning tree and return
    a reduced basis of the span of psi(g) + g.v_s - psi(g * s) over all Cayley
    edges. Zero exactly when the values extend to a crossed homomorphism.
    """
    group, p, dim = module.group, module.p, module.dim
    values = np.asarray(genValues, dtype=np.int64).reshape(group.numGens, dim) % p
    actions = module.elementActions
    psi = np.zeros((group.order, dim), dtype=np.int64)
    for h in range(1, group.order):
        g, s = group.parent[h], group.parentGen[h]
        psi[h] = (psi[g] + actions[g].astype(np.int64) @ values[s]) % p
    echelon = Echelon(dim, p)
    g = np.arange(group.order)
    for s in range(group.numGens):
        gs = g[~group.isTreeEdge(g, s)]
        h = group.cayley[gs, s]
        rows = psi[gs] + np.einsum("gij,j->gi", actions[gs].astype(np.int64), values[s])
        echelon.addRows((rows - psi[h]) % p)
    return echelon.rows


@dataclass
class Cochain1:
    """A 1-cochain given on every element of a group table."""

    module: GModule
    values: np.ndarray  # (order, dim)

    def isCrossedHom(self) -> bool:
        module = self.module
        group, p = module.group, module.p
        actions = module.elementActions.astype(np.int64)
        g = np.arange(group.order)
        for s in range(group.numGens):
            h = group.cayley[g, s]
            lhs = self.values[g] + np.einsum(
                "gij,j->gi", actions[g], self.values[group.cayley[0, s]]
            )
            if np.any((lhs - self.values[h]) % p):
                return False
        return True


# extensions


class ExtensionVariant(str, Enum):
    FULL = "full"
    SCALAR_QUOTIENT = "scalar_quotient"
    GENERAL_LINEAR = "general_linear"


_kernelKinds = {
    ExtensionVariant.FULL: ModuleKind.M0,
    ExtensionVariant.SCALAR_QUOTIENT: ModuleKind.V,
    ExtensionVariant.GENERAL_LINEAR: ModuleKind.M,
}


@dataclass(eq=False)
class ExtensionDesc:
    """SL_n(W_2) -> SL_n(k) (or its quotient by scalars, or the GL_n version),
    with W_2 the length-2 Galois ring over k. Only arithmetic in the big group
    is needed; it is never closed.
    """

    field: Ring
    n: int
    variant: ExtensionVariant
    big: Ring
    liftMode: str = "teichmuller"
    budgets: Budgets = defaultBudgets

    @property
    def kernelKind(self) -> ModuleKind:
        return _kernelKinds[self.variant]

    @property
    def quotientOrder(self) -> int:
        if self.variant == ExtensionVariant.GENERAL_LINEAR:
            return glOrder(self.field.q, self.n)
        return slOrder(self.field.q, self.n)

    @cached_property
    def quotient(self) -> GroupTable:
        return closure(elementaryGenerators(self.field, self.n), budgets=self.budgets)

    @cached_property
    def _liftTable(self) -> list[int]:
        if self.liftMode == "teichmuller":
            return [self.big.teichmuller(a) for a in self.field.elements()]
        return [self.big.liftDigits(a) for a in self.field.elements()]

    @cached_property
    def _residueTable(self) -> np.ndarray:
        return np.array([self.big.residue(a) for a in self.big.elements()], dtype=np.uint8)

    def lift(self, mat: Mat) -> Mat:
        """The set-theoretic section: entrywise lift, then for the special
        linear variants divide row 1 by the determinant, which is 1 mod p.
        """
        big = self.big
        lifted = mat.map(self._liftTable, big)
        if self.variant == ExtensionVariant.GENERAL_LINEAR:
            return lifted
        det = lifted.det()
        if det == big.one:
            return lifted
        scale = big.inv(det)
        entries = list(lifted.entries)
        for c in range(self.n):
            entries[c] = big.mul(scale, entries[c])
        return Mat(big, self.n, entries)

    def reduce(self, mat: Mat) -> Mat:
        return mat.map(self._residueTable.tolist(), self.field)

    def kernelMatrix(self, mat: Mat) -> Mat:
        """I + p*X -> X mod p."""
        big = self.big
        identity = Mat.identity(big, self.n)
        difference = mat - identity
        return Mat(self.field, self.n, (big.divideByP(x) for x in difference.entries))

    def epsilon(self, kernelMat: Mat) -> Mat:
        """X -> I + p * lift(X)."""
        big = self.big
        entries = [
            big.add(one, big.scale(self.field.p, big.liftDigits(x)))
            for one, x in zip(Mat.identity(big, self.n).entries, kernelMat.entries)
        ]
        return Mat(big, self.n, entries)

    def canonical(self, mat: Mat) -> Mat:
        """Coset representative modulo the scalars I + pa: the one whose (1,1)
        entry has p-digit 0, the least possible. A non-unit (1,1) entry is fixed
        by every such scalar, so then the first unit entry in row-major order
        is normalized instead.
        """
        if self.variant != ExtensionVariant.SCALAR_QUOTIENT:
            return mat
        big, field = self.big, self.field
        unit = mat[0, 0]
        if not big.isUnit(unit):
            unit = next(x for x in mat.entries if big.isUnit(x))
        residue = big.residue(unit)
        digit = big.divideByP(big.sub(unit, big.liftDigits(residue)))
        if digit == field.zero:
            return mat
        a = field.neg(field.mul(digit, field.inv(residue)))
        scalar = big.add(big.one, big.scale(field.p, big.liftDigits(a)))
        return mat.scaled(scalar)

    def cocycleValue(self, g: Mat, h: Mat) -> Mat:
        """c(g, h) = sigma0(g) sigma0(h) sigma0(gh)^-1 as a matrix over k."""
        kernelElement = self.lift(g) @ self.lift(h) @ self.lift(g @ h).inverse()
        return self.kernelMatrix(kernelElement)


def wittLength2(field: Ring, budgets: Budgets = defaultBudgets) -> Ring:
    spec = field.spec
    if spec.d == 1:
        return makeRing(RingSpec.zpm(spec.p, 2), budgets)
    return makeRing(RingSpec.galois(spec.p, 2, spec.d, spec.f), budgets)


def makeExtension(
    field: Ring,
    n: int,
    variant: ExtensionVariant | str = ExtensionVariant.FULL,
    liftMode: str = "teichmuller",
    budgets: Budgets = defaultBudgets,
) -> ExtensionDesc:
    variant = ExtensionVariant(variant)
    if not field.isField:
        raise ModuleError(f"extensions are built over a field, not {field.key}")
    if liftMode not in ("teichmuller", "digits"):
        raise ValueError(f"unknown lift mode {liftMode!r}")
    if variant == ExtensionVariant.SCALAR_QUOTIENT and n % field.p:
        raise ModuleError(f"the scalar quotient needs p | n, got p={field.p}, n={n}")
    return ExtensionDesc(
        field=field,
        n=n,
        variant=variant,
        big=wittLength2(field, budgets),
        liftMode=liftMode,
        budgets=budgets,
    )


def checkCocycleIdentity(
    ext: ExtensionDesc, elements: list[Mat], samples: int = 10_000, seed: int = 0
) -> int:
    """Count triples (g, h, l) drawn from elements violating
    g.c(h, l) - c(gh, l) + c(g, hl) - c(g, h) = 0 (modulo scalars for the
    scalar quotient).
    """
    rng = random.Random(seed)
    field, n = ext.field, ext.n
    scalars = {Mat.scalar(field, n, a) for a in field.elements()}
    failures = 0
    for _ in range(samples):
        g, h, l = (rng.choice(elements) for _ in range(3))
        total = (
            g @ ext.cocycleValue(h, l) @ g.inverse()
            - ext.cocycleValue(g @ h, l)
            + ext.cocycleValue(g, h @ l)
            - ext.cocycleValue(g, h)
        )
        if ext.variant == ExtensionVariant.SCALAR_QUOTIENT:
            failures += total not in scalars
        else:
            failures += total != Mat.scalar(field, n, field.zero)
    return failures


def checkKernelDeterminant(
    big: Ring, n: int, samples: int = 10_000, seed: int = 0
) -> int:
    """Count matrices X with det(I + pX) != 1 + p tr(X), exhaustively over
    residue-digit matrices when there are at most `samples` of them.
    """
    field = big.residueField
    p = big.p
    count = field.size ** (n * n)
    if count <= samples:
        choices = itertools.product(field.elements(), repeat=n * n)
    else:
        rng = random.Random(seed)
        choices = (
            tuple(rng.randrange(field.size) for _ in range(n * n)) for _ in range(samples)
        )
    identity = Mat.identity(big, n)
    failures = 0
    for entries in choices:
        x = Mat(big, n, (big.liftDigits(a) for a in entries))
        expected = big.add(big.one, big.scale(p, x.trace()))
        if (identity + x.scaled(big.fromInt(p))).det() != expected:
            failures += 1
    return failures


@dataclass
class SplitResult:
    variant: ExtensionVariant
    split: bool
    subgroupOrder: int
    quotientOrder: int
    # the verdict for the whole quotient, through Gaschutz or restriction
    globalSplit: bool | None
    section: list[Mat] | None = None
    cochain: Cochain1 | None = None
    witness: dict = field(default_factory=dict)

    def certificate(self) -> dict:
        data = {
            "variant": self.variant.value,
            "split": self.split,
            "subgroupOrder": self.subgroupOrder,
            "quotientOrder": self.quotientOrder,
            "globalSplit": self.globalSplit,
        }
        data.update(self.witness)
        if self.section is not None:
            data["sectionGenerators"] = [formatMat(m) for m in self.section[:8]]
        return data


def globalSplitVerdict(
    ext: ExtensionDesc, subgroupOrder: int, split: bool, requireGaschutz: bool = False
) -> bool | None:
    """Lift a verdict over a subgroup to the whole quotient. A non-split
    restriction is non-split globally. A splitting transfers only when the
    index is prime to p; otherwise the answer is unknown (None).
    """
    quotientOrder = ext.quotientOrder
    if quotientOrder % subgroupOrder:
        raise ValueError(f"{subgroupOrder} does not divide {quotientOrder}")
    if not split:
        return False
    if subgroupOrder == quotientOrder or (quotientOrder // subgroupOrder) % ext.field.p:
        return True
    if requireGaschutz:
        raise GaschutzError(
            f"index {quotientOrder // subgroupOrder} is divisible by p = {ext.field.p}"
        )
    return None


def _verifySection(
    ext: ExtensionDesc,
    subgroup: GroupTable,
    section: list[Mat],
    budgets: Budgets,
    seed: int,
) -> dict | None:
    """None when the section is a homomorphism lifting the identity, else the
    first offending pair.
    """
    field, big = ext.field, ext.big
    order = subgroup.order
    sigma = np.stack([m.toArray() for m in section])
    if not np.array_equal(ext._residueTable[sigma], subgroup.elements):
        return {"reason": "section does not reduce to the identity"}
    if order * order <= budgets.exhaustiveBudget:
        pairs: list[tuple[int, np.ndarray]] = [(g, np.arange(order)) for g in range(order)]
    else:
        rng = np.random.default_rng(seed)
        pairs = [
            (int(g), rng.integers(0, order, 64))
            for g in rng.integers(0, order, max(1, budgets.samples // 64))
        ]
    index = subgroup.index
    blockSize = subgroup.n * subgroup.n
    for g, hs in pairs:
        products = batchMatmul(field, subgroup.elements[g][None], subgroup.elements[hs])
        blob = products.tobytes()
        gh = [index[blob[i * blockSize : (i + 1) * blockSize]] for i in range(len(hs))]
        actual = batchMatmul(big, sigma[g][None], sigma[hs])
        expected = sigma[gh]
        if ext.variant == ExtensionVariant.SCALAR_QUOTIENT:
            for h, a, e in zip(hs, actual, expected):
                if ext.canonical(Mat.fromArray(big, a)) != ext.canonical(
                    Mat.fromArray(big, e)
                ):
                    return {"g": g, "h": int(h)}
        else:
            bad = np.nonzero(np.any(actual != expected, axis=(1, 2)))[0]
            if bad.size:
                return {"g": g, "h": int(hs[bad[0]])}
    return None


def splittingDecide(
    ext: ExtensionDesc,
    subgroup: GroupTable,
    requireGaschutz: bool = False,
    budgets: Budgets | None = None,
    seed: int = 0,
) -> SplitResult:
    """Decide whether the extension splits over subgroup by solving
    c(g, s) = psi(g * s) - psi(g) - g.v_s for generator values v_s.
    """
    if budgets is None:
        budgets = ext.budgets
    if subgroup.ring != ext.field or subgroup.n != ext.n:
        raise ValueError("the subgroup must consist of matrices over the residue field")
    module = makeModule(ext.kernelKind, subgroup)
    order, dim = subgroup.order, module.dim
    numUnknowns = subgroup.numGens * dim
    lifts = [ext.lift(subgroup.element(i)) for i in range(order)]
    liftInverses = [lift.inverse() for lift in lifts]
    genLifts = [ext.lift(gen) for gen in subgroup.gens]
    constants = np.zeros((order, subgroup.numGens, dim), dtype=np.int64)
    for g in range(order):
        for s in range(subgroup.numGens):
            h = int(subgroup.cayley[g, s])
            kernelElement = lifts[g] @ genLifts[s] @ liftInverses[h]
            constants[g, s] = module.coordinates(
                matCoords(ext.kernelMatrix(kernelElement))
            )
    echelon, psi = _crossedHomSystem(module, constants, budgets=budgets)
    split = not echelon.hasPivot(numUnknowns)
    result = SplitResult(
        variant=ext.variant,
        split=split,
        subgroupOrder=order,
        quotientOrder=ext.quotientOrder,
        globalSplit=globalSplitVerdict(ext, order, split, requireGaschutz),
    )
    if not split:
        result.witness = {"rank": echelon.rank - 1, "augmentedRank": echelon.rank}
        logger.info(
            f"{ext.variant.value} extension over {ext.field.key}, n={ext.n}: "
            f"no splitting over a subgroup of order {order}"
        )
        return result
    solution = np.append(echelon.particularSolution(), 1)
    values = (psi.astype(np.int64) @ solution) % module.p
    section = [
        ext.epsilon(coordsToMat(ext.field, ext.n, module.toM(values[h]))) @ lifts[h]
        for h in range(order)
    ]
    problem = _verifySection(ext, subgroup, section, budgets, seed)
    if problem is not None:
        raise AssertionError(f"constructed section is not a homomorphism: {problem}")
    result.section = section
    result.cochain = Cochain1(module, values)
    result.witness = {"rank": echelon.rank, "sectionVerified": True}
    logger.info(
        f"{ext.variant.value} extension over {ext.field.key}, n={ext.n}: "
        f"split over a subgroup of order {order}"
    )
    return result
