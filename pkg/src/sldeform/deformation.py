"""Lifts of the standard representation of SL_n(k) through square-zero
thickenings, and the structure of subgroups of SL_n(k[t]/t^2) with full
residual image.
"""

import logging
import math
import random
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .base import Budgets, Report, defaultBudgets
from .cohomology import (
    ExtensionVariant,
    ModuleKind,
    coordsToMat,
    defectSpace,
    h1Dim,
    makeExtension,
    makeModule,
    matCoords,
    scalarColumns,
    splittingDecide,
)
from .groups import GroupTable, closure, elementaryGenerators, slOrder
from .linalg import rank, solve
from .matrices import Mat, elementary, formatMat, matToData
from .rings import Ring, RingKind, enumerateHoms, reductionMap
from .sln import isScalarCorner

logger = logging.getLogger(__name__)


class LiftError(ValueError):
    pass


class ReconstructionError(RuntimeError):
    pass


class CocycleInconsistencyError(ValueError):
    pass


class ConjugatorError(RuntimeError):
    pass


class TrichotomyError(RuntimeError):
    pass


# lift counting


@dataclass(eq=False)
class LiftProblem:
    """Lift the inclusion group -> GL_n(k) to GL_n(target)."""

    group: GroupTable
    target: Ring
    budgets: Budgets = defaultBudgets

    def __post_init__(self):
        fieldSpec = self.group.ring.spec
        if not self.group.ring.isField:
            raise LiftError(f"{self.group.ring.key} is not a residue field")
        if self.target.residueField.spec != fieldSpec:
            raise LiftError(
                f"residue field of {self.target.key} is not {self.group.ring.key}"
            )
        if not self.target.isSquareZero():
            raise LiftError(f"the maximal ideal of {self.target.key} does not square to 0")

    @property
    def field(self) -> Ring:
        return self.group.ring

    @property
    def n(self) -> int:
        return self.group.n

    def conjugated(self, x: Mat) -> "LiftProblem":
        """The same problem for the representation conjugated by x in GL_n(k)."""
        xInverse = x.inverse()
        gens = [x @ g @ xInverse for g in self.group.gens]
        return LiftProblem(closure(gens, budgets=self.budgets), self.target, self.budgets)


@dataclass(frozen=True)
class LiftCount:
    classes: int
    obstructed: bool
    h1Fp: int | None
    idealDim: int


def liftClasses(problem: LiftProblem) -> LiftCount:
    """Number of strict-equivalence classes of lifts: |H^1(group, m_B (x) M)|
    when a lift exists, 0 when the extension by M over the group is non-split.
    """
    field, target = problem.field, problem.target
    idealSize = len(target.maximalIdeal)
    idealDim = round(math.log(idealSize, field.q))
    assert field.q**idealDim == idealSize
    if idealDim == 0:
        return LiftCount(classes=1, obstructed=False, h1Fp=None, idealDim=0)
    if target.scale(field.p, target.one) != target.zero:
        ext = makeExtension(
            field, problem.n, ExtensionVariant.GENERAL_LINEAR, budgets=problem.budgets
        )
        verdict = splittingDecide(ext, problem.group, budgets=problem.budgets)
        if not verdict.split:
            logger.info(f"no lift to {target.key}: the extension does not split")
            return LiftCount(classes=0, obstructed=True, h1Fp=None, idealDim=idealDim)
    h1 = h1Dim(
        problem.group, makeModule(ModuleKind.M, problem.group), problem.budgets
    )
    classes = field.p ** (idealDim * h1.fp)
    logger.info(f"{classes} lift classes to {target.key}")
    return LiftCount(classes=classes, obstructed=False, h1Fp=h1.fp, idealDim=idealDim)


def universalPropertyAudit(
    group: GroupTable, targets: list[Ring], budgets: Budgets = defaultBudgets
) -> Report:
    """Compare lift-class counts with the number of ring homomorphisms from
    the residue field into each target.
    """
    field = group.ring
    report = Report("deformation-audit", "universal-deformation")
    rows = []
    for target in targets:
        count = liftClasses(LiftProblem(group, target, budgets))
        homs = len(enumerateHoms(field, target, budgets))
        rows.append(
            {
                "target": target.key,
                "liftClasses": count.classes,
                "homs": homs,
                "obstructed": count.obstructed,
            }
        )
        if count.classes != homs:
            report.fail(target=target.key, liftClasses=count.classes, homs=homs)
    report.certificate = {"field": field.key, "n": group.n, "targets": rows}
    return report


# square-zero thickenings k[t]/t^2


def _dualNumbers(ring: Ring) -> Ring:
    if ring.spec.kind != RingKind.SQUARE_ZERO or ring.base is None or not ring.base.isField:
        raise ValueError(f"expected k[t]/t^2 over a field, got {ring.key}")
    return ring.base


def embedding(ring: Ring) -> list[int]:
    field = _dualNumbers(ring)
    return [ring.fromParts(a, field.zero) for a in field.elements()]


def constantCopy(ring: Ring, n: int) -> list[Mat]:
    """Generators of SL_n(k) embedded in SL_n(k[t]/t^2)."""
    field = _dualNumbers(ring)
    table = embedding(ring)
    return [gen.map(table, ring) for gen in elementaryGenerators(field, n)]


def kernelElement(ring: Ring, y: Mat) -> Mat:
    """I + t*y for y over k."""
    field = _dualNumbers(ring)
    n = y.n
    identity = Mat.identity(field, n)
    return Mat(
        ring,
        n,
        (ring.fromParts(one, entry) for one, entry in zip(identity.entries, y.entries)),
    )


def fullKernelGenerators(ring: Ring, n: int) -> list[Mat]:
    """Generators of SL_n(k[t]/t^2): the constant copy plus I + t*e_ij, i != j,
    and I + t*(e_ii - e_nn).
    """
    field = _dualNumbers(ring)
    gens = constantCopy(ring, n)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                unit = elementary(field, n, i, j, field.one) - Mat.identity(field, n)
                gens.append(kernelElement(ring, unit))
    for i in range(1, n):
        entries = [field.zero] * (n * n)
        entries[(i - 1) * n + (i - 1)] = field.one
        entries[n * n - 1] = field.minusOne
        gens.append(kernelElement(ring, Mat(field, n, entries)))
    return gens


def scalarExtensionGenerators(ring: Ring, n: int) -> list[Mat]:
    """The constant copy together with I + t*I (needs p | n)."""
    field = _dualNumbers(ring)
    if n % field.p:
        raise ValueError(f"I + tI has determinant 1 only when p | n, got n={n}")
    return constantCopy(ring, n) + [kernelElement(ring, Mat.identity(field, n))]


def randomTwist(gens: list[Mat], rng: random.Random) -> tuple[Mat, list[Mat]]:
    """Conjugate gens by a random X0 = I + t*Y0."""
    ring = gens[0].ring
    field = _dualNumbers(ring)
    n = gens[0].n
    y0 = Mat(field, n, (field.randomElement(rng) for _ in range(n * n)))
    x0 = kernelElement(ring, y0)
    x0Inverse = x0.inverse()
    return x0, [x0 @ g @ x0Inverse for g in gens]


@dataclass
class _Reduction:
    ring: Ring
    field: Ring
    reduced: list[Mat]
    quotient: GroupTable
    cocycle: np.ndarray  # (numGens, n*n*d), coordinates in M


def _reduceGenerators(
    gens: list[Mat], quotientTable: GroupTable | None, budgets: Budgets
) -> _Reduction:
    """Write each generator as (I + t*c) * emb(reduction) and close the
    reductions.
    """
    ring = gens[0].ring
    field = _dualNumbers(ring)
    n = gens[0].n
    piTable = reductionMap(ring, field)
    embed = embedding(ring)
    reduced = [g.map(piTable, field) for g in gens]
    if quotientTable is None:
        quotientTable = closure(reduced, budgets=budgets)
    elif quotientTable.gens != reduced:
        raise ValueError("the quotient table was closed over different generators")
    values = []
    for g, gBar in zip(gens, reduced):
        h = g @ gBar.map(embed, ring).inverse()
        if h.map(piTable, field) != Mat.identity(field, n):
            raise CocycleInconsistencyError(f"{formatMat(g)} does not reduce consistently")
        c = Mat(field, n, (ring.tCoefficient(x) for x in h.entries))
        values.append(matCoords(c))
    return _Reduction(
        ring=ring,
        field=field,
        reduced=reduced,
        quotient=quotientTable,
        cocycle=np.array(values, dtype=np.int64).reshape(len(gens), -1),
    )


@dataclass
class ConjugatorResult:
    x: Mat
    y: Mat
    quotient: GroupTable


def findConjugator(
    gens: list[Mat],
    quotientTable: GroupTable | None = None,
    budgets: Budgets = defaultBudgets,
) -> ConjugatorResult:
    """X = I + tY with X g X^-1 = emb(g mod t) for every generator, for a group
    projecting isomorphically onto SL_n(k).
    """
    reduction = _reduceGenerators(gens, quotientTable, budgets)
    field, ring = reduction.field, reduction.ring
    n = gens[0].n
    module = makeModule(ModuleKind.M, reduction.quotient)
    defects = defectSpace(module, reduction.cocycle)
    if len(defects):
        raise CocycleInconsistencyError(
            f"generator cocycle has a {len(defects)}-dimensional defect; "
            "the group meets the kernel of reduction"
        )
    dim = module.dim
    system = np.vstack(
        [(action - np.eye(dim, dtype=np.int64)) % field.p for action in module.genActions]
    )
    solution = solve(system, reduction.cocycle.reshape(-1), field.p)
    if solution is None:
        raise ConjugatorError("no Y solves (g Y g^-1 - Y) = c(g) on the generators")
    y = coordsToMat(field, n, solution)
    x = kernelElement(ring, y)
    xInverse = x.inverse()
    embed = embedding(ring)
    for g, gBar in zip(gens, reduction.reduced):
        if x @ g @ xInverse != gBar.map(embed, ring):
            raise ConjugatorError(f"X does not normalize generator {formatMat(g)}")
    return ConjugatorResult(x=x, y=y, quotient=reduction.quotient)


class Trichotomy(str, Enum):
    FULL = "full"
    ISO = "iso"
    SCALAR_EXTENSION = "scalar_extension"


@dataclass
class TrichotomyResult:
    kind: Trichotomy
    defectDim: int
    defectBasis: np.ndarray


def trichotomyClassify(
    gens: list[Mat],
    quotientTable: GroupTable | None = None,
    budgets: Budgets = defaultBudgets,
) -> TrichotomyResult:
    """Classify G = <gens> <= SL_n(k[t]/t^2), k prime, by its intersection
    with the kernel of reduction: everything (M0), trivial, or the scalars.
    """
    reduction = _reduceGenerators(gens, quotientTable, budgets)
    field = reduction.field
    n = gens[0].n
    p = field.p
    if field.d != 1:
        raise ValueError(f"classification needs a prime field, got {field.key}")
    if reduction.quotient.order != slOrder(field.q, n):
        raise ValueError("the generators do not reduce onto SL_n(k)")
    module = makeModule(ModuleKind.M, reduction.quotient)
    defects = defectSpace(module, reduction.cocycle)
    dim = len(defects)
    traces = defects[:, [(i * n + i) for i in range(n)]].sum(axis=1) % p if dim else []
    if dim and np.any(traces):
        raise TrichotomyError("kernel part is not trace zero")
    if dim == 0:
        kind = Trichotomy.ISO
    elif dim == n * n - 1:
        kind = Trichotomy.FULL
    elif (
        dim == 1
        and n % p == 0
        and rank(np.vstack([defects, scalarColumns(field, n).T]), p) == 1
    ):
        kind = Trichotomy.SCALAR_EXTENSION
    else:
        raise TrichotomyError(f"kernel part of dimension {dim} is not 0, S or M0")
    logger.info(f"trichotomy over {field.key}, n={n}: {kind.value}")
    return TrichotomyResult(kind=kind, defectDim=dim, defectBasis=defects)


# section reconstruction


@dataclass
class SectionMap:
    domain: Ring  # the quotient A
    codomain: Ring  # the ring R of the group
    table: list[int]  # x -> s(x)
    lambdaTable: list[int]  # x -> lambda_x
    checks: dict[str, bool]

    @property
    def isRingHomSection(self) -> bool:
        return all(self.checks.values())

    def describe(self) -> dict[str, str]:
        return {
            self.domain.format(x): self.codomain.format(s) for x, s in enumerate(self.table)
        }


def sectionReconstruct(
    ring: Ring, quotientRing: Ring, group: GroupTable
) -> SectionMap:
    """Recover a ring section s: quotientRing -> ring from a subgroup G of
    SL_n(ring) mapping isomorphically onto SL_n(quotientRing), through the unique
    preimages lambda_x E_1n(s(x)) of E_1n(x).
    """
    field, n = quotientRing, group.n
    if group.ring != ring:
        raise ValueError(f"the group is not over {ring.key}")
    piTable = np.array(reductionMap(ring, field), dtype=np.uint8)
    images = piTable[group.elements]
    index: dict[bytes, int] = {}
    for i in range(group.order):
        index.setdefault(images[i].tobytes(), i)
    if len(index) != group.order:
        raise ReconstructionError("reduction is not injective on G")
    if field.isField and group.order != slOrder(field.q, n):
        raise ReconstructionError(
            f"G has order {group.order}, not |SL_{n}({field.key})|"
        )

    def preimage(mat: Mat) -> Mat:
        i = index.get(mat.toArray().tobytes())
        if i is None:
            raise ReconstructionError(f"{formatMat(mat)} has no preimage in G")
        return group.element(i)

    table, lambdaTable = [], []
    for x in field.elements():
        corner = preimage(elementary(field, n, 1, n, x))
        if not isScalarCorner(corner):
            raise ReconstructionError(
                f"preimage of E_1n({field.format(x)}) is not lambda E_1n(s): "
                f"{matToData(corner)}"
            )
        scalar = corner[0, 0]
        lambdaTable.append(scalar)
        table.append(ring.mul(ring.inv(scalar), corner[0, n - 1]))

    pi = piTable.tolist()
    elements = list(field.elements())
    checks = {
        "lambdaOne": all(scalar == ring.one for scalar in lambdaTable),
        "section": all(pi[table[x]] == x for x in elements),
        "unital": table[field.one] == ring.one,
        "additive": all(
            table[field.add(x, y)] == ring.add(table[x], table[y])
            for x in elements
            for y in elements
        ),
        "multiplicative": all(
            table[field.mul(x, y)] == ring.mul(table[x], table[y])
            for x in elements
            for y in elements
        ),
        "local": all(not ring.isUnit(table[x]) for x in field.maximalIdeal),
    }
    return SectionMap(field, ring, table, lambdaTable, checks)
