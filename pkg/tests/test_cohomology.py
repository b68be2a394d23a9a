import random

import numpy as np
import pytest

from sldeform.base import Budgets, BudgetExceededError
from sldeform.cohomology import (
    Cochain1,
    ExtensionVariant,
    GaschutzError,
    ModuleError,
    ModuleKind,
    checkAction,
    checkCocycleIdentity,
    checkKernelDeterminant,
    coordsToMat,
    defectSpace,
    equivariantHomDim,
    fixedPointDim,
    h1Dim,
    makeExtension,
    makeModule,
    matCoords,
    sameSubspace,
    scalarColumns,
    globalSplitVerdict,
    splittingDecide,
    submoduleLattice,
    wittLength2,
)
from sldeform.groups import closure, specialLinear, sylowUnitriangular
from sldeform.matrices import Mat, elementary
from sldeform.rings import makeRing


@pytest.fixture(scope="module")
def sl3f3():
    return specialLinear(makeRing("f3"), 3)


@pytest.fixture(scope="module")
def sl3f4():
    return specialLinear(makeRing("f4"), 3, compact=True)


@pytest.mark.parametrize(
    "kind, expectedDim",
    [
        (ModuleKind.M, 9),
        (ModuleKind.M0, 8),
        (ModuleKind.S, 1),
        (ModuleKind.V, 7),
        (ModuleKind.TRIVIAL, 1),
    ],
)
def test_moduleDimensions(sl3f3, kind, expectedDim):
    module = makeModule(kind, sl3f3)
    assert expectedDim == module.dim
    assert expectedDim == module.dimK


def test_moduleDimensionsOverF4(sl3f4):
    module = makeModule(ModuleKind.M0, sl3f4)
    assert 16 == module.dim
    assert 8 == module.dimK
    assert module.kAction is not None


def test_moduleErrors(sl3f4):
    with pytest.raises(ModuleError, match=r"needs p \| n"):
        makeModule(ModuleKind.V, sl3f4)
    ring = makeRing("z9")
    group = closure([elementary(ring, 3, 1, 2, 1)])
    with pytest.raises(ModuleError, match="residue field"):
        makeModule(ModuleKind.M, group)


def test_checkAction(sl3f3):
    for kind in (ModuleKind.M0, ModuleKind.V):
        assert checkAction(makeModule(kind, sl3f3), samples=200)


def test_coordinates(sl3f3):
    field = makeRing("f3")
    mat = Mat.fromRows(field, [[1, 2, 0], [0, 0, 1], [2, 1, 2]])
    assert mat == coordsToMat(field, 3, matCoords(mat))
    m0 = makeModule(ModuleKind.M0, sl3f3)
    traceZero = Mat.fromRows(field, [[1, 2, 0], [0, 0, 1], [2, 1, 2]])
    assert 0 == traceZero.trace()
    coordinates = m0.coordinates(matCoords(traceZero))
    assert np.array_equal(matCoords(traceZero), m0.toM(coordinates))


@pytest.mark.parametrize(
    "kind, expectedFixed",
    [
        (ModuleKind.M, 1),
        (ModuleKind.M0, 1),
        (ModuleKind.TRIVIAL, 1),
    ],
)
def test_fixedPoints(sl3f3, kind, expectedFixed):
    assert expectedFixed == fixedPointDim(makeModule(kind, sl3f3))


def test_fixedPointsOverF4(sl3f4):
    assert 0 == fixedPointDim(makeModule(ModuleKind.M0, sl3f4))
    assert 2 == fixedPointDim(makeModule(ModuleKind.M, sl3f4))


def test_submoduleLatticeOverF3(sl3f3):
    m0 = makeModule(ModuleKind.M0, sl3f3)
    lattice = submoduleLattice(m0)
    assert 1 == len(lattice)
    scalarLine = m0.coordinates(scalarColumns(makeRing("f3"), 3)).T
    assert sameSubspace(lattice[0], scalarLine, 3)


def test_submoduleLatticeOverF4(sl3f4):
    m0 = makeModule(ModuleKind.M0, sl3f4)
    assert [] == submoduleLattice(m0)


def test_submoduleLatticeOverF4IgnoringScalars(sl3f4):
    # M0 and its Frobenius twist are not isomorphic, so no F_2-subspace is stable
    m0 = makeModule(ModuleKind.M0, sl3f4)
    assert [] == submoduleLattice(m0, useKStructure=False)


def test_submoduleLatticeOfV(sl3f3):
    assert [] == submoduleLattice(makeModule(ModuleKind.V, sl3f3))


def test_submoduleLatticeBudget(sl3f3):
    with pytest.raises(BudgetExceededError):
        submoduleLattice(
            makeModule(ModuleKind.M, sl3f3), budgets=Budgets(vectorCap=100)
        )


@pytest.mark.parametrize(
    "src, dst, expectedDim",
    [
        (ModuleKind.M0, ModuleKind.M0, 1),
        (ModuleKind.V, ModuleKind.V, 1),
        (ModuleKind.M0, ModuleKind.TRIVIAL, 0),
        (ModuleKind.S, ModuleKind.M0, 1),
    ],
)
def test_equivariantHomDim(sl3f3, src, dst, expectedDim):
    dim = equivariantHomDim(makeModule(src, sl3f3), makeModule(dst, sl3f3))
    assert expectedDim == dim.k


@pytest.mark.parametrize(
    "kind, expectedH1",
    [
        (ModuleKind.M, 0),
        (ModuleKind.M0, 1),
        (ModuleKind.V, 1),
        (ModuleKind.TRIVIAL, 0),
    ],
)
def test_h1OverF3(sl3f3, kind, expectedH1):
    result = h1Dim(sl3f3, makeModule(kind, sl3f3))
    assert expectedH1 == result.k
    assert expectedH1 == result.fp
    assert result.cocyclesFp == result.fp + result.coboundariesFp


def test_h1OverF4(sl3f4):
    result = h1Dim(sl3f4, makeModule(ModuleKind.M0, sl3f4))
    assert 0 == result.k
    assert 16 == result.coboundariesFp


def test_h1DoesNotDependOnGenerators(sl3f3):
    compact = specialLinear(makeRing("f3"), 3, compact=True)
    result = h1Dim(compact, makeModule(ModuleKind.M0, compact))
    assert 1 == result.k
    assert sl3f3.numGens != compact.numGens


def test_h1NeedsMatchingGroup(sl3f3):
    other = specialLinear(makeRing("f3"), 3, compact=True)
    with pytest.raises(ModuleError):
        h1Dim(sl3f3, makeModule(ModuleKind.M0, other))


def test_coboundaryIsCrossedHom(sl3f3):
    module = makeModule(ModuleKind.M0, sl3f3)
    rng = np.random.default_rng(0)
    v = rng.integers(0, 3, module.dim)
    values = np.array([(module.act(g, v) - v) % 3 for g in range(sl3f3.order)])
    assert Cochain1(module, values).isCrossedHom()
    genValues = values[sl3f3.cayley[0]]
    assert 0 == len(defectSpace(module, genValues))


def test_defectSpaceOfNonCocycle(sl3f3):
    module = makeModule(ModuleKind.M, sl3f3)
    genValues = np.zeros((sl3f3.numGens, module.dim), dtype=np.int64)
    genValues[0, 0] = 1
    assert 0 < len(defectSpace(module, genValues))


def test_wittLength2():
    assert makeRing("z9") == wittLength2(makeRing("f3"))
    assert makeRing("gr4_2") == wittLength2(makeRing("f4"))


def test_extensionLiftAndKernel(sl3f3):
    ext = makeExtension(makeRing("f3"), 3)
    assert ModuleKind.M0 == ext.kernelKind
    rng = random.Random(0)
    for _ in range(20):
        g = sl3f3.element(sl3f3.randomIndex(rng))
        lift = ext.lift(g)
        assert ext.big.one == lift.det()
        assert g == ext.reduce(lift)
    x = Mat.fromRows(makeRing("f3"), [[1, 2, 0], [0, 0, 1], [2, 1, 2]])
    assert x == ext.kernelMatrix(ext.epsilon(x))


def test_extensionErrors():
    with pytest.raises(ModuleError, match=r"needs p \| n"):
        makeExtension(makeRing("f3"), 4, ExtensionVariant.SCALAR_QUOTIENT)
    with pytest.raises(ValueError, match="lift mode"):
        makeExtension(makeRing("f3"), 3, liftMode="random")
    with pytest.raises(ModuleError, match="over a field"):
        makeExtension(makeRing("z9"), 3)


def test_canonicalCosetRepresentative(sl3f3):
    ext = makeExtension(makeRing("f3"), 3, ExtensionVariant.SCALAR_QUOTIENT)
    big = ext.big
    rng = random.Random(1)
    for _ in range(20):
        lift = ext.lift(sl3f3.element(sl3f3.randomIndex(rng)))
        for a in (1, 2):
            scalar = big.add(big.one, big.scale(3, big.fromInt(a)))
            assert ext.canonical(lift) == ext.canonical(lift.scaled(scalar))


def test_canonicalClearsCornerDigit(sl3f3):
    ext = makeExtension(makeRing("f3"), 3, ExtensionVariant.SCALAR_QUOTIENT)
    big = ext.big
    rng = random.Random(3)
    checked = 0
    for _ in range(40):
        corner = ext.canonical(ext.lift(sl3f3.element(sl3f3.randomIndex(rng))))[0, 0]
        if big.isUnit(corner):
            digit = big.divideByP(big.sub(corner, big.liftDigits(big.residue(corner))))
            assert ext.field.zero == digit
            checked += 1
    assert checked


@pytest.mark.parametrize(
    "variant", [ExtensionVariant.FULL, ExtensionVariant.SCALAR_QUOTIENT]
)
def test_cocycleIdentity(sl3f3, variant):
    ext = makeExtension(makeRing("f3"), 3, variant)
    rng = random.Random(2)
    elements = [sl3f3.element(sl3f3.randomIndex(rng)) for _ in range(30)]
    assert 0 == checkCocycleIdentity(ext, elements, samples=200)


@pytest.mark.parametrize("key", ["z9", "gr4_2", "z4"])
def test_kernelDeterminant(key):
    assert 0 == checkKernelDeterminant(makeRing(key), 3, samples=500)


def test_splitOverF2():
    ext = makeExtension(makeRing("f2"), 3)
    result = splittingDecide(ext, ext.quotient, requireGaschutz=True)
    assert result.split
    assert result.globalSplit
    assert 168 == len(result.section)
    assert result.cochain is not None
    assert result.certificate()["sectionVerified"]


@pytest.mark.parametrize(
    "key, variant",
    [
        ("f3", ExtensionVariant.FULL),
        ("f4", ExtensionVariant.FULL),
        ("f3", ExtensionVariant.SCALAR_QUOTIENT),
    ],
)
def test_nonSplitOverSylow(key, variant):
    field = makeRing(key)
    ext = makeExtension(field, 3, variant)
    sylow = sylowUnitriangular(field, 3)
    result = splittingDecide(ext, sylow, requireGaschutz=True)
    assert not result.split
    assert result.globalSplit is False
    assert result.section is None


@pytest.mark.parametrize("liftMode", ["teichmuller", "digits"])
def test_splitVerdictIgnoresLiftMode(liftMode):
    field = makeRing("f3")
    ext = makeExtension(field, 3, liftMode=liftMode)
    assert not splittingDecide(ext, sylowUnitriangular(field, 3)).split


def test_generalLinearNonSplitOverF3(sl3f3):
    ext = makeExtension(makeRing("f3"), 3, ExtensionVariant.GENERAL_LINEAR)
    assert ModuleKind.M == ext.kernelKind
    result = splittingDecide(ext, sl3f3)
    assert not result.split
    assert result.globalSplit is False


def test_gaschutzIndexCondition():
    field = makeRing("f3")
    ext = makeExtension(field, 3)
    small = closure([elementary(field, 3, 1, 2, 1)])
    assert 3 == small.order
    result = splittingDecide(ext, small)
    assert result.globalSplit is None
    with pytest.raises(GaschutzError):
        splittingDecide(ext, small, requireGaschutz=True)


@pytest.mark.parametrize(
    "subgroupOrder, split, expected",
    [
        (5616, True, True),
        (5616, False, False),
        (27, True, True),
        (27, False, False),
        (3, True, None),
        (3, False, False),
    ],
)
def test_globalSplitVerdict(subgroupOrder, split, expected):
    ext = makeExtension(makeRing("f3"), 3)
    assert expected == globalSplitVerdict(ext, subgroupOrder, split)


def test_globalSplitVerdictErrors():
    ext = makeExtension(makeRing("f3"), 3)
    with pytest.raises(ValueError, match="does not divide"):
        globalSplitVerdict(ext, 5, True)
    with pytest.raises(GaschutzError):
        globalSplitVerdict(ext, 3, True, requireGaschutz=True)
    assert globalSplitVerdict(ext, 3, False, requireGaschutz=True) is False
