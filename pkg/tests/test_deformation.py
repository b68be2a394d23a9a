import random

import pytest

from sldeform.deformation import (
    CocycleInconsistencyError,
    LiftError,
    LiftProblem,
    ReconstructionError,
    Trichotomy,
    TrichotomyError,
    constantCopy,
    embedding,
    findConjugator,
    fullKernelGenerators,
    kernelElement,
    liftClasses,
    randomTwist,
    scalarExtensionGenerators,
    sectionReconstruct,
    trichotomyClassify,
    universalPropertyAudit,
)
from sldeform.groups import closure, specialLinear
from sldeform.matrices import Mat
from sldeform.rings import RingSpec, makeRing, reductionMap
from sldeform.suites import SuiteOptions, runSuite, withBudgets


@pytest.fixture(scope="module")
def sl3f3():
    return specialLinear(makeRing("f3"), 3)


@pytest.fixture(scope="module")
def dual():
    return makeRing("f3_dual")


def reducedClosure(ring, gens):
    table = reductionMap(ring, ring.base)
    return closure([g.map(table, ring.base) for g in gens])


@pytest.fixture(scope="module")
def constantQuotient(dual):
    return reducedClosure(dual, constantCopy(dual, 3))


@pytest.mark.parametrize(
    "targetKey, expectedClasses, expectedObstructed",
    [
        ("f3", 1, False),
        ("f3_dual", 1, False),
        ("z9", 0, True),
    ],
)
def test_liftClasses(sl3f3, targetKey, expectedClasses, expectedObstructed):
    count = liftClasses(LiftProblem(sl3f3, makeRing(targetKey)))
    assert expectedClasses == count.classes
    assert expectedObstructed == count.obstructed


def test_liftClassesIdealDimension(sl3f3):
    count = liftClasses(LiftProblem(sl3f3, makeRing("f3_dual")))
    assert 1 == count.idealDim
    assert 0 == count.h1Fp


def test_liftProblemValidation(sl3f3):
    with pytest.raises(LiftError, match="residue field"):
        LiftProblem(sl3f3, makeRing("f2_dual"))
    with pytest.raises(LiftError, match="square to 0"):
        LiftProblem(sl3f3, makeRing(RingSpec.zpm(3, 3)))
    group = closure(constantCopy(makeRing("f3_dual"), 3)[:1])
    with pytest.raises(LiftError, match="not a residue field"):
        LiftProblem(group, makeRing("f3_dual"))


def test_universalPropertyAudit(sl3f3):
    targets = [makeRing(key) for key in ("f3", "f3_dual", "z9")]
    report = universalPropertyAudit(sl3f3, targets)
    assert report.passed
    assert [1, 1, 0] == [row["liftClasses"] for row in report.certificate["targets"]]
    assert [1, 1, 0] == [row["homs"] for row in report.certificate["targets"]]


def test_liftClassesConjugationInvariant(sl3f3):
    field = makeRing("f3")
    x = Mat.fromRows(field, [[1, 1, 0], [0, 2, 0], [1, 0, 1]])
    assert x.isInvertible()
    problem = LiftProblem(sl3f3, makeRing("f3_dual"))
    assert liftClasses(problem) == liftClasses(problem.conjugated(x))


def test_embeddingAndKernelElement(dual):
    field = dual.base
    table = embedding(dual)
    assert [dual.basePart(a) for a in table] == list(field.elements())
    y = Mat.fromRows(field, [[0, 1, 2], [1, 0, 0], [0, 0, 2]])
    x = kernelElement(dual, y)
    assert Mat.identity(dual, 3) == x @ kernelElement(dual, Mat.scalar(field, 3, 0) - y)


def test_constantCopy(dual):
    gens = constantCopy(dual, 3)
    assert 6 == len(gens)
    assert all(dual.one == g.det() for g in gens)


def test_scalarExtensionNeedsDivisibility(dual):
    with pytest.raises(ValueError):
        scalarExtensionGenerators(dual, 4)


def test_findConjugator(dual, constantQuotient):
    constant = constantCopy(dual, 3)
    rng = random.Random(0)
    for _ in range(10):
        x0, twisted = randomTwist(constant, rng)
        result = findConjugator(twisted, constantQuotient)
        assert constant == [result.x @ g @ result.x.inverse() for g in twisted]
        assert 5616 == result.quotient.order


def test_findConjugatorWithoutQuotient(dual):
    constant = constantCopy(dual, 3)
    _, twisted = randomTwist(constant, random.Random(5))
    result = findConjugator(twisted)
    assert constant == [result.x @ g @ result.x.inverse() for g in twisted]


def test_findConjugatorRejectsKernel(dual):
    gens = scalarExtensionGenerators(dual, 3)
    with pytest.raises(CocycleInconsistencyError, match="defect"):
        findConjugator(gens, reducedClosure(dual, gens))


def test_findConjugatorChecksQuotient(dual, constantQuotient):
    gens = scalarExtensionGenerators(dual, 3)
    with pytest.raises(ValueError, match="different generators"):
        findConjugator(gens, constantQuotient)


@pytest.mark.parametrize(
    "makeGenerators, expectedKind, expectedDim",
    [
        (constantCopy, Trichotomy.ISO, 0),
        (fullKernelGenerators, Trichotomy.FULL, 8),
        (scalarExtensionGenerators, Trichotomy.SCALAR_EXTENSION, 1),
    ],
)
def test_trichotomyClassify(dual, makeGenerators, expectedKind, expectedDim):
    gens = makeGenerators(dual, 3)
    quotient = reducedClosure(dual, gens)
    rng = random.Random(7)
    for _ in range(3):
        _, twisted = randomTwist(gens, rng)
        result = trichotomyClassify(twisted, quotient)
        assert expectedKind == result.kind
        assert expectedDim == result.defectDim


def test_trichotomyRejectsOtherKernels(dual):
    field = dual.base
    gens = constantCopy(dual, 3)
    entries = [field.zero] * 9
    entries[0] = field.one
    gens.append(kernelElement(dual, Mat(field, 3, entries)))
    with pytest.raises(TrichotomyError):
        trichotomyClassify(gens, reducedClosure(dual, gens))


def test_trichotomyNeedsFullImage(dual):
    gens = constantCopy(dual, 3)[:1]
    with pytest.raises(ValueError, match="do not reduce onto"):
        trichotomyClassify(gens)


def test_sectionReconstruct(dual):
    group = closure(constantCopy(dual, 3))
    assert 5616 == group.order
    section = sectionReconstruct(dual, dual.base, group)
    assert section.isRingHomSection
    assert embedding(dual) == section.table
    assert section.checks["lambdaOne"]
    assert all(dual.one == scalar for scalar in section.lambdaTable)
    assert {"0": "[0,0]", "1": "[1,0]", "2": "[2,0]"} == section.describe()


def test_sectionReconstructNeedsIsomorphicImage(dual):
    group = closure(constantCopy(dual, 3)[:1])
    with pytest.raises(ReconstructionError, match="order"):
        sectionReconstruct(dual, dual.base, group)


def test_sectionReconstructAfterTwist(dual, constantQuotient):
    constant = constantCopy(dual, 3)
    baseline = sectionReconstruct(dual, dual.base, closure(constant))
    rng = random.Random(11)
    for _ in range(3):
        _, twisted = randomTwist(constant, rng)
        result = findConjugator(twisted, constantQuotient)
        normalized = [result.x @ g @ result.x.inverse() for g in twisted]
        section = sectionReconstruct(dual, dual.base, closure(normalized))
        assert section.isRingHomSection
        assert baseline.table == section.table
        assert baseline.lambdaTable == section.lambdaTable


def test_reconstructSuiteRebuildsEachTwist():
    options = withBudgets(SuiteOptions(ring="f3_dual_t", n=3, twistSeed=7), samples=2)
    (report,) = runSuite("reconstruct", options)
    assert report.passed
    assert 7 == report.seed
    assert 2 == report.certificate["normalizedTwists"]
    assert all(report.certificate["checks"].values())
