import random

import pytest

from sldeform.base import BudgetExceededError, Budgets, Verdict
from sldeform.matrices import Mat, elementary, multiplyWord
from sldeform.rings import makeRing
from sldeform.sln import (
    checkCommutatorWitness,
    commutantClassify,
    commutantReport,
    commutatorWitness,
    conjugationCheck,
    decompositionBound,
    elementaryDecompose,
    expectedCommutant,
    isScalarCorner,
    randomElementaryProduct,
    steinbergCheck,
)


@pytest.mark.parametrize(
    "key, n",
    [
        ("z4", 3),
        ("z9", 3),
        ("f3_dual", 3),
        ("f2", 4),
    ],
)
def test_steinbergExhaustive(key, n):
    report = steinbergCheck(makeRing(key), n)
    assert Verdict.PASS == report.verdict
    assert "exhaustive" == report.certificate["mode"]
    assert report.seed is None
    size = makeRing(key).size
    assert n * (n - 1) * size**2 == report.certificate["checked"]["a"]


def test_steinbergSampled():
    budgets = Budgets(samples=300)
    report = steinbergCheck(makeRing("gr4_2"), 4, "sampled", budgets, seed=3)
    assert report.passed
    assert {"a": 100, "b": 100, "c": 100} == report.certificate["checked"]
    assert 3 == report.seed


def test_steinbergBudget():
    budgets = Budgets(exhaustiveBudget=100)
    with pytest.raises(BudgetExceededError):
        steinbergCheck(makeRing("z9"), 3, "exhaustive", budgets)
    budgets = Budgets(exhaustiveBudget=100, samples=30)
    report = steinbergCheck(makeRing("z9"), 3, "auto", budgets)
    assert "sampled" == report.certificate["mode"]


def test_steinbergNeedsNAtLeast3():
    with pytest.raises(ValueError):
        steinbergCheck(makeRing("z9"), 2)


@pytest.mark.parametrize("key", ["z9", "gr4_2", "bc_ring"])
def test_elementaryDecompose(key):
    ring = makeRing(key)
    rng = random.Random(1)
    for _ in range(50):
        mat = randomElementaryProduct(ring, 3, rng)
        word = elementaryDecompose(mat)
        assert mat == multiplyWord(ring, 3, word)
        assert len(word) <= decompositionBound(3)


def test_elementaryDecomposeNonUnitPivot():
    ring = makeRing("z9")
    mat = Mat.fromRows(ring, [[3, 1, 0], [8, 0, 0], [0, 0, 1]])
    assert ring.one == mat.det()
    word = elementaryDecompose(mat)
    assert mat == multiplyWord(ring, 3, word)


def test_elementaryDecomposeNeedsDeterminantOne():
    ring = makeRing("z9")
    mat = Mat.fromRows(ring, [[2, 0, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValueError, match="determinant"):
        elementaryDecompose(mat)


@pytest.mark.parametrize("key, n", [("z9", 3), ("gr4_2", 4), ("f3_dual", 5)])
def test_conjugationCheck(key, n):
    report = conjugationCheck(makeRing(key), n)
    assert report.passed
    assert n * (n - 1) * makeRing(key).size == report.certificate["checked"]


@pytest.mark.parametrize("key, expectedCount", [("f2", 2), ("f3", 6)])
def test_commutantClassify(key, expectedCount):
    ring = makeRing(key)
    found = commutantClassify(ring, 3)
    assert expectedCount == len(found)
    assert set(found) == expectedCommutant(ring, 3)
    assert all(isScalarCorner(mat) for mat in found)


def test_commutantReport():
    report = commutantReport(makeRing("f3"), 3)
    assert report.passed
    assert 6 == report.certificate["count"]


def test_commutantBudget():
    with pytest.raises(BudgetExceededError):
        commutantClassify(makeRing("z4"), 3, Budgets(enumerationCap=1000))


def test_isScalarCorner():
    ring = makeRing("z9")
    corner = Mat.scalar(ring, 3, 2) @ elementary(ring, 3, 1, 3, 4)
    assert isScalarCorner(corner)
    assert not isScalarCorner(elementary(ring, 3, 1, 2, 4))
    assert not isScalarCorner(Mat.scalar(ring, 3, 3))


def test_commutatorWitness():
    ring = makeRing("z9")
    a, b = commutatorWitness(ring, 3, 1, 5, 3)
    assert elementary(ring, 3, 3, 2, 5) == a
    assert elementary(ring, 3, 2, 1, 1) == b
    for i, j in [(1, 2), (2, 3), (3, 1)]:
        for x in ring.elements():
            assert checkCommutatorWitness(ring, i, j, x, 3)
