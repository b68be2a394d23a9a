import random

import numpy as np
import pytest

from sldeform.matrices import (
    ElemMove,
    Mat,
    NotInvertibleError,
    batchMatmul,
    buildTij,
    commutator,
    elementary,
    formatMat,
    multiplyWord,
    parseMat,
    signMatrix,
    tijFactors,
    transposition,
)
from sldeform.rings import makeRing, ringPresets


@pytest.fixture
def z9():
    return makeRing("z9")


def test_identityAndIndexing(z9):
    identity = Mat.identity(z9, 3)
    assert [(1, 0, 0), (0, 1, 0), (0, 0, 1)] == identity.rows()
    e = elementary(z9, 3, 1, 3, 5)
    assert 5 == e[0, 2]
    assert identity == e @ elementary(z9, 3, 1, 3, z9.neg(5))


def test_matrixSizeErrors(z9):
    with pytest.raises(ValueError, match="n >= 2"):
        Mat(z9, 1, [1])
    with pytest.raises(ValueError, match="expected 9 entries"):
        Mat(z9, 3, [1, 0, 0])
    with pytest.raises(ValueError, match="i != j"):
        elementary(z9, 3, 2, 2, 1)
    with pytest.raises(IndexError):
        elementary(z9, 3, 1, 4, 1)


@pytest.mark.parametrize(
    "rows, expectedDet",
    [
        ([[1, 2, 0], [0, 1, 0], [0, 0, 1]], 1),
        ([[3, 1, 0], [1, 0, 0], [0, 0, 1]], 8),
        ([[3, 0, 0], [0, 3, 0], [0, 0, 1]], 0),
        ([[2, 0, 0], [0, 5, 0], [0, 0, 1]], 1),
        ([[0, 1, 0], [0, 0, 1], [1, 0, 0]], 1),
    ],
)
def test_det(z9, rows, expectedDet):
    mat = Mat.fromRows(z9, rows)
    assert expectedDet == mat.det()
    assert expectedDet == mat.cofactorDet()


def test_inverse(z9):
    mat = Mat.fromRows(z9, [[3, 1, 0], [1, 0, 0], [0, 4, 1]])
    assert Mat.identity(z9, 3) == mat @ mat.inverse()
    singular = Mat.fromRows(z9, [[3, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert not singular.isInvertible()
    with pytest.raises(NotInvertibleError):
        singular.inverse()


def test_batchMatmul(z9):
    rng = np.random.default_rng(0)
    a = rng.integers(0, 9, (5, 3, 3), dtype=np.uint8)
    b = rng.integers(0, 9, (5, 3, 3), dtype=np.uint8)
    products = batchMatmul(z9, a, b)
    for x, y, product in zip(a, b, products):
        expected = (x.astype(np.int64) @ y.astype(np.int64)) % 9
        assert np.array_equal(expected, product)


def test_batchMatmulGaloisRing():
    ring = makeRing("gr4_2")
    assert ring.mulTable is not None
    big = Mat.identity(ring, 2).toArray()
    assert np.array_equal(big, batchMatmul(ring, big, big))


def test_commutatorOfElementaries(z9):
    c = commutator(elementary(z9, 3, 1, 2, 2), elementary(z9, 3, 2, 3, 4))
    assert elementary(z9, 3, 1, 3, 8) == c


def test_multiplyWord(z9):
    word = [ElemMove(1, 2, 3), ElemMove(2, 3, 1), ElemMove(1, 2, 6)]
    expected = elementary(z9, 3, 1, 2, 3) @ elementary(z9, 3, 2, 3, 1)
    expected = expected @ elementary(z9, 3, 1, 2, 6)
    assert expected == multiplyWord(z9, 3, word)
    with pytest.raises(ValueError):
        ElemMove(1, 1, 2)


@pytest.mark.parametrize(
    "i, j, n, expectedFactors",
    [
        (1, 3, 3, "I"),
        (3, 1, 3, "D2(13)"),
        (1, 2, 3, "D3(23)"),
        (2, 3, 3, "D1(12)"),
        (2, 1, 3, "(31)(12)"),
        (2, 3, 4, "(12)(43)"),
        (3, 2, 4, "(13)(42)"),
    ],
)
def test_tijFactors(i, j, n, expectedFactors):
    assert expectedFactors == tijFactors(i, j, n).describe()


@pytest.mark.parametrize("key", ["z9", "gr4_2", "bc_ring"])
@pytest.mark.parametrize("n", [3, 4])
def test_tijConjugatesCorner(key, n):
    ring = makeRing(key)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            t = buildTij(i, j, n, ring)
            assert ring.one == t.det()
            for x in (ring.one, ring.size - 1):
                conjugate = t @ elementary(ring, n, 1, n, x) @ t.inverse()
                assert elementary(ring, n, i, j, x) == conjugate


def test_signedPermutations(z9):
    swap = transposition(z9, 3, 1, 3)
    assert z9.minusOne == swap.det()
    sign = signMatrix(z9, 3, 2)
    assert z9.minusOne == sign.det()
    assert Mat.identity(z9, 3) == sign @ sign


def test_formatParseMat():
    ring = makeRing("gr4_2")
    mat = elementary(ring, 3, 2, 1, ring.encode((3, 1)))
    text = formatMat(mat)
    assert (
        "[[[1,0],[0,0],[0,0]],[[3,1],[1,0],[0,0]],[[0,0],[0,0],[1,0]]]" == text
    )
    assert mat == parseMat(text, ring)
    with pytest.raises(ValueError, match="square"):
        parseMat("[[1,0],[0]]", ring)


def randomMat(ring, n, rng):
    return Mat(ring, n, (ring.randomElement(rng) for _ in range(n * n)))


@pytest.mark.parametrize("key", sorted(ringPresets))
def test_detIsMultiplicative(key):
    ring = makeRing(key)
    rng = random.Random(0)
    for _ in range(10_000):
        a, b = randomMat(ring, 3, rng), randomMat(ring, 3, rng)
        assert ring.mul(a.det(), b.det()) == (a @ b).det()


@pytest.mark.parametrize("key", sorted(ringPresets))
@pytest.mark.parametrize("n", [2, 3, 4])
def test_detMatchesCofactorExpansion(key, n):
    ring = makeRing(key)
    rng = random.Random(n)
    for _ in range(1000):
        mat = randomMat(ring, n, rng)
        assert mat.cofactorDet() == mat.det()
