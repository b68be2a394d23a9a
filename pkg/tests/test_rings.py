import pytest

from sldeform.base import Budgets
from sldeform.rings import (
    RingElem,
    RingError,
    RingSpec,
    checkLocal,
    checkRingAxioms,
    enumerateHoms,
    formatElement,
    getRingSpec,
    makeRing,
    parseElement,
    reductionMap,
    verifyHom,
)


@pytest.mark.parametrize(
    "key, expectedSize, expectedField",
    [
        ("f2", 2, True),
        ("f3", 3, True),
        ("f4", 4, True),
        ("z4", 4, False),
        ("z9", 9, False),
        ("gr4_2", 16, False),
        ("f2_dual", 4, False),
        ("f3_dual", 9, False),
        ("f4_dual", 16, False),
        ("bc_ring", 8, False),
    ],
)
def test_ringSize(key, expectedSize, expectedField):
    ring = makeRing(key)
    assert expectedSize == ring.size
    assert expectedField == ring.isField


@pytest.mark.parametrize("key", ["f4", "z9", "gr4_2", "f3_dual", "bc_ring"])
def test_ringAxioms(key):
    ring = makeRing(key)
    assert [] == checkRingAxioms(ring)
    assert checkLocal(ring)


@pytest.mark.parametrize("key", ["z9", "gr4_2", "f3_dual", "bc_ring"])
def test_maximalIdealSquaresToZero(key):
    ring = makeRing(key)
    assert ring.isSquareZero()
    assert ring.size // ring.q == len(ring.maximalIdeal)


def test_ringAliases():
    assert getRingSpec("f3_dual_t") == getRingSpec("f3_dual")


def test_unknownRing():
    with pytest.raises(RingError, match="unknown ring"):
        getRingSpec("z7")


@pytest.mark.parametrize(
    "spec, message",
    [
        (RingSpec.zpm(6, 1), "p must be prime"),
        (RingSpec.zpm(3, 0), "truncation length"),
        (RingSpec.galois(2, 1, 2, (1, 0, 1)), "reducible"),
        (RingSpec.galois(2, 1, 2, (1, 1)), "monic"),
        (RingSpec.squareZero(RingSpec.zpm(3, 1), 2), "t torsion"),
    ],
)
def test_invalidSpecs(spec, message):
    with pytest.raises(RingError, match=message):
        makeRing(spec)


def test_ringSizeCap():
    budgets = Budgets(ringSizeCap=8)
    with pytest.raises(Exception, match="exceeds the configured cap"):
        makeRing(RingSpec.zpm(3, 2), budgets)


def test_codeOrderIsLexicographic():
    ring = makeRing("gr4_2")
    decoded = [ring.decode(a) for a in ring.elements()]
    assert decoded == sorted(decoded)
    assert (0, 0) == decoded[ring.zero]
    assert (1, 0) == ring.decode(ring.one)


@pytest.mark.parametrize(
    "key, alpha, expected",
    [
        ("z9", 2, 8),
        ("z9", 1, 1),
        ("z9", 0, 0),
        ("z4", 1, 1),
    ],
)
def test_teichmuller(key, alpha, expected):
    ring = makeRing(key)
    assert expected == ring.teichmuller(alpha)


def test_teichmullerIsMultiplicative():
    ring = makeRing("gr4_2")
    field = ring.residueField
    for a in field.elements():
        lift = ring.teichmuller(a)
        assert ring.pow(lift, ring.q) == lift
        assert ring.residue(lift) == a
        for b in field.elements():
            assert ring.teichmuller(field.mul(a, b)) == ring.mul(lift, ring.teichmuller(b))


def test_teichmullerNeedsGaloisRing():
    with pytest.raises(RingError):
        makeRing("f3_dual").teichmuller(1)


@pytest.mark.parametrize("key", ["z9", "gr4_2", "f4", "bc_ring"])
def test_inverses(key):
    ring = makeRing(key)
    for a in ring.units:
        assert ring.one == ring.mul(a, ring.inv(a))
    for a in ring.maximalIdeal:
        with pytest.raises(ZeroDivisionError):
            ring.inv(a)


def test_ringElem():
    a = parseElement("z9:5")
    b = parseElement("z9:7")
    assert parseElement("z9:3") == a + b
    assert parseElement("z9:8") == a * b
    assert parseElement("z9:1") == a * a.inverse()
    assert parseElement("z9:7") == a**-1 * 8
    assert "z9:5" == formatElement(a)


def test_ringElemMixing():
    a = parseElement("z9:5")
    b = RingElem(makeRing("f3"), 1)
    with pytest.raises(RingError, match="mixing"):
        a + b


@pytest.mark.parametrize(
    "text",
    ["z9", "z9:[1,2]", "gr4_2:[4,0]", "gr4_2:x"],
)
def test_parseElementErrors(text):
    with pytest.raises(RingError):
        parseElement(text)


def test_formatParse():
    ring = makeRing("f3_dual")
    for a in ring.elements():
        assert a == ring.parse(ring.format(a))


@pytest.mark.parametrize(
    "source, target, expectedCount",
    [
        ("f3", "z9", 0),
        ("f3", "f3_dual", 1),
        ("f3", "f3", 1),
        ("f3_dual", "f3_dual", 3),
        ("f3_dual", "f3", 1),
        ("bc_ring", "f2_dual", 2),
        ("f4", "f4_dual", 1),
        ("z4", "f2", 1),
        ("z9", "z9", 1),
    ],
)
def test_enumerateHoms(source, target, expectedCount):
    homs = enumerateHoms(source, target)
    assert expectedCount == len(homs)
    for hom in homs.homs:
        assert verifyHom(hom)


def test_enumerateHomsResidueMismatch():
    homs = enumerateHoms("f3", "f2_dual")
    assert 0 == len(homs)
    assert homs.residueMismatch


def test_reductionMap():
    ring = makeRing("f3_dual")
    assert ring.base is not None
    table = reductionMap(ring, ring.base)
    assert [ring.basePart(a) for a in ring.elements()] == table
    z9 = makeRing("z9")
    assert [a % 3 for a in range(9)] == reductionMap(z9, z9.residueField)
    with pytest.raises(RingError, match="no catalog surjection"):
        reductionMap(makeRing("f3"), makeRing("z9"))
