"""Finite local rings in canonical form.

Every ring handled here is a quotient of a polynomial ring over Z presented by
one of three recipes:

- ``Zpm(p, m)``: Z/p^m
- ``GaloisRing(p, m, d, f)``: Z[x]/(p^m, f) with f monic of degree d,
  irreducible mod p (for m = 1 this is the field F_{p^d})
- ``SquareZeroExt(base, a)``: base[t]/(t^2, p^a t) over a ring of one of the
  two previous kinds

Elements are integer codes 0 <= code < size. A code is the mixed-radix number
formed by the element's coordinate vector, first coordinate most significant,
so code order is the lexicographic order of canonical forms. Coordinates are
the polynomial coefficients (base part first, then the t part).
"""

import itertools
import json
import logging
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Iterable, Iterator

import numpy as np
import sympy

from .base import Budgets, defaultBudgets

logger = logging.getLogger(__name__)


class RingError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


class RingKind(str, Enum):
    ZPM = "Zpm"
    GALOIS = "GaloisRing"
    SQUARE_ZERO = "SquareZeroExt"


@dataclass(frozen=True)
class RingSpec:
    kind: RingKind
    p: int
    m: int = 1
    d: int = 1
    # coefficients of the monic polynomial f, lowest degree first
    f: tuple[int, ...] = (0, 1)
    base: "RingSpec | None" = None
    tTorsion: int = 1
    name: str | None = field(default=None, compare=False)

    @classmethod
    def zpm(cls, p: int, m: int, name: str | None = None) -> "RingSpec":
        return cls(RingKind.ZPM, p, m, name=name)

    @classmethod
    def galois(
        cls, p: int, m: int, d: int, f: Iterable[int], name: str | None = None
    ) -> "RingSpec":
        return cls(RingKind.GALOIS, p, m, d, tuple(f), name=name)

    @classmethod
    def squareZero(
        cls, base: "RingSpec", tTorsion: int = 1, name: str | None = None
    ) -> "RingSpec":
        return cls(
            RingKind.SQUARE_ZERO,
            base.p,
            base.m,
            base.d,
            base.f,
            base=base,
            tTorsion=tTorsion,
            name=name,
        )

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == RingKind.ZPM:
            return f"Z/{self.p}^{self.m}"
        if self.kind == RingKind.GALOIS:
            return f"GR({self.p}^{self.m},{self.d})"
        assert self.base is not None
        return f"{self.base.label}[t]/(t^2,{self.p}^{self.tTorsion}t)"


ringPresets: dict[str, RingSpec] = {
    "f2": RingSpec.zpm(2, 1, name="f2"),
    "f3": RingSpec.zpm(3, 1, name="f3"),
    "f4": RingSpec.galois(2, 1, 2, (1, 1, 1), name="f4"),
    "z4": RingSpec.zpm(2, 2, name="z4"),
    "z9": RingSpec.zpm(3, 2, name="z9"),
    "gr4_2": RingSpec.galois(2, 2, 2, (1, 1, 1), name="gr4_2"),
    "f2_dual": RingSpec.squareZero(RingSpec.zpm(2, 1), 1, name="f2_dual"),
    "f3_dual": RingSpec.squareZero(RingSpec.zpm(3, 1), 1, name="f3_dual"),
    "f4_dual": RingSpec.squareZero(
        RingSpec.galois(2, 1, 2, (1, 1, 1)), 1, name="f4_dual"
    ),
    "bc_ring": RingSpec.squareZero(RingSpec.zpm(2, 2), 1, name="bc_ring"),
}

ringAliases = {"f3_dual_t": "f3_dual", "f2_dual_t": "f2_dual"}


def _polyMulMod(a, b, f, modulus):
    d = len(a)
    product = [0] * (2 * d - 1)
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            product[i + j] += ai * bj
    for i in range(2 * d - 2, d - 1, -1):
        c = product[i] % modulus
        if c:
            for j in range(d):
                product[i - d + j] -= c * f[j]
    return tuple(c % modulus for c in product[:d])


class Ring:
    """An immutable finite local ring handle. All arithmetic is on integer codes."""

    def __init__(self, spec: RingSpec, budgets: Budgets = defaultBudgets):
        self.spec = spec
        self.budgets = budgets
        self.p = spec.p
        self.d = spec.d
        self.q = spec.p**spec.d
        self._validate()
        if spec.kind == RingKind.SQUARE_ZERO:
            assert spec.base is not None
            self.base: Ring | None = Ring(spec.base, budgets)
            self.moduli = (spec.p**spec.m,) * spec.d + (
                spec.p**spec.tTorsion,
            ) * spec.d
        else:
            self.base = None
            self.moduli = (spec.p**spec.m,) * spec.d
        self.size = math.prod(self.moduli)
        budgets.check(f"size of {spec.label}", self.size, budgets.ringSizeCap)
        radix = []
        r = 1
        for modulus in reversed(self.moduli):
            radix.append(r)
            r *= modulus
        self._radix = tuple(reversed(radix))
        self.addTable = self.mulTable = self.negTable = None
        if self.size <= budgets.tableCap:
            self._buildTables()
        self.zero = 0
        self.one = self.encode((1,) + (0,) * (len(self.moduli) - 1))
        self.minusOne = self.neg(self.one)
        logger.debug(f"ring {spec.label} with {self.size} elements")

    def _validate(self):
        spec = self.spec
        if not sympy.isprime(spec.p):
            raise RingError(f"p must be prime, got {spec.p}")
        if spec.m < 1:
            raise RingError(f"truncation length must be >= 1, got {spec.m}")
        if spec.kind == RingKind.SQUARE_ZERO:
            if spec.base is None or spec.base.kind == RingKind.SQUARE_ZERO:
                raise RingError("a square-zero extension needs a Zpm or Galois base")
            if not 1 <= spec.tTorsion <= spec.base.m:
                raise RingError(
                    f"t torsion exponent must lie in 1..{spec.base.m}, "
                    f"got {spec.tTorsion}"
                )
            return
        if len(spec.f) != spec.d + 1 or spec.f[-1] != 1:
            raise RingError(f"f must be monic of degree {spec.d}, got {spec.f}")
        if spec.d > 1:
            x = sympy.Symbol("x")
            poly = sympy.Poly(list(reversed(spec.f)), x, modulus=spec.p)
            if not poly.is_irreducible:
                raise RingError(f"f = {poly.as_expr()} is reducible mod {spec.p}")

    def __repr__(self):
        return f"Ring({self.spec.label})"

    def __eq__(self, other):
        return isinstance(other, Ring) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    @property
    def key(self) -> str:
        return self.spec.label

    @property
    def isField(self) -> bool:
        return self.spec.kind != RingKind.SQUARE_ZERO and self.spec.m == 1

    # canonical forms

    def encode(self, coords) -> int:
        return sum(
            (c % modulus) * r for c, modulus, r in zip(coords, self.moduli, self._radix)
        )

    def decode(self, code: int) -> tuple[int, ...]:
        if self._decoded is not None:
            return self._decoded[code]
        return self._decodeRaw(code)

    def _decodeRaw(self, code):
        coords = []
        for r, modulus in zip(self._radix, self.moduli):
            c, code = divmod(code, r)
            coords.append(c)
        return tuple(coords)

    @cached_property
    def _decoded(self):
        if self.size > self.budgets.tableCap:
            return None
        return [self._decodeRaw(code) for code in range(self.size)]

    def elements(self) -> range:
        return range(self.size)

    def fromInt(self, value: int) -> int:
        return self.encode((value,) + (0,) * (len(self.moduli) - 1))

    # arithmetic

    def _buildTables(self):
        n = self.size
        add = np.zeros((n, n), dtype=np.uint8)
        mul = np.zeros((n, n), dtype=np.uint8)
        for a in range(n):
            for b in range(n):
                add[a, b] = self._addRaw(a, b)
                mul[a, b] = self._mulRaw(a, b)
        self.addTable = add
        self.mulTable = mul
        self.negTable = np.array([self._negRaw(a) for a in range(n)], dtype=np.uint8)
        self._addList = add.tolist()
        self._mulList = mul.tolist()
        self._negList = self.negTable.tolist()

    def _addRaw(self, a, b):
        return self.encode(x + y for x, y in zip(self._decodeRaw(a), self._decodeRaw(b)))

    def _negRaw(self, a):
        return self.encode(-x for x in self._decodeRaw(a))

    def _mulRaw(self, a, b):
        spec = self.spec
        ca = self._decodeRaw(a)
        cb = self._decodeRaw(b)
        if spec.kind != RingKind.SQUARE_ZERO:
            return self.encode(_polyMulMod(ca, cb, spec.f, self.moduli[0]))
        d = spec.d
        baseModulus = self.moduli[0]
        b1, t1 = ca[:d], ca[d:]
        b2, t2 = cb[:d], cb[d:]
        basePart = _polyMulMod(b1, b2, spec.f, baseModulus)
        cross1 = _polyMulMod(b1, t2, spec.f, baseModulus)
        cross2 = _polyMulMod(b2, t1, spec.f, baseModulus)
        tPart = tuple(x + y for x, y in zip(cross1, cross2))
        return self.encode(basePart + tPart)

    def add(self, a: int, b: int) -> int:
        if self.addTable is not None:
            return self._addList[a][b]
        return self._addRaw(a, b)

    def neg(self, a: int) -> int:
        if self.addTable is not None:
            return self._negList[a]
        return self._negRaw(a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.addTable is not None:
            return self._mulList[a][b]
        return self._mulRaw(a, b)

    def pow(self, a: int, e: int) -> int:
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def scale(self, k: int, a: int) -> int:
        return self.encode(k * c for c in self.decode(a))

    @cached_property
    def unitGroupOrder(self) -> int:
        return self.size - self.size // self.q

    def isUnit(self, a: int) -> bool:
        return self.residue(a) != 0

    def inv(self, a: int) -> int:
        if not self.isUnit(a):
            raise ZeroDivisionError(f"{self.format(a)} is not a unit")
        if self.spec.kind == RingKind.ZPM:
            return self.encode((pow(self.decode(a)[0], -1, self.moduli[0]),))
        result = self.pow(a, self.unitGroupOrder - 1)
        assert self.mul(a, result) == self.one
        return result

    # residue field and lifts

    @cached_property
    def residueField(self) -> "Ring":
        spec = self.spec
        if self.isField:
            return self
        if spec.d == 1:
            return Ring(RingSpec.zpm(spec.p, 1), self.budgets)
        return Ring(
            RingSpec.galois(spec.p, 1, spec.d, [c % spec.p for c in spec.f]),
            self.budgets,
        )

    def residue(self, a: int) -> int:
        coords = self.decode(a)[: self.d]
        return self.residueField.encode(c % self.p for c in coords)

    def liftDigits(self, alpha: int) -> int:
        """The naive lift: residue-field coordinates reused as ring coordinates."""
        coords = self.residueField.decode(alpha)
        return self.encode(coords + (0,) * (len(self.moduli) - self.d))

    def teichmuller(self, alpha: int) -> int:
        if self.spec.kind == RingKind.SQUARE_ZERO:
            raise RingError("Teichmüller lifts are defined on Zpm and Galois rings")
        x = self.liftDigits(alpha)
        for _ in range(self.spec.m + 1):
            y = self.pow(x, self.q)
            if y == x:
                return x
            x = y
        raise ConvergenceError(
            f"Teichmüller iteration did not stabilize for {alpha} in {self.key}"
        )

    def divideByP(self, a: int) -> int:
        """For a in pA, the residue of a/p."""
        coords = self.decode(a)[: self.d]
        if any(c % self.p for c in coords):
            raise RingError(f"{self.format(a)} is not divisible by {self.p}")
        return self.residueField.encode((c // self.p) % self.p for c in coords)

    def tCoefficient(self, a: int) -> int:
        """Residue-field image of the t coefficient (square-zero rings)."""
        if self.spec.kind != RingKind.SQUARE_ZERO:
            raise RingError(f"{self.key} has no t coordinate")
        coords = self.decode(a)[self.d :]
        return self.residueField.encode(c % self.p for c in coords)

    def fromParts(self, basePart: int, tPart: int = 0) -> int:
        """Build base + t*tPart from a base code and a t-coefficient base code."""
        assert self.base is not None
        tCoords = tuple(
            c % self.moduli[-1] for c in self.base.decode(tPart)
        )
        return self.encode(self.base.decode(basePart) + tCoords)

    def basePart(self, a: int) -> int:
        assert self.base is not None
        return self.base.encode(self.decode(a)[: self.d])

    def tElement(self) -> int:
        assert self.base is not None
        return self.fromParts(self.base.zero, self.base.one)

    @cached_property
    def maximalIdeal(self) -> list[int]:
        return [a for a in self.elements() if not self.isUnit(a)]

    @cached_property
    def units(self) -> list[int]:
        return [a for a in self.elements() if self.isUnit(a)]

    def isSquareZero(self) -> bool:
        ideal = self.maximalIdeal
        return all(self.mul(a, b) == 0 for a in ideal for b in ideal)

    def randomElement(self, rng: random.Random) -> int:
        return rng.randrange(self.size)

    # text form

    def format(self, a: int) -> str:
        coords = self.decode(a)
        if len(coords) == 1:
            return str(coords[0])
        return json.dumps(list(coords), separators=(",", ":"))

    def parse(self, text: str) -> int:
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            raise RingError(f"cannot parse ring element {text!r}")
        if isinstance(value, int):
            return self.fromInt(value)
        if not isinstance(value, list) or len(value) != len(self.moduli):
            raise RingError(
                f"{self.key} elements have {len(self.moduli)} coordinates: {text!r}"
            )
        if any(not 0 <= c < modulus for c, modulus in zip(value, self.moduli)):
            raise RingError(f"coordinates out of range in {text!r}")
        return self.encode(value)


@lru_cache(maxsize=None)
def _makeRingCached(spec: RingSpec, budgets: Budgets) -> Ring:
    return Ring(spec, budgets)


def makeRing(spec: RingSpec | str, budgets: Budgets = defaultBudgets) -> Ring:
    if isinstance(spec, str):
        spec = getRingSpec(spec)
    return _makeRingCached(spec, budgets)


def getRingSpec(key: str) -> RingSpec:
    key = ringAliases.get(key, key)
    try:
        return ringPresets[key]
    except KeyError:
        raise RingError(
            f"unknown ring {key!r}; presets: {', '.join(sorted(ringPresets))}"
        )


@dataclass(frozen=True, eq=False)
class RingElem:
    ring: Ring
    code: int

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ring.decode(self.code)

    def _other(self, other):
        if isinstance(other, int):
            return self.ring.fromInt(other)
        if other.ring != self.ring:
            raise RingError(f"mixing elements of {self.ring.key} and {other.ring.key}")
        return other.code

    def __eq__(self, other):
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.ring == other.ring and self.code == other.code

    def __hash__(self):
        return hash((self.ring.spec, self.code))

    def __add__(self, other):
        return RingElem(self.ring, self.ring.add(self.code, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElem(self.ring, self.ring.sub(self.code, self._other(other)))

    def __neg__(self):
        return RingElem(self.ring, self.ring.neg(self.code))

    def __mul__(self, other):
        return RingElem(self.ring, self.ring.mul(self.code, self._other(other)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return RingElem(self.ring, self.ring.pow(self.ring.inv(self.code), -e))
        return RingElem(self.ring, self.ring.pow(self.code, e))

    def inverse(self) -> "RingElem":
        return RingElem(self.ring, self.ring.inv(self.code))

    def isUnit(self) -> bool:
        return self.ring.isUnit(self.code)

    def __str__(self):
        return f"{self.ring.key}:{self.ring.format(self.code)}"


def parseElement(text: str, budgets: Budgets = defaultBudgets) -> RingElem:
    """Parse "z9:5" or "gr4_2:[3,1]"."""
    key, sep, value = text.partition(":")
    if not sep:
        raise RingError(f"expected '<ring>:<digits>', got {text!r}")
    ring = makeRing(key, budgets)
    return RingElem(ring, ring.parse(value))


def formatElement(element: RingElem) -> str:
    return str(element)


# verification helpers


def _tripleIterator(ring: Ring, budgets: Budgets, rng: random.Random):
    if ring.size**3 <= budgets.exhaustiveBudget:
        yield from itertools.product(ring.elements(), repeat=3)
    else:
        for _ in range(budgets.samples):
            yield tuple(ring.randomElement(rng) for _ in range(3))


def checkRingAxioms(
    ring: Ring, budgets: Budgets = defaultBudgets, seed: int = 0
) -> list[tuple[str, tuple[int, int, int]]]:
    """Return the list of axiom violations, exhaustive when small enough."""
    rng = random.Random(seed)
    failures = []
    add, mul = ring.add, ring.mul
    for a, b, c in _tripleIterator(ring, budgets, rng):
        if mul(mul(a, b), c) != mul(a, mul(b, c)):
            failures.append(("associativity", (a, b, c)))
        if mul(a, add(b, c)) != add(mul(a, b), mul(a, c)):
            failures.append(("distributivity", (a, b, c)))
        if mul(a, b) != mul(b, a):
            failures.append(("commutativity", (a, b, c)))
        if add(add(a, b), c) != add(a, add(b, c)):
            failures.append(("additive associativity", (a, b, c)))
    return failures


def checkLocal(ring: Ring, budgets: Budgets = defaultBudgets, seed: int = 0) -> bool:
    ideal = ring.maximalIdeal
    if len(ideal) * ring.size <= budgets.exhaustiveBudget:
        pairs: Iterator = itertools.product(ideal, ring.elements())
    else:
        rng = random.Random(seed)
        pairs = (
            (rng.choice(ideal), ring.randomElement(rng)) for _ in range(budgets.samples)
        )
    for a, b in pairs:
        if ring.isUnit(ring.mul(a, b)):
            return False
        if not ring.isUnit(b) and ring.isUnit(ring.add(a, b)):
            return False
    return True


# homomorphisms


def _generatorNames(ring: Ring) -> list[str]:
    names = ["x"] if ring.d > 1 else []
    if ring.spec.kind == RingKind.SQUARE_ZERO:
        names.append("t")
    return names


@dataclass(frozen=True, eq=False)
class RingHom:
    source: Ring
    target: Ring
    images: dict[str, int]

    def __call__(self, a: int) -> int:
        return self.table[a]

    def _evaluateBase(self, coords: tuple[int, ...]) -> int:
        target = self.target
        xImage = self.images.get("x", target.one)
        result = target.zero
        power = target.one
        for c in coords:
            result = target.add(result, target.mul(target.fromInt(c), power))
            power = target.mul(power, xImage)
        return result

    @cached_property
    def table(self) -> list[int]:
        source = self.source
        d = source.d
        values = []
        for a in source.elements():
            coords = source.decode(a)
            value = self._evaluateBase(coords[:d])
            if source.spec.kind == RingKind.SQUARE_ZERO:
                tValue = self._evaluateBase(coords[d:])
                value = self.target.add(
                    value, self.target.mul(tValue, self.images["t"])
                )
            values.append(value)
        return values

    def describe(self) -> dict[str, str]:
        return {name: self.target.format(code) for name, code in self.images.items()}


@dataclass
class HomSet:
    homs: list[RingHom]
    residueMismatch: bool = False

    def __len__(self):
        return len(self.homs)


def _sameResidueField(a: Ring, b: Ring) -> bool:
    fa, fb = a.residueField.spec, b.residueField.spec
    return (fa.p, fa.d, fa.f) == (fb.p, fb.d, fb.f)


def _satisfiesRelations(source: Ring, target: Ring, images: dict[str, int]) -> bool:
    spec = source.spec
    baseM = spec.m
    if target.scale(spec.p**baseM, target.one) != target.zero:
        return False
    if "x" in images:
        y = images["x"]
        value = target.zero
        power = target.one
        for c in spec.f:
            value = target.add(value, target.mul(target.fromInt(c), power))
            power = target.mul(power, y)
        if value != target.zero:
            return False
    if "t" in images:
        t = images["t"]
        if target.mul(t, t) != target.zero:
            return False
        if target.scale(spec.p**spec.tTorsion, t) != target.zero:
            return False
    return True


def enumerateHoms(
    source: Ring | RingSpec | str,
    target: Ring | RingSpec | str,
    budgets: Budgets = defaultBudgets,
) -> HomSet:
    """All cnl(k)-ring homomorphisms source -> target, by brute force over the
    images of the ring generators.
    """
    if not isinstance(source, Ring):
        source = makeRing(source, budgets)
    if not isinstance(target, Ring):
        target = makeRing(target, budgets)
    if not _sameResidueField(source, target):
        logger.warning(
            f"residue fields of {source.key} and {target.key} differ; no homs"
        )
        return HomSet([], residueMismatch=True)

    names = _generatorNames(source)
    candidates = []
    for name in names:
        if name == "x":
            xResidue = source.residue(source.encode((0, 1) + (0,) * (len(source.moduli) - 2)))
            candidates.append(
                [y for y in target.elements() if target.residue(y) == xResidue]
            )
        else:
            candidates.append(target.maximalIdeal)
    budgets.check(
        "hom candidates",
        math.prod(len(c) for c in candidates),
        budgets.enumerationCap,
    )

    homs = []
    for choice in itertools.product(*candidates):
        images = dict(zip(names, choice))
        if _satisfiesRelations(source, target, images):
            homs.append(RingHom(source, target, images))
    logger.debug(f"{len(homs)} homs {source.key} -> {target.key}")
    return HomSet(homs)


def verifyHom(hom: RingHom, budgets: Budgets = defaultBudgets) -> bool:
    """Independent full-table check of additivity, multiplicativity and the
    residue condition.
    """
    source, target = hom.source, hom.target
    table = hom.table
    if table[source.one] != target.one:
        return False
    for a in source.elements():
        if target.residue(table[a]) != source.residue(a):
            return False
    if source.size**2 > budgets.exhaustiveBudget:
        return True
    for a in source.elements():
        for b in source.elements():
            if table[source.add(a, b)] != target.add(table[a], table[b]):
                return False
            if table[source.mul(a, b)] != target.mul(table[a], table[b]):
                return False
    return True


def reductionMap(source: Ring, target: Ring) -> list[int]:
    """The catalog surjection source -> target as a code table: quotient by t
    for square-zero extensions over target, or the residue map onto the
    residue field.
    """
    if source.base is not None and source.base == target:
        return [source.basePart(a) for a in source.elements()]
    if target == source.residueField:
        return [source.residue(a) for a in source.elements()]
    raise RingError(f"no catalog surjection {source.key} -> {target.key}")
