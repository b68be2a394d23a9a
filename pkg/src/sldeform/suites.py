"""Verification suites. Each suite takes SuiteOptions and returns Reports;
runSuite adds timing and turns budget exhaustion into a skipped verdict.

Without selectors a suite runs its default cases. The selectors (ring, field,
n, module, variant, subgroup, targets, twistSeed) narrow it to one case each;
checkSelection rejects selectors a suite does not use and combinations it
cannot run.
"""

import asyncio
import logging
import pathlib
import random
import time
from dataclasses import dataclass, replace
from typing import Callable

from .base import BudgetExceededError, Budgets, Report, Verdict, defaultBudgets
from .cohomology import (
    ExtensionVariant,
    ModuleKind,
    checkAction,
    checkCocycleIdentity,
    checkKernelDeterminant,
    equivariantHomDim,
    h1Dim,
    makeExtension,
    makeModule,
    sameSubspace,
    scalarColumns,
    splittingDecide,
    submoduleLattice,
)
from .deformation import (
    LiftProblem,
    Trichotomy,
    constantCopy,
    embedding,
    findConjugator,
    fullKernelGenerators,
    liftClasses,
    randomTwist,
    scalarExtensionGenerators,
    sectionReconstruct,
    trichotomyClassify,
    universalPropertyAudit,
)
from .groups import (
    GroupTable,
    GroupTableCache,
    closure,
    compactGenerators,
    elementaryGenerators,
    slOrder,
    sylowUnitriangular,
)
from .matrices import Mat, formatMat, matToData
from .rings import Ring, makeRing
from .sln import (
    checkCommutatorWitness,
    commutantReport,
    conjugationCheck,
    decompositionBound,
    elementaryDecompose,
    randomElementaryProduct,
    steinbergCheck,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SuiteOptions:
    ring: str | None = None
    field: str | None = None
    n: int | None = None
    mode: str = "auto"
    seed: int = 0
    budgets: Budgets = defaultBudgets
    cacheDir: str | pathlib.Path | None = None
    # a ModuleKind value
    module: str | None = None
    # an ExtensionVariant value
    variant: str | None = None
    # "full" or "sylow"
    subgroup: str | None = None
    targets: tuple[str, ...] | None = None
    twistSeed: int | None = None

    def makeRing(self, key: str) -> Ring:
        return makeRing(key, self.budgets)

    def closure(self, gens: list[Mat]) -> GroupTable:
        if self.cacheDir is None:
            return closure(gens, budgets=self.budgets)
        return GroupTableCache(self.cacheDir, self.budgets).closure(gens)

    def specialLinear(self, field: Ring, n: int, compact: bool = False) -> GroupTable:
        gens = compactGenerators(field, n) if compact else elementaryGenerators(field, n)
        return self.closure(gens)

    def trials(self, wanted: int) -> int:
        return max(1, min(wanted, self.budgets.samples))

    def selects(self, *names: str) -> bool:
        return any(getattr(self, name) is not None for name in names)


def _cases(options: SuiteOptions, defaults: list[tuple[str, int]], key: str = "ring"):
    chosen = getattr(options, key)
    if chosen is None and options.n is None:
        return defaults
    keys = [chosen] if chosen is not None else sorted({k for k, _ in defaults})
    ns = [options.n] if options.n is not None else sorted({n for _, n in defaults})
    return [(k, n) for k in keys for n in ns]


# sln


def steinbergSuite(options: SuiteOptions) -> list[Report]:
    defaults = [("z4", 3), ("z9", 3), ("gr4_2", 3), ("f3_dual", 3)]
    defaults += [("f2", 4), ("f2", 5), ("f3", 4), ("f3", 5)]
    return [
        steinbergCheck(options.makeRing(key), n, options.mode, options.budgets, options.seed)
        for key, n in _cases(options, defaults)
    ]


def conjugationSuite(options: SuiteOptions) -> list[Report]:
    defaults = [(key, n) for key in ("z9", "gr4_2") for n in (3, 4, 5)]
    return [
        conjugationCheck(options.makeRing(key), n) for key, n in _cases(options, defaults)
    ]


def commutantSuite(options: SuiteOptions) -> list[Report]:
    defaults = [("f2", 3), ("f3", 3)]
    return [
        commutantReport(options.makeRing(key), n, options.budgets)
        for key, n in _cases(options, defaults)
    ]


def _decomposeReport(ring: Ring, n: int, elements, label: str) -> Report:
    report = Report("decompose", "elementary-generation")
    bound = decompositionBound(n)
    longest = 0
    count = 0
    for mat in elements:
        word = elementaryDecompose(mat)
        count += 1
        longest = max(longest, len(word))
        if len(word) > bound:
            report.fail(matrix=matToData(mat), length=len(word), bound=bound)
            break
    report.certificate = {
        "ring": ring.key,
        "n": n,
        "elements": label,
        "checked": count,
        "longestWord": longest,
        "bound": bound,
    }
    return report


def _witnessReport(ring: Ring, n: int) -> Report:
    witnesses = Report("decompose", "perfect-group")
    checked = 0
    for i, j in [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]:
        for x in ring.elements():
            checked += 1
            if not checkCommutatorWitness(ring, i, j, x, n):
                witnesses.fail(i=i, j=j, x=ring.format(x))
    witnesses.certificate = {"ring": ring.key, "n": n, "checked": checked}
    return witnesses


def decomposeSuite(options: SuiteOptions) -> list[Report]:
    reports = []
    selected = options.selects("ring", "n")
    if not selected:
        f2 = options.makeRing("f2")
        group = options.specialLinear(f2, 3)
        reports.append(
            _decomposeReport(
                f2, 3, (group.element(i) for i in range(group.order)), "all of SL_3"
            )
        )
    count = options.trials(1000)
    cases = _cases(options, [("z9", 3), ("gr4_2", 3)])
    for key, n in cases:
        ring = options.makeRing(key)
        rng = random.Random(options.seed)
        samples = [randomElementaryProduct(ring, n, rng) for _ in range(count)]
        report = _decomposeReport(ring, n, samples, f"{count} random elements")
        report.seed = options.seed
        reports.append(report)
    if selected:
        reports.extend(_witnessReport(options.makeRing(key), n) for key, n in cases)
    else:
        reports.append(_witnessReport(options.makeRing("z9"), 3))
    return reports


# groups


def ordersSuite(options: SuiteOptions) -> list[Report]:
    reports = []
    rng = random.Random(options.seed)
    for key, n in _cases(options, [("f2", 3), ("f3", 3), ("f4", 3)], key="field"):
        field = options.makeRing(key)
        report = Report("orders", "group-order", seed=options.seed)
        group = options.specialLinear(field, n)
        sylow = sylowUnitriangular(field, n, options.budgets)
        expected = slOrder(field.q, n)
        expectedSylow = field.q ** (n * (n - 1) // 2)
        index = expected // sylow.order
        report.certificate = {
            "field": field.key,
            "n": n,
            "order": group.order,
            "expectedOrder": expected,
            "sylowOrder": sylow.order,
            "sylowIndex": index,
        }
        if group.order != expected:
            report.fail(order=group.order, expected=expected)
        if sylow.order != expectedSylow or expected % sylow.order or index % field.p == 0:
            report.fail(sylowOrder=sylow.order, expected=expectedSylow)
        for _ in range(options.trials(1000)):
            i = group.randomIndex(rng)
            product = Mat.identity(field, n)
            for s in group.word(i):
                product = product @ group.gens[s]
            if product != group.element(i):
                report.fail(treeWord=i)
                break
        reports.append(report)
    return reports


# cohomology

# dim_k H^1 for the cases worked out by hand
_h1Expected = {
    ("f3", 3, ModuleKind.M): 0,
    ("f3", 3, ModuleKind.M0): 1,
    ("f3", 3, ModuleKind.V): 1,
    ("f3", 3, ModuleKind.TRIVIAL): 0,
    ("f4", 3, ModuleKind.M0): 0,
}

# numbers of proper nonzero k-submodules and F_p-submodules (None when k = F_p)
_latticeExpected = {
    ("f3", 3, ModuleKind.M0): (1, None),
    ("f3", 3, ModuleKind.V): (0, None),
    ("f4", 3, ModuleKind.M0): (0, 0),
}


def _moduleKinds(
    options: SuiteOptions, field: Ring, n: int, defaults: list[ModuleKind]
) -> list[ModuleKind]:
    if options.module is not None:
        return [ModuleKind(options.module)]
    needDivisibility = (ModuleKind.S, ModuleKind.V)
    return [kind for kind in defaults if n % field.p == 0 or kind not in needDivisibility]


def _latticeReport(
    options: SuiteOptions, field: Ring, n: int, kind: ModuleKind
) -> Report:
    report = Report("submodules", "adjoint-submodules")
    group = options.specialLinear(field, n, compact=field.d > 1)
    module = makeModule(kind, group)
    lattice = submoduleLattice(module, budgets=options.budgets)
    report.certificate = {
        "field": field.key,
        "n": n,
        "module": kind.value,
        "submodules": [[module.describe(v) for v in span] for span in lattice],
    }
    fpCount = None
    if module.kAction is not None:
        latticeFp = submoduleLattice(module, useKStructure=False, budgets=options.budgets)
        fpCount = len(latticeFp)
        report.certificate["fpSubmodules"] = fpCount
    expected = _latticeExpected.get((field.key, n, kind))
    report.certificate["expected"] = None if expected is None else list(expected)
    if expected is not None and (len(lattice), fpCount) != expected:
        report.fail(submodules=len(lattice), fpSubmodules=fpCount)
    if kind == ModuleKind.M0 and n % field.p == 0 and field.d == 1:
        scalarLine = module.coordinates(scalarColumns(field, n)).T
        if not any(sameSubspace(span, scalarLine, field.p) for span in lattice):
            report.fail(missing="the scalar line")
    if not checkAction(module, options.trials(1000), options.seed):
        report.fail(action="element actions do not multiply")
    return report


def _homsReport(options: SuiteOptions) -> Report:
    f3 = options.makeRing("f3")
    sl3f3 = options.specialLinear(f3, 3)
    homs = Report("submodules", "adjoint-submodules")
    m0 = makeModule(ModuleKind.M0, sl3f3)
    v = makeModule(ModuleKind.V, sl3f3)
    trivial = makeModule(ModuleKind.TRIVIAL, sl3f3)
    dims = {
        "Hom(M0,M0)": equivariantHomDim(m0, m0, options.budgets).k,
        "Hom(V,V)": equivariantHomDim(v, v, options.budgets).k,
        "Hom(M0,k)": equivariantHomDim(m0, trivial, options.budgets).k,
    }
    homs.certificate = {"field": f3.key, "n": 3, **dims}
    if dims != {"Hom(M0,M0)": 1, "Hom(V,V)": 1, "Hom(M0,k)": 0}:
        homs.fail(**dims)
    return homs


def submodulesSuite(options: SuiteOptions) -> list[Report]:
    if not options.selects("field", "n", "module"):
        return [
            _latticeReport(options, options.makeRing("f3"), 3, ModuleKind.M0),
            _latticeReport(options, options.makeRing("f4"), 3, ModuleKind.M0),
            _homsReport(options),
        ]
    reports = []
    for key, n in _cases(options, [("f3", 3)], key="field"):
        field = options.makeRing(key)
        for kind in _moduleKinds(options, field, n, [ModuleKind.M0]):
            reports.append(_latticeReport(options, field, n, kind))
    return reports


def _h1Report(
    options: SuiteOptions, field: Ring, n: int, kind: ModuleKind, compact: bool
) -> Report:
    report = Report("h1", "first-cohomology")
    group = options.specialLinear(field, n, compact=compact)
    result = h1Dim(group, makeModule(kind, group), options.budgets)
    expected = _h1Expected.get((field.key, n, kind))
    report.certificate = {
        "field": field.key,
        "n": n,
        "module": kind.value,
        "generators": group.numGens,
        "h1": result.k,
        "h1Fp": result.fp,
        "cocyclesFp": result.cocyclesFp,
        "coboundariesFp": result.coboundariesFp,
        "expected": expected,
    }
    if expected is not None and result.k != expected:
        report.fail(h1=result.k, expected=expected)
    return report


def h1Suite(options: SuiteOptions) -> list[Report]:
    if not options.selects("field", "n", "module"):
        f3 = options.makeRing("f3")
        f4 = options.makeRing("f4")
        cases = [
            (f3, ModuleKind.M, False),
            (f3, ModuleKind.M0, False),
            (f4, ModuleKind.M0, True),
            (f3, ModuleKind.TRIVIAL, False),
            (f3, ModuleKind.V, False),
            (f3, ModuleKind.M0, True),
        ]
        return [
            _h1Report(options, field, 3, kind, compact) for field, kind, compact in cases
        ]
    reports = []
    defaults = [ModuleKind.M, ModuleKind.M0, ModuleKind.TRIVIAL, ModuleKind.V]
    for key, n in _cases(options, [("f3", 3)], key="field"):
        field = options.makeRing(key)
        for kind in _moduleKinds(options, field, n, defaults):
            reports.append(_h1Report(options, field, n, kind, field.d > 1))
    return reports


# splitting over a Sylow subgroup, which decides the whole group both ways
_splitExpected = {
    ("f2", 3, ExtensionVariant.FULL): True,
    ("f2", 3, ExtensionVariant.GENERAL_LINEAR): True,
    ("f3", 3, ExtensionVariant.FULL): False,
    ("f3", 3, ExtensionVariant.SCALAR_QUOTIENT): False,
    ("f3", 3, ExtensionVariant.GENERAL_LINEAR): False,
    ("f4", 3, ExtensionVariant.FULL): False,
}


def _splitReport(
    options: SuiteOptions,
    field: Ring,
    n: int,
    variant: ExtensionVariant,
    subgroupName: str,
    anchor: str | None = None,
    suite: str = "split",
) -> Report:
    expected = _splitExpected.get((field.key, n, variant))
    if anchor is None:
        if expected is None:
            anchor = "splitting-decision"
        else:
            anchor = "split-in-char-2" if expected else "non-split-reduction"
    report = Report(suite, anchor)
    ext = makeExtension(field, n, variant, budgets=options.budgets)
    if subgroupName == "full":
        subgroup = ext.quotient
    else:
        subgroup = sylowUnitriangular(field, n, options.budgets)
    result = splittingDecide(ext, subgroup, requireGaschutz=True, seed=options.seed)
    report.certificate = {
        "field": field.key,
        "n": n,
        "big": ext.big.key,
        "subgroup": subgroupName,
        "expected": expected,
        **result.certificate(),
    }
    if expected is not None and (result.split, result.globalSplit) != (expected, expected):
        report.fail(split=result.split, globalSplit=result.globalSplit)
    return report


def _liftsReport(options: SuiteOptions) -> Report:
    lifts = Report("split", "extension-class-checks", seed=options.seed)
    f3 = options.makeRing("f3")
    sylow = sylowUnitriangular(f3, 3, options.budgets)
    verdicts = {}
    for liftMode in ("teichmuller", "digits"):
        ext = makeExtension(f3, 3, ExtensionVariant.FULL, liftMode, options.budgets)
        verdicts[liftMode] = splittingDecide(ext, sylow).split
    ext = makeExtension(f3, 3, budgets=options.budgets)
    sl3f3 = options.specialLinear(f3, 3)
    rng = random.Random(options.seed)
    elements = [sl3f3.element(sl3f3.randomIndex(rng)) for _ in range(200)]
    cocycleFailures = checkCocycleIdentity(
        ext, elements, options.trials(10_000), options.seed
    )
    determinantFailures = checkKernelDeterminant(
        ext.big, 3, options.budgets.samples, options.seed
    )
    lifts.certificate = {
        "liftModes": verdicts,
        "cocycleIdentityFailures": cocycleFailures,
        "determinantTraceFailures": determinantFailures,
    }
    if len(set(verdicts.values())) != 1 or cocycleFailures or determinantFailures:
        lifts.fail(**lifts.certificate)
    return lifts


def splitSuite(options: SuiteOptions) -> list[Report]:
    if options.selects("field", "n", "variant", "subgroup"):
        field = options.makeRing(options.field or "f3")
        variant = ExtensionVariant(options.variant or ExtensionVariant.FULL)
        n = options.n or 3
        return [_splitReport(options, field, n, variant, options.subgroup or "sylow")]
    FULL = ExtensionVariant.FULL
    return [
        _splitReport(options, options.makeRing("f2"), 3, FULL, "full"),
        _splitReport(options, options.makeRing("f3"), 3, FULL, "sylow"),
        _splitReport(options, options.makeRing("f4"), 3, FULL, "sylow"),
        _liftsReport(options),
    ]


def scalarSplitSuite(options: SuiteOptions) -> list[Report]:
    return [
        _splitReport(
            options,
            options.makeRing(options.field or "f3"),
            options.n or 3,
            ExtensionVariant.SCALAR_QUOTIENT,
            options.subgroup or "sylow",
            anchor="non-split-scalar-quotient",
            suite="scalar-split",
        )
    ]


# deformation

_auditTargets = {
    "f2": ("f2", "f2_dual", "z4"),
    "f3": ("f3", "f3_dual", "z9"),
    "f4": ("f4", "f4_dual", "gr4_2"),
}


def deformationAuditSuite(options: SuiteOptions) -> list[Report]:
    field = options.makeRing(options.field or "f3")
    n = options.n or 3
    group = options.specialLinear(field, n, compact=field.d > 1)
    keys = options.targets if options.targets is not None else _auditTargets[field.key]
    targets = [options.makeRing(key) for key in keys]
    report = universalPropertyAudit(group, targets, options.budgets)

    invariance = Report(
        "deformation-audit", "conjugation-invariance", seed=options.seed
    )
    rng = random.Random(options.seed)
    while True:
        x = Mat(field, n, (rng.randrange(field.size) for _ in range(n * n)))
        if x.isInvertible():
            break
    # a thickening with a nonzero ideal when there is one
    target = next((t for t in targets if not t.isField), targets[0])
    problem = LiftProblem(group, target, options.budgets)
    counts = [
        liftClasses(problem).classes,
        liftClasses(problem.conjugated(x)).classes,
    ]
    invariance.certificate = {
        "target": target.key,
        "conjugator": formatMat(x),
        "liftClasses": counts,
    }
    if counts[0] != counts[1]:
        invariance.fail(liftClasses=counts)
    return [report, invariance]


def _twistRing(options: SuiteOptions) -> Ring:
    return options.makeRing(options.ring or "f3_dual")


def _twistSeed(options: SuiteOptions) -> int:
    return options.seed if options.twistSeed is None else options.twistSeed


def _reduction(ring: Ring) -> list[int]:
    return [ring.basePart(a) for a in ring.elements()]


def _reducedClosure(options: SuiteOptions, ring: Ring, gens: list[Mat]) -> GroupTable:
    return options.closure([g.map(_reduction(ring), ring.base) for g in gens])


def _twistSetup(options: SuiteOptions):
    ring = _twistRing(options)
    n = options.n or 3
    constant = constantCopy(ring, n)
    return ring, n, constant, _reducedClosure(options, ring, constant)


def reconstructSuite(options: SuiteOptions) -> list[Report]:
    ring, n, constant, quotient = _twistSetup(options)
    field = ring.base
    assert field is not None
    seed = _twistSeed(options)
    report = Report("reconstruct", "section-reconstruction", seed=seed)
    baseline = sectionReconstruct(ring, field, options.closure(constant))
    rng = random.Random(seed)
    normalized = 0
    for trial in range(options.trials(20)):
        x0, twisted = randomTwist(constant, rng)
        result = findConjugator(twisted, quotient, options.budgets)
        conjugated = [result.x @ g @ result.x.inverse() for g in twisted]
        if conjugated != constant:
            report.fail(
                trial=trial,
                twist=formatMat(x0),
                reason="normalized generators differ from the constant copy",
            )
            break
        section = sectionReconstruct(ring, field, options.closure(conjugated))
        same = (section.table, section.lambdaTable) == (
            baseline.table,
            baseline.lambdaTable,
        )
        if not same or not section.isRingHomSection:
            report.fail(trial=trial, twist=formatMat(x0), section=section.describe())
            break
        normalized += 1
    report.certificate = {
        "ring": ring.key,
        "quotientRing": field.key,
        "n": n,
        "section": baseline.describe(),
        "lambda": [ring.format(x) for x in baseline.lambdaTable],
        "checks": baseline.checks,
        "normalizedTwists": normalized,
    }
    if not baseline.isRingHomSection:
        report.fail(checks=baseline.checks)
    return [report]


def conjugatorSuite(options: SuiteOptions) -> list[Report]:
    ring, n, constant, quotient = _twistSetup(options)
    seed = _twistSeed(options)
    report = Report("conjugator", "lift-conjugacy", seed=seed)
    rng = random.Random(seed)
    count = options.trials(100)
    for trial in range(count):
        x0, twisted = randomTwist(constant, rng)
        result = findConjugator(twisted, quotient, options.budgets)
        if [result.x @ g @ result.x.inverse() for g in twisted] != constant:
            report.fail(trial=trial, twist=formatMat(x0), conjugator=formatMat(result.x))
            break
    report.certificate = {"ring": ring.key, "n": n, "twists": count}
    return [report]


def trichotomySuite(options: SuiteOptions) -> list[Report]:
    ring = _twistRing(options)
    field = ring.base
    assert field is not None
    n = options.n or 3
    seed = _twistSeed(options)
    report = Report("trichotomy", "kernel-trichotomy", seed=seed)
    instances = [
        (Trichotomy.ISO, constantCopy(ring, n)),
        (Trichotomy.FULL, fullKernelGenerators(ring, n)),
    ]
    if n % field.p == 0:
        instances.append((Trichotomy.SCALAR_EXTENSION, scalarExtensionGenerators(ring, n)))
    quotients = {
        kind: _reducedClosure(options, ring, gens) for kind, gens in instances
    }
    rng = random.Random(seed)
    count = options.trials(100)
    tally = {kind.value: 0 for kind, _ in instances}
    for trial in range(count):
        kind, gens = instances[trial % len(instances)]
        _, twisted = randomTwist(gens, rng)
        result = trichotomyClassify(twisted, quotients[kind], options.budgets)
        if result.kind != kind:
            report.fail(trial=trial, expected=kind.value, got=result.kind.value)
            break
        tally[kind.value] += 1
    report.certificate = {"ring": ring.key, "n": n, "classified": tally}
    return [report]


SuiteFunction = Callable[[SuiteOptions], list[Report]]

suites: dict[str, SuiteFunction] = {
    "steinberg": steinbergSuite,
    "conjugation": conjugationSuite,
    "commutant": commutantSuite,
    "decompose": decomposeSuite,
    "orders": ordersSuite,
    "submodules": submodulesSuite,
    "h1": h1Suite,
    "split": splitSuite,
    "scalar-split": scalarSplitSuite,
    "deformation-audit": deformationAuditSuite,
    "reconstruct": reconstructSuite,
    "conjugator": conjugatorSuite,
    "trichotomy": trichotomySuite,
}

# command-line flag of each selector
selectorFlags = {
    "ring": "--ring",
    "field": "--field",
    "n": "--n",
    "module": "--module",
    "variant": "--variant",
    "subgroup": "--subgroup",
    "targets": "--targets",
    "twistSeed": "--twist-seed",
}

_ringSelectors = frozenset({"ring", "n"})
_fieldSelectors = frozenset({"field", "n"})
_twistSelectors = frozenset({"ring", "n", "twistSeed"})

suiteSelectors: dict[str, frozenset[str]] = {
    "steinberg": _ringSelectors,
    "conjugation": _ringSelectors,
    "commutant": _ringSelectors,
    "decompose": _ringSelectors,
    "orders": _fieldSelectors,
    "submodules": _fieldSelectors | {"module"},
    "h1": _fieldSelectors | {"module"},
    "split": _fieldSelectors | {"variant", "subgroup"},
    "scalar-split": _fieldSelectors | {"subgroup"},
    "deformation-audit": _fieldSelectors | {"targets"},
    "reconstruct": _twistSelectors,
    "conjugator": _twistSelectors,
    "trichotomy": _twistSelectors,
}


def _checkField(options: SuiteOptions) -> Ring:
    field = options.makeRing(options.field or "f3")
    if not field.isField:
        raise ValueError(f"{field.key} is not a finite field")
    return field


def _checkDivides(field: Ring, n: int, what: str) -> None:
    if n % field.p:
        raise ValueError(f"{what} needs p | n, got p={field.p}, n={n}")


def _checkModuleSelection(options: SuiteOptions) -> None:
    field = _checkField(options)
    if options.module in (ModuleKind.S.value, ModuleKind.V.value):
        _checkDivides(field, options.n or 3, f"the module {options.module}")


def _checkSplitSelection(options: SuiteOptions) -> None:
    field = _checkField(options)
    if options.variant == ExtensionVariant.SCALAR_QUOTIENT.value:
        _checkDivides(field, options.n or 3, "the scalar quotient")


def _checkScalarSplitSelection(options: SuiteOptions) -> None:
    _checkDivides(_checkField(options), options.n or 3, "the scalar quotient")


def _checkTargets(options: SuiteOptions) -> None:
    field = _checkField(options)
    for key in options.targets or ():
        target = options.makeRing(key)
        if target.residueField != field or not target.isSquareZero():
            raise ValueError(f"{target.key} is not a square-zero thickening of {field.key}")


def _checkTwistRing(options: SuiteOptions) -> None:
    embedding(_twistRing(options))


def _checkPrimeTwistRing(options: SuiteOptions) -> None:
    _checkTwistRing(options)
    field = _twistRing(options).base
    assert field is not None
    if field.d != 1:
        raise ValueError(f"the trichotomy needs a prime field, got {field.key}")


_selectionChecks: dict[str, Callable[[SuiteOptions], object]] = {
    "orders": _checkField,
    "submodules": _checkModuleSelection,
    "h1": _checkModuleSelection,
    "split": _checkSplitSelection,
    "scalar-split": _checkScalarSplitSelection,
    "deformation-audit": _checkTargets,
    "reconstruct": _checkTwistRing,
    "conjugator": _checkTwistRing,
    "trichotomy": _checkPrimeTwistRing,
}


def checkSelection(names: list[str], options: SuiteOptions) -> None:
    """Raise ValueError for a selector none of the named suites reads, or for a
    selected case a suite cannot run.
    """
    given = [name for name in selectorFlags if getattr(options, name) is not None]
    accepted = frozenset().union(*(suiteSelectors[name] for name in names))
    unused = [selectorFlags[name] for name in given if name not in accepted]
    if unused:
        raise ValueError(f"{', '.join(unused)} does not apply to {', '.join(names)}")
    for name in names:
        check = _selectionChecks.get(name)
        if check is not None and suiteSelectors[name].intersection(given):
            check(options)


def suiteNames(name: str) -> list[str]:
    if name == "all":
        return list(suites)
    if name not in suites:
        raise KeyError(f"unknown suite {name!r}")
    return [name]


def runSuite(name: str, options: SuiteOptions) -> list[Report]:
    logger.info(f"running suite {name}")
    start = time.perf_counter()
    try:
        reports = suites[name](options)
    except BudgetExceededError as e:
        logger.warning(f"suite {name} skipped: {e}")
        reports = [
            Report(
                name,
                "",
                verdict=Verdict.SKIPPED,
                certificate={"reason": str(e)},
                seed=options.seed,
            )
        ]
    except Exception as e:
        logger.exception(f"suite {name} raised")
        reports = [
            Report(
                name,
                "",
                verdict=Verdict.FAIL,
                counterexample={"error": f"{type(e).__name__}: {e}"},
                seed=options.seed,
            )
        ]
    elapsed = time.perf_counter() - start
    for report in reports:
        report.wallTime = elapsed / len(reports)
    return reports


def runSuites(names: list[str], options: SuiteOptions) -> list[Report]:
    reports = []
    for name in names:
        reports.extend(runSuite(name, options))
    return reports


async def runSuitesConcurrently(
    names: list[str], options: SuiteOptions
) -> list[Report]:
    results = await asyncio.gather(
        *(asyncio.to_thread(runSuite, name, options) for name in names)
    )
    return [report for reports in results for report in reports]


def withBudgets(options: SuiteOptions, **changes) -> SuiteOptions:
    return replace(options, budgets=replace(options.budgets, **changes))
