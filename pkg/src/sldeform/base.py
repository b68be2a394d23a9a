import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import cattrs

SCHEMA_VERSION = 1


class BudgetExceededError(RuntimeError):
    """Raised whenever a configured cap would be exceeded. Callers that can
    degrade gracefully (the CLI) turn this into a "skipped" verdict.
    """

    def __init__(self, what: str, needed: int, cap: int):
        super().__init__(f"{what}: {needed} exceeds the configured cap of {cap}")
        self.what = what
        self.needed = needed
        self.cap = cap


@dataclass(frozen=True)
class Budgets:
    ringSizeCap: int = 10**6
    tableCap: int = 256  # element codes must fit in a byte for batch work
    closureCap: int = 2 * 10**6
    exhaustiveBudget: int = 10**7
    samples: int = 10**5
    enumerationCap: int = 10**7
    vectorCap: int = 2**17
    unknownCap: int = 4096

    def check(self, what: str, needed: int, cap: int) -> None:
        if needed > cap:
            raise BudgetExceededError(what, needed, cap)


defaultBudgets = Budgets()


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


@dataclass
class Report:
    suite: str
    anchor: str
    verdict: Verdict = Verdict.PASS
    certificate: dict[str, Any] = field(default_factory=dict)
    counterexample: dict[str, Any] | None = None
    wallTime: float = 0.0
    seed: int | None = None

    def fail(self, **counterexample) -> None:
        self.verdict = Verdict.FAIL
        if self.counterexample is None:
            self.counterexample = {}
        self.counterexample.update(counterexample)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS


converter = cattrs.Converter()
converter.register_unstructure_hook(Verdict, lambda v: v.value)
converter.register_structure_hook(Verdict, lambda v, _: Verdict(v))


def unstructure(obj: Any) -> Any:
    return converter.unstructure(obj)


def structure(data: Any, cls: type) -> Any:
    return converter.structure(data, cls)


def reportsToJSON(reports: list[Report], *, includeTimings: bool = True) -> str:
    reportData = []
    for report in reports:
        data = unstructure(report)
        if not includeTimings:
            data.pop("wallTime", None)
        reportData.append(data)
    return json.dumps(
        {"schemaVersion": SCHEMA_VERSION, "reports": reportData},
        indent=2,
        sort_keys=True,
    )


def reportsFromJSON(text: str) -> list[Report]:
    data = json.loads(text)
    if data.get("schemaVersion") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema: {data.get('schemaVersion')!r}")
    return [structure(reportData, Report) for reportData in data["reports"]]


def reportsToCSV(reports: list[Report]) -> str:
    f = io.StringIO()
    writer = csv.writer(f, lineterminator="\n")
    writer.writerow(["suite", "anchor", "verdict", "wallTime", "seed"])
    for report in reports:
        writer.writerow(
            [
                report.suite,
                report.anchor,
                report.verdict.value,
                f"{report.wallTime:.3f}",
                "" if report.seed is None else report.seed,
            ]
        )
    return f.getvalue()


def stableHash(*parts: Any) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(repr(part).encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()[:16]
