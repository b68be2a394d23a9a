import argparse
import asyncio
import logging
import pathlib
import re
import sys
from dataclasses import replace
from types import SimpleNamespace

from .base import Report, Verdict, defaultBudgets, reportsToCSV, reportsToJSON
from .cohomology import ExtensionVariant, ModuleKind
from .rings import RingError, getRingSpec
from .suites import (
    SuiteOptions,
    checkSelection,
    runSuites,
    runSuitesConcurrently,
    suiteNames,
    suites,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_SKIPPED = 3

suiteAliases = {
    "verify": {
        "steinberg": "steinberg",
        "conjugation": "conjugation",
        "commutant": "commutant",
        "decompose": "decompose",
        "orders": "orders",
    },
    "cohomology": {"h1": "h1", "submodules": "submodules"},
    "extension": {"split": "split", "scalar-split": "scalar-split"},
    "deformation": {
        "audit": "deformation-audit",
        "reconstruct": "reconstruct",
        "conjugator": "conjugator",
        "trichotomy": "trichotomy",
    },
}


def moduleArgument(text: str) -> str:
    kinds = {kind.value.lower(): kind.value for kind in ModuleKind}
    try:
        return kinds[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown module {text!r}; choose from {', '.join(kinds.values())}"
        )


def groupArgument(text: str) -> int:
    match = re.fullmatch(r"sl_?(\d+)", text.lower())
    if match is None:
        raise argparse.ArgumentTypeError(f"expected a group like sl3, got {text!r}")
    return int(match.group(1))


def targetsArgument(text: str) -> tuple[str, ...]:
    keys = tuple(key.strip() for key in text.split(",") if key.strip())
    if not keys:
        raise argparse.ArgumentTypeError("expected a comma-separated list of rings")
    return keys


class SuiteOptionsFactory:
    @staticmethod
    def addArguments(parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "--ring", "--R", dest="ring", help="ring preset for the SL_n and twist suites"
        )
        parser.add_argument(
            "--field", "--k", dest="field", help="residue field preset for group suites"
        )
        parser.add_argument("--n", type=int)
        parser.add_argument("--group", type=groupArgument, help="SL_n as sl<n>")
        parser.add_argument("--module", type=moduleArgument, help="M, M0, S, V or k")
        parser.add_argument(
            "--variant", choices=[variant.value for variant in ExtensionVariant]
        )
        parser.add_argument("--subgroup", choices=["full", "sylow"])
        parser.add_argument(
            "--targets", type=targetsArgument, help="comma-separated target rings"
        )
        parser.add_argument("--twist-seed", type=int, help="seed of the random twists")
        parser.add_argument(
            "--mode", choices=["auto", "exhaustive", "sampled"], default="auto"
        )
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument(
            "--budget",
            type=int,
            default=defaultBudgets.exhaustiveBudget,
            help="cap on the work of exhaustive sweeps",
        )
        parser.add_argument("--samples", type=int, default=defaultBudgets.samples)
        parser.add_argument("--cache-dir", help="directory for cached group tables")
        parser.add_argument("--json", help="write the full report as JSON")
        parser.add_argument("--csv", help="write the summary table as CSV")
        parser.add_argument("--parallel", action="store_true")
        parser.add_argument("--allow-skip", action="store_true")
        parser.add_argument("--verbose", action="store_true")

    @staticmethod
    def getSuiteOptions(arguments: SimpleNamespace) -> SuiteOptions:
        for key in (arguments.ring, arguments.field, *(arguments.targets or ())):
            if key is not None:
                getRingSpec(key)
        n = arguments.n
        if arguments.group is not None:
            if n is not None and n != arguments.group:
                raise ValueError(f"--group sl{arguments.group} conflicts with --n {n}")
            n = arguments.group
        if n is not None and n < 3:
            raise ValueError(f"--n must be at least 3, got {n}")
        budgets = replace(
            defaultBudgets,
            exhaustiveBudget=arguments.budget,
            samples=arguments.samples,
        )
        return SuiteOptions(
            ring=arguments.ring,
            field=arguments.field,
            n=n,
            mode=arguments.mode,
            seed=arguments.seed,
            budgets=budgets,
            cacheDir=arguments.cache_dir,
            module=arguments.module,
            variant=arguments.variant,
            subgroup=arguments.subgroup,
            targets=arguments.targets,
            twistSeed=arguments.twist_seed,
        )


def makeParser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sldeform",
        description="Machine checks for SL_n over finite local rings and "
        "deformations of its standard representation",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    runParser = subparsers.add_parser("run", help="run a verification suite")
    runParser.add_argument("suite", choices=[*suites, "all"])
    SuiteOptionsFactory.addArguments(runParser)
    for command, aliases in suiteAliases.items():
        aliasParser = subparsers.add_parser(command, help=f"{command} suites")
        aliasParser.add_argument("suite", choices=list(aliases))
        SuiteOptionsFactory.addArguments(aliasParser)
    return parser


def exitCode(reports: list[Report], allowSkip: bool) -> int:
    verdicts = {report.verdict for report in reports}
    if Verdict.FAIL in verdicts:
        return EXIT_FAILED
    if Verdict.SKIPPED in verdicts and not allowSkip:
        return EXIT_SKIPPED
    return EXIT_OK


def formatTable(reports: list[Report]) -> str:
    lines = []
    for report in reports:
        lines.append(
            f"{report.suite:<18} {report.anchor:<18} {report.verdict.value:<8} "
            f"{report.wallTime:8.2f}s"
        )
    return "\n".join(lines)


def run(args: list[str] | None = None) -> int:
    parser = makeParser()
    arguments = parser.parse_args(args)
    logging.basicConfig(
        format="%(asctime)s %(name)-18s %(levelname)-8s %(message)s",
        level=logging.DEBUG if arguments.verbose else logging.INFO,
    )
    suite = arguments.suite
    if arguments.command != "run":
        suite = suiteAliases[arguments.command][suite]
    names = suiteNames(suite)
    try:
        options = SuiteOptionsFactory.getSuiteOptions(arguments)
        checkSelection(names, options)
    except (RingError, ValueError) as e:
        parser.error(str(e))
    if arguments.parallel:
        reports = asyncio.run(runSuitesConcurrently(names, options))
    else:
        reports = runSuites(names, options)
    print(formatTable(reports))
    if arguments.json:
        text = reportsToJSON(reports)
        pathlib.Path(arguments.json).write_text(text, encoding="utf-8")
    if arguments.csv:
        pathlib.Path(arguments.csv).write_text(reportsToCSV(reports), encoding="utf-8")
    code = exitCode(reports, arguments.allow_skip)
    logger.info(f"{len(reports)} reports, exit code {code}")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
