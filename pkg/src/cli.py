"""
Command-line entry point.

Subcommands: eval, check, efficient, bvn, replay and search. Reports go to
standard output as exact-rational text (or JSON with --json); logs go to
standard error. Exit status 0 means every check passed or the verdict is
decisive, 1 means violations or mismatches were found, 2 means a usage or
input error.
"""

import argparse
from dataclasses import dataclass
import json
import logging
from pathlib import Path
import sys
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

from . import __version__
from .axioms import ALL_AXIOMS, TRANSITION_AXIOMS, run_checks
from .codec import (
    format_assignment,
    format_profile,
    format_rational,
    load_assignment,
    load_profile,
    parse_profiles,
    to_json,
)
from .config import Config
from .domains import ExhaustiveDomain, ExplicitDomain, ProfileDomain, SampledDomain
from .efficiency import is_expost_efficient, is_ordinally_efficient
from .errors import AxiomLabError, InputError
from .exporters import ReportExporterFactory
from .mechanisms import MechanismFactory
from .models import Assignment
from .polytope import bvn_decompose
from .proof_engine import ProofReport, replay
from .proof_scripts import builtin_script, pad_script, script_from_json, script_to_json
from .proof_search import INCONCLUSIVE, SEARCH_FAMILIES, WITNESS, independent_search

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

COMMANDS = ("eval", "check", "efficient", "bvn", "replay", "search")

# Counterexamples printed per axiom in text mode; JSON carries all of them
SHOWN_COUNTEREXAMPLES = 10


@dataclass
class RunConfig:
    """Everything one invocation needs, validated by RunConfigBuilder."""

    command: str
    mechanism: Optional[str] = None
    profile_path: Optional[str] = None
    matrix_path: Optional[str] = None
    axioms: Tuple[str, ...] = ()
    exhaustive: Optional[int] = None
    profiles_path: Optional[str] = None
    sample: Optional[int] = None
    sample_n: int = 4
    seed: int = 0
    global_mode: bool = False
    skip_missing: bool = False
    expost: bool = False
    theorem: Optional[int] = None
    script_path: Optional[str] = None
    export_script_path: Optional[str] = None
    pad: Optional[int] = None
    drop: Tuple[str, ...] = ()
    add: Tuple[str, ...] = ()
    branch_limit: Optional[int] = None
    json_output: bool = False
    export_path: Optional[str] = None
    threads: Optional[int] = None
    verbosity: int = 0


class RunConfigBuilder:
    """
    Builder pattern for run configurations.

    Each with_* method records one option; build() checks that the options
    fit the subcommand.
    """

    def __init__(self, command: str) -> None:
        """Start a configuration for one subcommand."""
        self._config = RunConfig(command=command, seed=Config.DEFAULT_SEED)

    def with_mechanism(self, selector: Optional[str]) -> "RunConfigBuilder":
        """Set the mechanism selector ('rsd', 'ps', 'sd', 'table:<path>')."""
        self._config.mechanism = selector
        return self

    def with_profile(self, path: Optional[str]) -> "RunConfigBuilder":
        """Set the profile file."""
        self._config.profile_path = path
        return self

    def with_matrix(self, path: Optional[str]) -> "RunConfigBuilder":
        """Set the matrix file."""
        self._config.matrix_path = path
        return self

    def with_axioms(self, axioms: Optional[Sequence[str]]) -> "RunConfigBuilder":
        """Set the axioms to check."""
        self._config.axioms = tuple(axioms or ())
        return self

    def with_exhaustive(self, n: Optional[int]) -> "RunConfigBuilder":
        """Check every profile over n agents."""
        self._config.exhaustive = n
        return self

    def with_profile_list(self, path: Optional[str]) -> "RunConfigBuilder":
        """Check the profiles listed in a file."""
        self._config.profiles_path = path
        return self

    def with_sample(self, count: Optional[int], n: int, seed: Optional[int]) -> "RunConfigBuilder":
        """Check count seeded random transitions over n agents."""
        self._config.sample = count
        self._config.sample_n = n
        if seed is not None:
            self._config.seed = seed
        return self

    def with_global_mode(self, enabled: bool) -> "RunConfigBuilder":
        """Extend local-SP and non-bossiness to all misreports."""
        self._config.global_mode = enabled
        return self

    def with_skip_missing(self, enabled: bool) -> "RunConfigBuilder":
        """Skip relabeled partners outside a table's domain."""
        self._config.skip_missing = enabled
        return self

    def with_expost(self, enabled: bool) -> "RunConfigBuilder":
        """Also decide ex-post efficiency."""
        self._config.expost = enabled
        return self

    def with_theorem(self, theorem: Optional[int]) -> "RunConfigBuilder":
        """Select a builtin proof."""
        self._config.theorem = theorem
        return self

    def with_script(self, path: Optional[str]) -> "RunConfigBuilder":
        """Replay a script file instead of a builtin proof."""
        self._config.script_path = path
        return self

    def with_script_export(self, path: Optional[str]) -> "RunConfigBuilder":
        """Write the replayed script as JSON."""
        self._config.export_script_path = path
        return self

    def with_padding(self, extra_agents: Optional[int]) -> "RunConfigBuilder":
        """Pad the replayed script with extra agents."""
        self._config.pad = extra_agents
        return self

    def with_families(
        self, drop: Optional[Sequence[str]], add: Optional[Sequence[str]]
    ) -> "RunConfigBuilder":
        """Change the axiom families of a search."""
        self._config.drop = tuple(drop or ())
        self._config.add = tuple(add or ())
        return self

    def with_branch_limit(self, limit: Optional[int]) -> "RunConfigBuilder":
        """Override Config.BRANCH_LIMIT."""
        self._config.branch_limit = limit
        return self

    def with_output(self, json_output: bool, export_path: Optional[str]) -> "RunConfigBuilder":
        """Choose JSON on standard output and an optional export file."""
        self._config.json_output = json_output
        self._config.export_path = export_path
        return self

    def with_threads(self, threads: Optional[int]) -> "RunConfigBuilder":
        """Set the worker count for parallel sweeps."""
        self._config.threads = threads
        return self

    def with_verbosity(self, level: int) -> "RunConfigBuilder":
        """Set the -v count."""
        self._config.verbosity = level
        return self

    def _require(self, value: Any, option: str) -> None:
        if value is None:
            raise InputError(f"'{self._config.command}' requires {option}")

    def build(self) -> RunConfig:
        """
        Validate and return the configuration.

        Raises:
            InputError: If options are missing, conflicting or unknown
        """
        config = self._config
        if config.command not in COMMANDS:
            raise InputError(f"Unknown command '{config.command}'. Commands: {', '.join(COMMANDS)}")
        if config.command in ("eval", "check"):
            self._require(config.mechanism, "--mechanism")
        if config.command in ("eval", "efficient"):
            self._require(config.profile_path, "--profile")
        if config.command in ("efficient", "bvn"):
            self._require(config.matrix_path, "--matrix")
        if config.command == "check":
            domains = [config.exhaustive, config.profiles_path, config.sample]
            if sum(d is not None for d in domains) != 1:
                raise InputError("'check' needs exactly one of --exhaustive, --profiles, --sample")
            if not config.axioms:
                raise InputError("'check' needs at least one --axiom")
            unknown = [a for a in config.axioms if a not in ALL_AXIOMS]
            if unknown:
                raise InputError(
                    f"Unknown axiom(s) {', '.join(unknown)}. Supported: {', '.join(ALL_AXIOMS)}"
                )
        if config.command == "replay":
            if (config.theorem is None) == (config.script_path is None):
                raise InputError("'replay' needs exactly one of --theorem, --script")
            if config.pad is not None and config.pad < 1:
                raise InputError(f"--pad must be a positive number of agents, got {config.pad}")
        if config.command == "search":
            self._require(config.theorem, "--theorem")
        if config.theorem is not None and config.theorem not in (1, 2):
            raise InputError(f"--theorem must be 1 or 2, got {config.theorem}")
        if config.export_path is not None:
            ReportExporterFactory.for_path(config.export_path)
        return config

    @classmethod
    def from_namespace(cls, args: argparse.Namespace) -> "RunConfigBuilder":
        """Builder filled from parsed command-line arguments."""
        options = vars(args)
        get = options.get
        return (
            cls(args.command)
            .with_mechanism(get("mechanism"))
            .with_profile(get("profile"))
            .with_matrix(get("matrix"))
            .with_axioms(get("axiom"))
            .with_exhaustive(get("exhaustive"))
            .with_profile_list(get("profiles"))
            .with_sample(get("sample"), get("n", 4), get("seed"))
            .with_global_mode(get("global_mode", False))
            .with_skip_missing(get("skip_missing", False))
            .with_expost(get("expost", False))
            .with_theorem(get("theorem"))
            .with_script(get("script"))
            .with_script_export(get("export_script"))
            .with_padding(get("pad"))
            .with_families(get("drop"), get("add"))
            .with_branch_limit(get("branch_limit"))
            .with_output(get("json", False), get("export"))
            .with_threads(get("threads"))
            .with_verbosity(get("verbose", 0) or 0)
        )


def _read(path: str) -> str:
    filepath = Path(path)
    if not filepath.is_file():
        raise InputError(f"File '{path}' does not exist")
    return filepath.read_text(encoding="utf-8")


def _render_rows(
    agents: Sequence[str], objects: Sequence[str], rows: Sequence[Sequence[str]]
) -> str:
    width = max([len(o) for o in objects] + [len(v) for row in rows for v in row])
    label_width = max(len(a) for a in agents) + 2
    lines = [" " * label_width + " ".join(o.rjust(width) for o in objects)]
    for agent, row in zip(agents, rows):
        lines.append(f"{agent}:".ljust(label_width) + " ".join(v.rjust(width) for v in row))
    return "\n".join(lines)


def _domain(config: RunConfig) -> ProfileDomain:
    if config.exhaustive is not None:
        return ExhaustiveDomain(config.exhaustive)
    if config.profiles_path is not None:
        return ExplicitDomain(
            parse_profiles(_read(config.profiles_path)), label=Path(config.profiles_path).name
        )
    assert config.sample is not None
    return SampledDomain(config.sample_n, config.sample, config.seed)


def run_eval(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Evaluate a mechanism at one profile."""
    assert config.mechanism is not None and config.profile_path is not None
    mechanism = MechanismFactory.create_mechanism(config.mechanism)
    profile = load_profile(_read(config.profile_path))
    assignment = mechanism.evaluate(profile)
    report = {"mechanism": mechanism.name, **to_json(profile, assignment)}
    report["text"] = format_assignment(assignment)
    report["records"] = [
        {
            "agent": agent,
            **{obj: format_rational(assignment.entry(agent, obj)) for obj in assignment.objects},
        }
        for agent in assignment.agents
    ]
    return EXIT_OK, report


def run_check(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Check axioms of a mechanism over a domain."""
    assert config.mechanism is not None
    mechanism = MechanismFactory.create_mechanism(config.mechanism)
    domain = _domain(config)
    verdicts = run_checks(
        mechanism, domain, config.axioms, config.global_mode, config.threads, config.skip_missing
    )
    lines = [f"mechanism {mechanism.name} on {json.dumps(domain.descriptor(), sort_keys=True)}"]
    records = []
    for verdict in verdicts:
        unit = "transitions" if verdict.axiom in TRANSITION_AXIOMS else "checks"
        counts = f"{verdict.profiles} profiles, {verdict.checked} {unit}"
        if verdict.holds:
            lines.append(f"{verdict.axiom}: HOLDS ({counts})")
        else:
            found = len(verdict.counterexamples)
            lines.append(f"{verdict.axiom}: VIOLATED ({found} counterexample(s); {counts})")
            lines.extend(
                f"  {example.describe()}"
                for example in verdict.counterexamples[:SHOWN_COUNTEREXAMPLES]
            )
            if found > SHOWN_COUNTEREXAMPLES:
                lines.append(f"  ... {found - SHOWN_COUNTEREXAMPLES} more")
        records.append(
            {
                "axiom": verdict.axiom,
                "holds": verdict.holds,
                "profiles": verdict.profiles,
                "checked": verdict.checked,
                "counterexamples": len(verdict.counterexamples),
            }
        )
    report = {
        "mechanism": mechanism.name,
        "domain": domain.descriptor(),
        "verdicts": [
            {**record, "examples": [e.describe() for e in verdict.counterexamples]}
            for record, verdict in zip(records, verdicts)
        ],
        "records": records,
        "text": "\n".join(lines),
    }
    passed = all(verdict.holds for verdict in verdicts)
    return (EXIT_OK if passed else EXIT_FAILED), report


def run_efficient(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Decide ordinal (and optionally ex-post) efficiency of a matrix."""
    assert config.profile_path is not None and config.matrix_path is not None
    profile = load_profile(_read(config.profile_path))
    assignment = load_assignment(_read(config.matrix_path), profile.agents)
    certificate = is_ordinally_efficient(assignment, profile)
    report: Dict[str, Any] = {"ordinally_efficient": certificate.efficient}
    if certificate.efficient:
        order = ">".join(certificate.topological_order or [])
        lines = [f"ORDINALLY EFFICIENT (trading relation order {order})"]
        report["topological_order"] = certificate.topological_order
    else:
        cycle = ", ".join(f"{b}>{w} (agent {a})" for b, w, a in certificate.cycle)
        lines = [f"ORDINALLY DOMINATED: trading cycle {cycle}", "strict dominator:"]
        assert certificate.witness is not None
        lines.append(format_assignment(certificate.witness))
        report["cycle"] = [list(edge) for edge in certificate.cycle]
        report["dominator"] = to_json(assignment=certificate.witness)["matrix"]
    passed = certificate.efficient
    if config.expost:
        expost = is_expost_efficient(assignment, profile)
        report["expost_efficient"] = expost.efficient
        if expost.efficient:
            lines.append(
                f"EX-POST EFFICIENT: lottery over {len(expost.lottery)} of "
                f"{expost.undominated} Pareto-undominated assignments"
            )
            lines.extend(
                f"  {format_rational(weight)}: {_permutation(x)}" for weight, x in expost.lottery
            )
        else:
            lines.append(f"NOT EX-POST EFFICIENT ({expost.undominated} undominated assignments)")
        passed = passed and expost.efficient
    report["text"] = "\n".join(lines)
    return (EXIT_OK if passed else EXIT_FAILED), report


def _permutation(x: Assignment) -> str:
    return " ".join(
        f"{agent}->{obj}" for agent in x.agents for obj in x.objects if x.entry(agent, obj) == 1
    )


def run_bvn(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Decompose a bistochastic matrix into permutations."""
    assert config.matrix_path is not None
    assignment = load_assignment(_read(config.matrix_path))
    decomposition = bvn_decompose(assignment)
    records = [
        {"weight": format_rational(weight), "permutation": _permutation(x)}
        for weight, x in decomposition.components
    ]
    lines = [f"{len(decomposition)} component(s)"]
    lines.extend(f"  {r['weight']}: {r['permutation']}" for r in records)
    report = {
        "components": records,
        "total_weight": format_rational(decomposition.total_weight()),
        "records": records,
        "text": "\n".join(lines),
    }
    exact = decomposition.reconstruct() == assignment
    return (EXIT_OK if exact else EXIT_FAILED), report


def _replay_text(report: ProofReport) -> str:
    lines = [
        f"script {report.script}: {len(report.verdicts)}/{report.total_steps} steps applied",
    ]
    for comparison in report.nodes:
        if comparison.expected is None:
            continue
        profile = comparison.profile
        status = "matches" if comparison.matched else "MISMATCH"
        lines.append("")
        lines.append(f"profile {comparison.node} ({status})")
        lines.append(format_profile(profile))
        lines.append(_render_rows(profile.agents, profile.objects, comparison.derived))
        lines.extend(f"  {m}" for m in comparison.mismatches)
    failed = report.failed_step
    if failed is not None:
        lines.append("")
        lines.append(f"STEP {failed.index} FAILED: {failed.step.describe()}: {failed.detail}")
    lines.append("")
    if report.contradiction is not None:
        lines.append(f"CONTRADICTION: {report.contradiction.message}")
    else:
        lines.append("NO CONTRADICTION")
    lines.append("REPLAY SUCCEEDED" if report.success else "REPLAY FAILED")
    return "\n".join(lines)


def run_replay(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Replay a builtin or stored proof script."""
    if config.script_path is not None:
        script = script_from_json(_read(config.script_path))
    else:
        assert config.theorem is not None
        script = builtin_script(config.theorem)
    if config.pad is not None:
        script = pad_script(script, config.pad)
    if config.export_script_path is not None:
        path = Path(config.export_script_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(script_to_json(script) + "\n", encoding="utf-8")
        logger.info(f"Wrote script '{script.name}' to {path}")
    report = replay(script)
    data = report.to_dict()
    data["records"] = [
        {
            "index": v.index,
            "step": v.step.describe(),
            "license": " ".join(v.step.license),
            "applied": v.applied,
            "detail": v.detail,
        }
        for v in report.verdicts
    ]
    data["text"] = _replay_text(report)
    return (EXIT_OK if report.success else EXIT_FAILED), data


def run_search(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Run the independent infeasibility search."""
    assert config.theorem is not None
    result = independent_search(
        config.theorem, config.drop, config.add, config.branch_limit, config.threads
    )
    lines = [
        f"theorem {result.theorem} with {', '.join(result.axioms)}",
        f"{result.verdict.upper()} after {result.branches} branch(es): {result.certificate}",
    ]
    for name, x in result.witness.items():
        lines.append("")
        lines.append(f"profile {name}: {result.profiles[name]}")
        lines.append(format_assignment(x))
    lines.extend(f"VIOLATION {v}" for v in result.violations)
    data = result.to_dict()
    data["records"] = [
        {"profile": name, "orders": str(profile)} for name, profile in result.profiles.items()
    ]
    data["text"] = "\n".join(lines)
    failed = result.verdict == INCONCLUSIVE or (
        result.verdict == WITNESS and bool(result.violations)
    )
    return (EXIT_FAILED if failed else EXIT_OK), data


_RUNNERS = {
    "eval": run_eval,
    "check": run_check,
    "efficient": run_efficient,
    "bvn": run_bvn,
    "replay": run_replay,
    "search": run_search,
}


def _stable(report: Dict[str, Any]) -> Dict[str, Any]:
    """Report without timing fields, so identical runs print identical bytes."""
    return {k: v for k, v in report.items() if k not in ("wall_time", "text", "records")}


def run(config: RunConfig, stream: Optional[TextIO] = None) -> int:
    """
    Dispatch a configuration and print its report.

    Args:
        config: Validated configuration
        stream: Output stream; standard output by default

    Returns:
        Exit status (0 passed, 1 violations or mismatches)

    Raises:
        AxiomLabError: On input, domain or capacity problems
    """
    out = stream if stream is not None else sys.stdout
    status, report = _RUNNERS[config.command](config)
    if "wall_time" in report:
        logger.info(f"{config.command} took {report['wall_time']}s")
    if config.json_output:
        out.write(json.dumps(_stable(report), indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(report["text"].rstrip("\n") + "\n")
    if config.export_path is not None:
        exporter = ReportExporterFactory.for_path(config.export_path)
        written = exporter.export(report, config.export_path)
        logger.info(f"Report exported to {written}")
    return status


def _add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", action="store_true", help="print the report as JSON")
    parser.add_argument("--export", metavar="PATH", help="also write the report (.json/.csv/.txt)")
    parser.add_argument("--threads", type=int, help="worker threads (AXIOMLAB_THREADS)")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs"
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="axiomlab",
        description="Random assignment mechanisms, axiom audits and impossibility proof replay",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    evaluate = commands.add_parser("eval", help="evaluate a mechanism at a profile")
    evaluate.add_argument("--mechanism", required=True, help="rsd, ps, sd or table:<path>")
    evaluate.add_argument("--profile", required=True, help="profile file (text or JSON)")

    check = commands.add_parser("check", help="check axioms over a profile domain")
    check.add_argument("--mechanism", required=True, help="rsd, ps, sd or table:<path>")
    check.add_argument(
        "--axiom", action="append", required=True, choices=ALL_AXIOMS, help="repeatable"
    )
    check.add_argument("--exhaustive", type=int, metavar="N", help="all profiles over N agents")
    check.add_argument("--profiles", metavar="PATH", help="profile blocks separated by blank lines")
    check.add_argument("--sample", type=int, metavar="COUNT", help="seeded random transitions")
    check.add_argument("--n", type=int, default=4, help="agents of sampled profiles")
    check.add_argument("--seed", type=int, help="sampling seed (AXIOMLAB_DEFAULT_SEED)")
    check.add_argument(
        "--global", dest="global_mode", action="store_true", help="check all misreports"
    )
    check.add_argument(
        "--skip-missing", action="store_true", help="skip relabeled profiles outside a table"
    )

    efficient = commands.add_parser("efficient", help="decide efficiency of a matrix")
    efficient.add_argument("--profile", required=True, help="profile file")
    efficient.add_argument("--matrix", required=True, help="matrix file")
    efficient.add_argument("--expost", action="store_true", help="also decide ex-post efficiency")

    bvn = commands.add_parser("bvn", help="Birkhoff-von Neumann decomposition")
    bvn.add_argument("--matrix", required=True, help="matrix file")

    replay_parser = commands.add_parser("replay", help="replay an impossibility proof")
    replay_parser.add_argument("--theorem", type=int, choices=(1, 2))
    replay_parser.add_argument("--script", metavar="PATH", help="JSON proof script")
    replay_parser.add_argument("--pad", type=int, metavar="K", help="add K agents")
    replay_parser.add_argument("--export-script", metavar="PATH", help="write the script as JSON")

    search = commands.add_parser("search", help="independent infeasibility search")
    search.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    search.add_argument("--drop", action="append", choices=SEARCH_FAMILIES, help="repeatable")
    search.add_argument("--add", action="append", choices=SEARCH_FAMILIES, help="repeatable")
    search.add_argument("--branch-limit", type=int, help="AXIOMLAB_BRANCH_LIMIT")

    for sub in (evaluate, check, efficient, bvn, replay_parser, search):
        _add_output_options(sub)
    return parser


def _configure_logging(verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, Config.LOG_LEVEL, logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run the command and map errors to exit status 2.

    Returns:
        Exit status
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    _configure_logging(args.verbose)
    try:
        config = RunConfigBuilder.from_namespace(args).build()
        return run(config)
    except (AxiomLabError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
