"""Command-line entry point: prove, converge, hierarchy, certify, replay and ground."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Optional, Sequence

from .certifier import check_inductive, check_trace, equivalent, invariant_node
from .config import RunConfig, load_config
from .convergence import ConvergenceReport, converge
from .engine import Inconclusive, Proof, Trace, TraceStep, prove
from .errors import (
    EXIT_CERTIFICATION_FAILED,
    EXIT_COUNTEREXAMPLE,
    EXIT_ERROR,
    EXIT_OK,
    ProtoinvError,
    exit_code_for,
)
from .frontend import CORPUS_NAMES, AssertionFile, bundled, parse_assertions, parse_hierarchy, parse_protocol
from .grounding.instance import FiniteInstance, SizeAssignment, instantiate
from .hierarchy import run_hierarchy
from .ir import Protocol
from .reports import growth_table, read_trace, run_summary, trace_text, write_assertions, write_json, write_trace

logger = logging.getLogger("protoinv")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _protocol(source: str) -> Protocol:
    path = Path(source)
    if path.is_file():
        return parse_protocol(path.read_text(encoding="utf-8"))
    if source in CORPUS_NAMES or source == "voting_noaxiom":
        return bundled(source)
    raise ProtoinvError(f"no protocol file {source}", code="unknown_protocol")


def _assertions(path: Path, protocol: Protocol) -> AssertionFile:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ProtoinvError(f"cannot read {path}: {error}", code="parse_error") from error
    return parse_assertions(text, protocol)


def _output_dir(config: RunConfig) -> Path:
    return Path(config.output.dir)


def _outcome_summary(protocol: Protocol, outcome: Proof | Trace | Inconclusive) -> dict[str, Any]:
    statistics = dict(outcome.statistics)
    return {
        "protocol": protocol.name,
        "instance": outcome.instance,
        "status": outcome.status,
        "assertions": len(outcome.assertions) if isinstance(outcome, Proof) else 0,
        "queries": int(statistics.get("queries", 0)),
        "statistics": statistics,
    }


def _report_exit(status: str) -> int:
    if status in ("proved", "converged"):
        return EXIT_OK
    if status == "counterexample":
        return EXIT_COUNTEREXAMPLE
    return EXIT_ERROR


# Commands


def cmd_prove(args: argparse.Namespace, config: RunConfig) -> int:
    started = time.monotonic()
    protocol = _protocol(args.protocol)
    instance = instantiate(protocol, SizeAssignment.parse(args.size))
    strengthening = _assertions(args.strengthen, protocol).assertions if args.strengthen else ()
    outcome = prove(instance, config, strengthening=strengthening)
    out_dir = _output_dir(config)
    if isinstance(outcome, Proof):
        target = args.out or out_dir / f"{protocol.name}.inv"
        write_assertions(target, protocol.name, outcome.assertions)
        print(f"proved {outcome.instance} with {len(outcome.assertions)} assertions -> {target}")
    elif isinstance(outcome, Trace):
        target = out_dir / f"{protocol.name}.trc"
        write_trace(target, instance, outcome)
        print(f"counterexample of length {len(outcome)} in {outcome.instance} -> {target}")
    else:
        print(f"inconclusive on {outcome.instance}: {outcome.reason}")
    write_json(out_dir / "summary.json", run_summary("prove", [_outcome_summary(protocol, outcome)], time.monotonic() - started))
    return _report_exit(outcome.status)


def cmd_converge(args: argparse.Namespace, config: RunConfig) -> int:
    started = time.monotonic()
    protocol = _protocol(args.protocol)
    strengthening = _assertions(args.strengthen, protocol).assertions if args.strengthen else ()
    report = converge(protocol, SizeAssignment.parse(args.size), strengthening=strengthening, config=config)
    out_dir = _output_dir(config)
    if report.proof is not None:
        write_assertions(args.out or out_dir / f"{protocol.name}.inv", protocol.name, report.assertions)
    if isinstance(report.outcome, Trace):
        write_trace(out_dir / f"{protocol.name}.trc", instantiate(protocol, report.sizes), report.outcome)
    sys.stdout.write(growth_table([report]))
    write_json(out_dir / "summary.json", run_summary("converge", [report.as_dict()], time.monotonic() - started))
    return _report_exit(report.status)


def cmd_hierarchy(args: argparse.Namespace, config: RunConfig) -> int:
    path: Path = args.hierarchy
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as error:
        raise ProtoinvError(f"cannot read {path}: {error}", code="parse_error") from error
    hierarchy = parse_hierarchy(text, path.resolve().parent)
    out_dir = args.out or _output_dir(config)
    result = run_hierarchy(hierarchy, config, out_dir=out_dir)
    reports: list[ConvergenceReport] = [level.report for level in result.levels]
    sys.stdout.write(growth_table(reports))
    final = result.final
    extra: dict[str, Any] = {"hierarchy": result.name, "completed": result.completed, "failed": result.failed}
    if final is not None and final.minimized is not None:
        extra["minimized"] = len(final.minimized)
        print(f"{final.name}: {len(final.invariant)} assertions, {len(final.minimized)} after minimization")
    write_json(out_dir / "summary.json", run_summary("hierarchy", [item.as_dict() for item in result.levels], result.seconds, **extra))
    if result.completed:
        return EXIT_OK
    return _report_exit(reports[-1].status if reports else "inconclusive")


def _print_witness(instance: FiniteInstance, *states: Optional[dict]) -> None:
    steps = tuple(TraceStep(state) for state in states if state is not None)
    if steps:
        sys.stdout.write(trace_text(instance, Trace(instance.label, steps)))


def cmd_certify(args: argparse.Namespace, config: RunConfig) -> int:
    protocol = _protocol(args.protocol)
    instance = instantiate(protocol, SizeAssignment.parse(args.size))
    document = _assertions(args.inv, protocol)
    certificate = check_inductive(instance, instance.safety, document.assertions, config=config.solver)
    if not certificate.passed:
        print(f"{certificate.check} fails for {args.inv} at {instance.label}")
        _print_witness(instance, certificate.state, certificate.successor)
        return EXIT_CERTIFICATION_FAILED
    print(f"{len(document)} assertions plus safety are inductive at {instance.label}")
    if args.compare is not None:
        reference = _assertions(args.compare, protocol)
        same = equivalent(
            instance,
            invariant_node(instance, instance.safety, document.assertions),
            invariant_node(instance, instance.safety, reference.assertions),
            config=config.solver,
        )
        print(f"{'equivalent to' if same else 'different from'} {args.compare}")
        if not same:
            return EXIT_CERTIFICATION_FAILED
    return EXIT_OK


def cmd_replay(args: argparse.Namespace, config: RunConfig) -> int:
    protocol = _protocol(args.protocol)
    instance = instantiate(protocol, SizeAssignment.parse(args.size))
    try:
        text = args.trace.read_text(encoding="utf-8")
    except OSError as error:
        raise ProtoinvError(f"cannot read {args.trace}: {error}", code="trace_invalid") from error
    trace = read_trace(instance, text)
    verdict = check_trace(instance, trace)
    if verdict.valid:
        print(f"trace of length {len(trace)} is a valid counterexample in {instance.label}")
        return EXIT_OK
    print(f"trace invalid at step {verdict.step}: {verdict.reason}")
    return EXIT_CERTIFICATION_FAILED


def cmd_ground(args: argparse.Namespace, config: RunConfig) -> int:
    protocol = _protocol(args.protocol)
    instance = instantiate(protocol, SizeAssignment.parse(args.size))
    print(json.dumps(instance.statistics(), indent=2, sort_keys=True))
    return EXIT_OK


# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="protoinv", description="Invariant inference for parameterized protocols")
    parser.add_argument("--config", type=Path, help="YAML run configuration")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config value, e.g. engine.max_seconds=600")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    commands = parser.add_subparsers(dest="command", required=True)

    def sized(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("protocol", help="protocol file or corpus name")
        sub.add_argument("--size", required=True, help="sort sizes, e.g. value=2,acceptor=3,ballot=4")
        return sub

    prove_cmd = sized("prove", "prove safety at one instance size")
    prove_cmd.add_argument("--strengthen", type=Path, help="assertions conjoined to the property")
    prove_cmd.add_argument("--out", type=Path, help="where to write the inferred assertions")
    prove_cmd.set_defaults(handler=cmd_prove)

    converge_cmd = sized("converge", "grow sizes until the invariant saturates")
    converge_cmd.add_argument("--strengthen", type=Path)
    converge_cmd.add_argument("--out", type=Path)
    converge_cmd.set_defaults(handler=cmd_converge)

    hierarchy_cmd = commands.add_parser("hierarchy", help="run a refinement hierarchy")
    hierarchy_cmd.add_argument("hierarchy", type=Path)
    hierarchy_cmd.add_argument("--out", type=Path, help="directory for per-level outputs")
    hierarchy_cmd.set_defaults(handler=cmd_hierarchy)

    certify_cmd = sized("certify", "check that safety plus assertions is inductive")
    certify_cmd.add_argument("--inv", type=Path, required=True)
    certify_cmd.add_argument("--compare", type=Path, help="reference assertions to compare against")
    certify_cmd.set_defaults(handler=cmd_certify)

    replay_cmd = sized("replay", "validate a counterexample trace")
    replay_cmd.add_argument("--trace", type=Path, required=True)
    replay_cmd.set_defaults(handler=cmd_replay)

    ground_cmd = sized("ground", "print grounding statistics")
    ground_cmd.set_defaults(handler=cmd_ground)
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.DEBUG if verbosity > 0 else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return EXIT_OK if exit_.code == 0 else EXIT_ERROR
    configure_logging(args.verbose)
    try:
        config = load_config(args.config, args.overrides)
        return args.handler(args, config)
    except ProtoinvError as error:
        logger.error("%s [%s]", error.message, error.code)
        return exit_code_for(error)
    except KeyboardInterrupt as interrupt:
        logger.warning("interrupted")
        return exit_code_for(interrupt)


__all__ = ["build_parser", "main"]
