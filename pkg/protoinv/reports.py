"""Run outputs: assertion files, trace files and the summary JSON, all written atomically."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterable, Sequence
from uuid import uuid4

from .boost.assertions import QuantifiedAssertion
from .engine.results import Trace, TraceStep
from .errors import ProtoinvError
from .frontend.printer import assertions_text
from .frontend.sexpr import Atom, SExpr, SList, read_one
from .grounding.evaluate import State, render_state

if TYPE_CHECKING:
    from .convergence import ConvergenceReport
    from .grounding.instance import FiniteInstance

logger = logging.getLogger(__name__)

SUMMARY_VERSION = 1


class TraceFormatError(ProtoinvError):
    code = "trace_invalid"


def write_text_atomic(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    temporary = path.with_name(f".{path.name}.{uuid4().hex}.tmp")
    try:
        temporary.write_text(text, encoding="utf-8")
        temporary.replace(path)
    finally:
        if temporary.exists():
            temporary.unlink()
    logger.debug("wrote %s", path)
    return path


def write_json(path: Path, payload: dict[str, Any]) -> Path:
    return write_text_atomic(path, json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def write_assertions(path: Path, protocol: str, assertions: Sequence[QuantifiedAssertion]) -> Path:
    return write_text_atomic(path, assertions_text(list(assertions), protocol))


# Traces
#
# (trace Voting
#   (state ((votes a1 b_min v1) false) ((maxBal a1) b_min) ...)
#   (state "Vote(a1,b1,v1)" ...))


def _atom_form(instance: "FiniteInstance", key: str) -> str:
    info = instance.atom(key)
    if not info.args:
        return info.symbol
    return f"({info.symbol} {' '.join(item.name for item in info.args)})"


def _label_text(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def trace_text(instance: "FiniteInstance", trace: Trace) -> str:
    lines = [f"(trace {instance.protocol.name}"]
    for step in trace.steps:
        shown = render_state(instance, step.state)
        entries = " ".join(f"({_atom_form(instance, key)} {value})" for key, value in shown.items())
        label = f"{_label_text(step.action)} " if step.action else ""
        lines.append(f"  (state {label}{entries})")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def write_trace(path: Path, instance: "FiniteInstance", trace: Trace) -> Path:
    return write_text_atomic(path, trace_text(instance, trace))


def _fail(message: str, node: SExpr) -> TraceFormatError:
    return TraceFormatError(f"{message} at {node.line}:{node.column}")


def _key(node: SExpr) -> str:
    if isinstance(node, Atom):
        return node.text
    names = []
    for item in node.items:
        if not isinstance(item, Atom):
            raise _fail("atom arguments must be element names", item)
        names.append(item.text)
    if not names:
        raise _fail("empty atom", node)
    return f"{names[0]}({','.join(names[1:])})" if len(names) > 1 else names[0]


def _value(instance: "FiniteInstance", key: str, node: SExpr) -> bool | int:
    if not isinstance(node, Atom):
        raise _fail(f"value of {key} must be a name", node)
    info = instance.atom(key)
    if info.sort is None:
        if node.text not in ("true", "false"):
            raise _fail(f"{key} is boolean, not {node.text}", node)
        return node.text == "true"
    element = instance.domain(info.sort).by_name(node.text)
    if element is None:
        raise _fail(f"{node.text} is not an element of {info.sort}", node)
    return element.index


def _state(instance: "FiniteInstance", form: SList) -> TraceStep:
    items = list(form.items[1:])
    action = None
    if items and isinstance(items[0], Atom) and items[0].quoted:
        action = items.pop(0).text  # type: ignore[union-attr]
    state: State = {}
    for entry in items:
        if not isinstance(entry, SList) or len(entry) != 2:
            raise _fail("expected (atom value)", entry)
        key = _key(entry.items[0])
        if not instance.has_atom(key):
            raise _fail(f"{instance.label} has no atom {key}", entry)
        state[key] = _value(instance, key, entry.items[1])
    return TraceStep(state, action)


def read_trace(instance: "FiniteInstance", text: str) -> Trace:
    root = read_one(text)
    if not isinstance(root, SList) or root.head() != "trace" or len(root) < 2:
        raise _fail("expected (trace protocol (state ...) ...)", root)
    owner = root.items[1]
    if not isinstance(owner, Atom) or owner.text != instance.protocol.name:
        raise _fail(f"trace is not for {instance.protocol.name}", owner)
    steps = []
    for node in root.items[2:]:
        if not isinstance(node, SList) or node.head() != "state":
            raise _fail("expected (state ...)", node)
        steps.append(_state(instance, node))
    return Trace(instance.label, tuple(steps))


# Summaries


def run_summary(command: str, levels: Iterable[dict[str, Any]], seconds: float, **extra: Any) -> dict[str, Any]:
    """Wall time, per-level assertion counts and the total query count of one run."""

    levels = list(levels)
    payload: dict[str, Any] = {
        "version": SUMMARY_VERSION,
        "command": command,
        "seconds": round(seconds, 3),
        "queries": sum(int(item.get("queries", 0)) for item in levels),
        "assertions": {str(item.get("protocol")): int(item.get("assertions", 0)) for item in levels},
        "levels": levels,
    }
    payload.update(extra)
    return payload


def growth_table(reports: Sequence["ConvergenceReport"]) -> str:
    rows = [("protocol", "status", "sizes", "assertions", "queries")]
    for report in reports:
        sizes = ", ".join(f"{sort} = {value}" for sort, value in report.growth().items())
        rows.append((report.protocol, report.status, sizes, str(len(report.assertions)), str(report.queries())))
    widths = [max(len(row[column]) for row in rows) for column in range(len(rows[0]))]
    return "\n".join("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in rows) + "\n"


__all__ = [
    "SUMMARY_VERSION",
    "TraceFormatError",
    "growth_table",
    "read_trace",
    "run_summary",
    "trace_text",
    "write_assertions",
    "write_json",
    "write_text_atomic",
    "write_trace",
]
