"""S-expression reader with source locations for the protoinv file formats."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from ..errors import ParseError

_TOKEN = re.compile(
    r"""
    (?P<space>[ \t\r\f]+)
  | (?P<newline>\n)
  | (?P<comment>;[^\n]*)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<atom>[^\s()";]+)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Atom:
    text: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)
    quoted: bool = False


@dataclass(frozen=True)
class SList:
    items: tuple["SExpr", ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Atom) and not self.items[0].quoted:
            return self.items[0].text
        return None

    def __len__(self) -> int:
        return len(self.items)


SExpr = Union[Atom, SList]


def _tokens(text: str) -> Iterator[tuple[str, str, int, int]]:
    line, line_start, position = 1, 0, 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise ParseError(f"unexpected character {text[position]!r}", line, position - line_start + 1)
        kind = match.lastgroup or ""
        column = position - line_start + 1
        position = match.end()
        if kind == "newline":
            line += 1
            line_start = position
        elif kind not in {"space", "comment"}:
            yield kind, match.group(), line, column


def read_all(text: str) -> list[SExpr]:
    """Read every toplevel form of `text`."""

    stack: list[tuple[list[SExpr], int, int]] = []
    forms: list[SExpr] = []
    for kind, value, line, column in _tokens(text):
        if kind == "open":
            stack.append(([], line, column))
            continue
        if kind == "close":
            if not stack:
                raise ParseError("unbalanced ')'", line, column)
            items, start_line, start_column = stack.pop()
            node: SExpr = SList(tuple(items), start_line, start_column)
        elif kind == "string":
            node = Atom(re.sub(r"\\(.)", r"\1", value[1:-1]), line, column, quoted=True)
        else:
            node = Atom(value, line, column)
        if stack:
            stack[-1][0].append(node)
        else:
            forms.append(node)
    if stack:
        _, line, column = stack[-1]
        raise ParseError("unclosed '('", line, column)
    return forms


def read_one(text: str) -> SExpr:
    forms = read_all(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one toplevel form, found {len(forms)}", 1, 1)
    return forms[0]


def render(node: SExpr) -> str:
    if isinstance(node, Atom):
        if node.quoted:
            escaped = node.text.replace("\\", "\\\\").replace('"', '\\"')
            return f'"{escaped}"'
        return node.text
    return "(" + " ".join(render(item) for item in node.items) + ")"


__all__ = ["Atom", "SExpr", "SList", "read_all", "read_one", "render"]
