"""SMT-LIB2 rendering of ground nodes and parsing of solver responses."""

from __future__ import annotations

from typing import TYPE_CHECKING, Union

from ..errors import SolverProtocolError
from ..grounding.ground import Node, Op, primed, unprimed

if TYPE_CHECKING:
    from ..grounding.instance import FiniteInstance

_LIMIT = 4_000


def quote(name: str) -> str:
    if "|" in name or "\\" in name:
        raise SolverProtocolError(f"symbol {name!r} cannot be quoted")
    return f"|{name}|"


def truncate(text: str) -> str:
    if len(text) <= _LIMIT:
        return text
    return text[:_LIMIT] + f"... [{len(text) - _LIMIT} chars truncated]"


class SmtString(str):
    """A string literal from a response, as opposed to a symbol."""


SExpr = Union[str, list["SExpr"]]


def parse_responses(text: str) -> list[SExpr]:
    """Every top-level response in `text`; `|quoted|` symbols lose their bars."""

    items: list[SExpr] = []
    stack: list[list[SExpr]] = []
    i, n = 0, len(text)

    def emit(value: SExpr) -> None:
        if stack:
            stack[-1].append(value)
        else:
            items.append(value)

    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch == "(":
            stack.append([])
            i += 1
        elif ch == ")":
            if not stack:
                raise SolverProtocolError(f"unbalanced solver response: {truncate(text)}")
            done = stack.pop()
            emit(done)
            i += 1
        elif ch == "|":
            end = text.find("|", i + 1)
            if end < 0:
                raise SolverProtocolError("unterminated quoted symbol in solver response")
            emit(text[i + 1:end])
            i = end + 1
        elif ch == '"':
            j = i + 1
            chars: list[str] = []
            while True:
                if j >= n:
                    raise SolverProtocolError("unterminated string in solver response")
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        chars.append('"')
                        j += 2
                        continue
                    break
                chars.append(text[j])
                j += 1
            emit(SmtString("".join(chars)))
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '()|";':
                j += 1
            emit(text[i:j])
            i = j
    if stack:
        raise SolverProtocolError(f"unbalanced solver response: {truncate(text)}")
    return items


def error_message(item: SExpr) -> str | None:
    if isinstance(item, list) and len(item) == 2 and item[0] == "error":
        return str(item[1])
    return None


class SmtRenderer:
    """Declarations and expressions for one instance inside one solver conversation.

    Conjunctions, disjunctions and macros become `define-fun`s named after the
    node uid, so shared subformulas are sent once per scope. Definitions made
    inside a `push` are forgotten on the matching `pop`.
    """

    def __init__(self, instance: "FiniteInstance") -> None:
        self.instance = instance
        self._expr: dict[int, str] = {}
        self._scopes: list[list[int]] = []
        self._constructors: dict[str, tuple[str, int]] = {}
        for sort, domain in instance.domains.items():
            for item in domain:
                self._constructors[self._constructor_name(sort, item.name)] = (sort, item.index)

    def push(self) -> None:
        self._scopes.append([])

    def pop(self) -> None:
        for uid in self._scopes.pop():
            self._expr.pop(uid, None)

    @staticmethod
    def _constructor_name(sort: str, element: str) -> str:
        return f"{sort}.{element}"

    def constructor(self, sort: str, index: int) -> str:
        return quote(self._constructor_name(sort, self.instance.domain(sort).constants[index].name))

    def decode(self, key: str, value: SExpr) -> bool | int:
        """Python value of one `get-value` entry for atom `key`."""

        info = self.instance.atom(unprimed(key))
        if info.sort is None:
            if value in ("true", "false"):
                return value == "true"
            raise SolverProtocolError(f"non-boolean value {value!r} for {key}")
        found = self._constructors.get(value) if isinstance(value, str) else None
        if found is None or found[0] != info.sort:
            raise SolverProtocolError(f"unexpected value {value!r} for {key}")
        return found[1]

    def declarations(self) -> list[str]:
        commands: list[str] = []
        used = sorted({info.sort for info in self.instance.state_atoms if info.sort is not None})
        for sort in used:
            names = " ".join(
                f"({quote(self._constructor_name(sort, item.name))})" for item in self.instance.domain(sort)
            )
            commands.append(f"(declare-datatypes (({quote(sort)} 0)) (({names})))")
        for info in self.instance.atoms:
            kind = "Bool" if info.sort is None else quote(info.sort)
            commands.append(f"(declare-const {quote(info.key)} {kind})")
            commands.append(f"(declare-const {quote(primed(info.key))} {kind})")
        return commands

    def _leaf(self, node: Node) -> str:
        op = node.op
        if op is Op.CONST:
            return "true" if node.value else "false"
        if op is Op.ATOM:
            return quote(node.key or "")
        if op is Op.EQ:
            info = self.instance.atom(unprimed(node.key or ""))
            return f"(= {quote(node.key or '')} {self.constructor(info.sort or '', int(node.value or 0))})"
        return f"(= {quote(node.key or '')} {quote(node.other or '')})"

    def expression(self, node: Node, out: list[str]) -> str:
        """SMT text for `node`; definitions it needs first are appended to `out`."""

        known = self._expr.get(node.uid)
        if known is not None:
            return known
        stack: list[tuple[Node, bool]] = [(node, False)]
        while stack:
            item, ready = stack.pop()
            if item.uid in self._expr:
                continue
            if not ready:
                stack.append((item, True))
                stack.extend((child, False) for child in item.children if child.uid not in self._expr)
                continue
            op = item.op
            if op in (Op.CONST, Op.ATOM, Op.EQ, Op.EQV):
                text = self._leaf(item)
            elif op is Op.NOT:
                text = f"(not {self._expr[item.children[0].uid]})"
            elif op is Op.IFF:
                text = f"(= {self._expr[item.children[0].uid]} {self._expr[item.children[1].uid]})"
            elif op is Op.REF:
                text = quote(item.name or "")
                out.append(f"(define-fun {text} () Bool {self._expr[item.children[0].uid]})")
            else:
                parts = " ".join(self._expr[child.uid] for child in item.children)
                text = quote(f"_n{item.uid}")
                out.append(f"(define-fun {text} () Bool ({op.value} {parts}))")
            self._expr[item.uid] = text
            if self._scopes:
                self._scopes[-1].append(item.uid)
        return self._expr[node.uid]


__all__ = ["SExpr", "SmtRenderer", "SmtString", "error_message", "parse_responses", "quote", "truncate"]
