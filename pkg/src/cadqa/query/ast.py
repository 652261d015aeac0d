"""Query DSL abstract syntax tree.

Programs are ordered let-bindings plus exactly one ``solution`` assignment.
The only iteration constructs are the bounded combinators (filter/map/
sort_by), so every program terminates. Spans are excluded from equality so
round-tripped trees compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    line: int
    column: int


def _span_field():
    return field(default=Span(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Num(Node):
    value: float
    span: Span = _span_field()


@dataclass(frozen=True)
class Str(Node):
    value: str
    span: Span = _span_field()


@dataclass(frozen=True)
class Name(Node):
    ident: str
    span: Span = _span_field()


@dataclass(frozen=True)
class SidesList(Node):
    sides: tuple[str, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class ListLit(Node):
    items: tuple[Node, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class Lambda(Node):
    param: str
    body: Node
    span: Span = _span_field()


@dataclass(frozen=True)
class Call(Node):
    func: str
    args: tuple[Node, ...]
    kwargs: tuple[tuple[str, Node], ...] = ()
    span: Span = _span_field()


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node
    span: Span = _span_field()


@dataclass(frozen=True)
class Neg(Node):
    operand: Node
    span: Span = _span_field()


@dataclass(frozen=True)
class Assign(Node):
    name: str  # "solution" for the answer binding
    expr: Node
    span: Span = _span_field()

    @property
    def is_solution(self) -> bool:
        return self.name == "solution"


@dataclass(frozen=True)
class Program(Node):
    statements: tuple[Assign, ...]


def unparse(node: Node) -> str:
    """Render a node back to source; parse(unparse(p)) == p."""
    if isinstance(node, Program):
        return "\n".join(unparse(s) for s in node.statements) + "\n"
    if isinstance(node, Assign):
        prefix = "" if node.is_solution else "let "
        return f"{prefix}{node.name} = {unparse(node.expr)};"
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Str):
        escaped = node.value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, SidesList):
        return "[" + ", ".join(node.sides) + "]"
    if isinstance(node, ListLit):
        return "[" + ", ".join(unparse(i) for i in node.items) + "]"
    if isinstance(node, Lambda):
        return f"{node.param} -> {unparse(node.body)}"
    if isinstance(node, Call):
        parts = [unparse(a) for a in node.args]
        parts += [f"{k}={unparse(v)}" for k, v in node.kwargs]
        return f"{node.func}({', '.join(parts)})"
    if isinstance(node, BinOp):
        return f"({unparse(node.left)} {node.op} {unparse(node.right)})"
    if isinstance(node, Neg):
        return f"-{unparse(node.operand)}"
    raise TypeError(f"cannot unparse {type(node).__name__}")
