"""Statement AST produced by the parser.

Unquoted names compare case-insensitively; every name node therefore keeps
the spelling as written (``display``) alongside a derived canonical form.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .values import Value, render_literal


@dataclass(frozen=True)
class Path:
    segments: tuple[str, ...]

    @property
    def canonical(self) -> tuple[str, ...]:
        return tuple(s.lower() for s in self.segments)

    def __str__(self) -> str:
        return "/" + "/".join(self.segments)


@dataclass(frozen=True)
class LabelRef:
    display: str
    quoted: bool = False

    @property
    def canonical(self) -> str:
        return self.display if self.quoted else self.display.lower()

    def to_gql(self) -> str:
        if self.quoted:
            return '"' + self.display.replace('"', '""') + '"'
        return self.display


# --- label expressions ---

@dataclass(frozen=True)
class LabelAtom:
    ref: LabelRef


@dataclass(frozen=True)
class LabelAnd:
    left: "LabelExpr"
    right: "LabelExpr"


@dataclass(frozen=True)
class LabelOr:
    left: "LabelExpr"
    right: "LabelExpr"


LabelExpr = LabelAtom | LabelAnd | LabelOr


def label_expr_to_gql(expr: LabelExpr) -> str:
    if isinstance(expr, LabelAtom):
        return expr.ref.to_gql()
    if isinstance(expr, LabelAnd):
        return f"({label_expr_to_gql(expr.left)}&{label_expr_to_gql(expr.right)})"
    return f"({label_expr_to_gql(expr.left)}|{label_expr_to_gql(expr.right)})"


# --- patterns ---

Props = list[tuple[str, Value]]  # (name as written, value)


def props_to_gql(props: Props) -> str:
    inner = ", ".join(f"{name}: {render_literal(v)}" for name, v in props)
    return "{" + inner + "}"


@dataclass
class NodePattern:
    alias: str | None = None
    label: LabelExpr | None = None
    props: Props = field(default_factory=list)

    def to_gql(self) -> str:
        out = self.alias or ""
        if self.label is not None:
            out += ":" + label_expr_to_gql(self.label)
        if self.props:
            out += props_to_gql(self.props)
        return f"({out})"


@dataclass
class EdgePattern:
    alias: str | None = None
    label: LabelExpr | None = None
    props: Props = field(default_factory=list)
    direction: str = "lr"  # lr: left node -> right node; rl: the reverse

    def to_gql(self) -> str:
        inner = self.alias or ""
        if self.label is not None:
            inner += ":" + label_expr_to_gql(self.label)
        if self.props:
            inner += props_to_gql(self.props)
        if self.direction == "lr":
            return f"-[{inner}]->"
        return f"<-[{inner}]-"


@dataclass
class PathPattern:
    nodes: list[NodePattern]
    edges: list[EdgePattern]

    def to_gql(self) -> str:
        out = self.nodes[0].to_gql()
        for edge, node in zip(self.edges, self.nodes[1:]):
            out += edge.to_gql() + node.to_gql()
        return out


def patterns_to_gql(patterns: list[PathPattern]) -> str:
    return ", ".join(p.to_gql() for p in patterns)


# --- type specifications (CREATE GRAPH TYPE bodies) ---

@dataclass
class NodeSpec:
    label: LabelRef
    props: list[tuple[str, str]]  # (property name, type tag name)

    def to_gql(self) -> str:
        body = ", ".join(f"{n} {t}" for n, t in self.props)
        return f"node {self.label.to_gql()} {{{body}}}"


@dataclass
class EdgeSpec:
    label: LabelRef
    source: LabelRef
    target: LabelRef
    props: list[tuple[str, str]] = field(default_factory=list)

    def to_gql(self) -> str:
        out = f"directed edge {self.label.to_gql()}"
        if self.props:
            out += " {" + ", ".join(f"{n} {t}" for n, t in self.props) + "}"
        return out + f" connecting ({self.source.to_gql()}->{self.target.to_gql()})"


@dataclass
class InlineType:
    node_specs: list[NodeSpec]
    edge_specs: list[EdgeSpec]

    def to_gql(self) -> str:
        parts = [s.to_gql() for s in self.node_specs] + [s.to_gql() for s in self.edge_specs]
        return "{" + ", ".join(parts) + "}"


# --- statements ---

@dataclass
class CreateSchema:
    path: Path

    def to_gql(self) -> str:
        return f"create schema {self.path}"


@dataclass
class CreateGraphType:
    path: Path
    spec: InlineType

    def to_gql(self) -> str:
        return f"create graph type {self.path} {self.spec.to_gql()}"


@dataclass
class CreateGraph:
    path: Path
    kind: str | Path | InlineType  # "any" | type reference | inline spec

    def to_gql(self) -> str:
        if self.kind == "any":
            tail = "ANY"
        elif isinstance(self.kind, Path):
            tail = str(self.kind)
        else:
            tail = self.kind.to_gql()
        return f"create graph {self.path} {tail}"


@dataclass
class UseGraph:
    path: Path | None = None
    url: str | None = None

    def to_gql(self) -> str:
        if self.url is not None:
            return f"use graph ('{self.url}')"
        return f"use graph {self.path}"


@dataclass
class Insert:
    patterns: list[PathPattern]

    def to_gql(self) -> str:
        return f"insert {patterns_to_gql(self.patterns)}"


@dataclass
class ReturnItem:
    alias: str
    prop: str | None = None  # property name, or "@id"

    @property
    def column(self) -> str:
        return self.alias if self.prop is None else f"{self.alias}.{self.prop}"


@dataclass
class Return:
    items: list[ReturnItem]

    def to_gql(self) -> str:
        return "return " + ", ".join(i.column for i in self.items)


@dataclass
class SetDep:
    assignments: list[tuple[str, str, Value]]  # (alias, prop, value)

    def to_gql(self) -> str:
        body = ", ".join(f"{a}.{p} = {render_literal(v)}" for a, p, v in self.assignments)
        return "set " + body


@dataclass
class RemoveDep:
    targets: list[tuple[str, str]]  # (alias, prop)

    def to_gql(self) -> str:
        return "remove " + ", ".join(f"{a}.{p}" for a, p in self.targets)


@dataclass
class DeleteDep:
    aliases: list[str]
    detach: bool = False

    def to_gql(self) -> str:
        head = "detach delete " if self.detach else "delete "
        return head + ", ".join(self.aliases)


Dependent = Return | Insert | SetDep | RemoveDep | DeleteDep


@dataclass
class Match:
    patterns: list[PathPattern]
    dependent: Dependent | None = None

    def to_gql(self) -> str:
        out = f"match {patterns_to_gql(self.patterns)}"
        if self.dependent is not None:
            out += " " + self.dependent.to_gql()
        return out


@dataclass
class MatchSchema:
    patterns: list[PathPattern]
    ret: Return

    def to_gql(self) -> str:
        return f"match schema {patterns_to_gql(self.patterns)} {self.ret.to_gql()}"


@dataclass
class InsertSchema:
    sub: LabelRef
    sup: LabelRef

    def to_gql(self) -> str:
        return f"insert schema [:{self.sub.to_gql()}=>:{self.sup.to_gql()}]"


@dataclass
class Begin:
    def to_gql(self) -> str:
        return "begin"


@dataclass
class Commit:
    def to_gql(self) -> str:
        return "commit"


@dataclass
class Rollback:
    def to_gql(self) -> str:
        return "rollback"


Statement = (CreateSchema | CreateGraphType | CreateGraph | UseGraph | Insert
             | Match | MatchSchema | InsertSchema | Begin | Commit | Rollback)


def to_gql(stmt: Statement) -> str:
    return stmt.to_gql()


def ast_tree(obj, indent: int = 0) -> str:
    """Render any AST node as an indented textual tree (used by --parse-only)."""
    pad = "  " * indent
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        lines = [pad + type(obj).__name__]
        for f in dataclasses.fields(obj):
            value = getattr(obj, f.name)
            if isinstance(value, (list, tuple)) and value and any(
                    dataclasses.is_dataclass(v) for v in value):
                lines.append(f"{pad}  {f.name}:")
                lines.extend(ast_tree(v, indent + 2) for v in value)
            elif dataclasses.is_dataclass(value) and not isinstance(value, type):
                lines.append(f"{pad}  {f.name}:")
                lines.append(ast_tree(value, indent + 2))
            else:
                lines.append(f"{pad}  {f.name}: {value!r}")
        return "\n".join(lines)
    return pad + repr(obj)
