"""Schema objects: labels, node/edge types, graph types, graph definitions,
and the subproperty partial order.

A Catalog instance is a mutable working copy private to one transaction (or
the committed snapshot, which is never mutated in place).  All structural
changes go through the ``apply_*`` mutators, which are driven by log records
both during live execution and during replay.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import (
    ConnectingViolation,
    PropertyTypeMismatch,
    SubPropertyCycle,
    UnknownLabelInClosedGraph,
    UnknownProperty,
)
from .values import TAG_NAMES, Value, tag_of

PathKey = tuple[str, ...]


@dataclass(frozen=True)
class Label:
    canonical: str
    display: str
    quoted: bool
    def_pos: int


@dataclass
class PropSig:
    display: str
    tag: int
    def_pos: int


@dataclass
class NodeType:
    label: Label
    signature: dict[str, PropSig] = field(default_factory=dict)
    origin_graph: int = 0
    singleton: bool = False

    @property
    def def_pos(self) -> int:
        return self.label.def_pos


@dataclass
class EdgeType:
    label: Label
    signature: dict[str, PropSig] = field(default_factory=dict)
    connecting: tuple[str, str] | None = None  # canonical (source, target)
    origin_graph: int = 0
    singleton: bool = False

    @property
    def def_pos(self) -> int:
        return self.label.def_pos


@dataclass
class SchemaEntry:
    segments: tuple[str, ...]
    def_pos: int


@dataclass
class GraphType:
    segments: tuple[str, ...]
    node_labels: list[str]
    edge_labels: list[str]
    def_pos: int

    @property
    def all_labels(self) -> set[str]:
        return set(self.node_labels) | set(self.edge_labels)


@dataclass
class GraphDef:
    segments: tuple[str, ...]
    kind: str  # "open" | "closed"
    type_path: PathKey | None
    def_pos: int


def canonical_path(segments: tuple[str, ...]) -> PathKey:
    return tuple(s.lower() for s in segments)


def canon(display: str, quoted: bool) -> str:
    return display if quoted else display.lower()


class Catalog:
    def __init__(self):
        self.labels: dict[str, Label] = {}
        self.node_types: dict[str, NodeType] = {}
        self.edge_types: dict[str, EdgeType] = {}
        self.schemata: dict[PathKey, SchemaEntry] = {}
        self.graph_types: dict[PathKey, GraphType] = {}
        self.graphs: dict[PathKey, GraphDef] = {}
        self.subprops: set[tuple[str, str]] = set()  # asserted (sub, super)
        self.types_by_pos: dict[int, tuple[str, str]] = {}  # pos -> (role, canon)

    def clone(self) -> "Catalog":
        out = Catalog()
        out.labels = dict(self.labels)
        out.node_types = {
            k: replace(t, signature={p: replace(s) for p, s in t.signature.items()})
            for k, t in self.node_types.items()
        }
        out.edge_types = {
            k: replace(t, signature={p: replace(s) for p, s in t.signature.items()})
            for k, t in self.edge_types.items()
        }
        out.schemata = dict(self.schemata)
        out.graph_types = {k: replace(t, node_labels=list(t.node_labels),
                                      edge_labels=list(t.edge_labels))
                           for k, t in self.graph_types.items()}
        out.graphs = dict(self.graphs)
        out.subprops = set(self.subprops)
        out.types_by_pos = dict(self.types_by_pos)
        return out

    # --- path namespace ---

    def path_in_use(self, key: PathKey) -> bool:
        return key in self.graphs or key in self.graph_types or key in self.schemata

    # --- subproperty order ---

    def would_cycle(self, sub: str, sup: str) -> bool:
        """True if asserting sub => sup would close a cycle (or sub == sup)."""
        if sub == sup:
            return True
        return sub in self._reachable_up(sup)

    def _reachable_up(self, start: str) -> set[str]:
        seen = {start}
        stack = [start]
        while stack:
            cur = stack.pop()
            for s, p in self.subprops:
                if s == cur and p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def label_closure(self, canonical: str) -> frozenset[str]:
        """Downward closure: the label itself plus every transitive sub-label."""
        seen = {canonical}
        stack = [canonical]
        while stack:
            cur = stack.pop()
            for s, p in self.subprops:
                if p == cur and s not in seen:
                    seen.add(s)
                    stack.append(s)
        return frozenset(seen)

    # --- typing checks ---

    def signature_union(self, label_canons: list[str]) -> dict[str, PropSig]:
        """Union of the signatures of the named types, node and edge alike."""
        union: dict[str, PropSig] = {}
        for lc in label_canons:
            t = self.node_types.get(lc) or self.edge_types.get(lc)
            if t is None:
                continue
            for pc, sig in t.signature.items():
                union.setdefault(pc, sig)
        return union

    def validate_closed_insert(self, graph_type: GraphType,
                               label_canons: list[str],
                               props: dict[str, Value],
                               role: str,
                               endpoints: tuple[list[str], list[str]] | None = None):
        """Check an insert against a closed graph type; raises on violation.

        ``endpoints`` carries the (leaving, arriving) label sets for edges.
        """
        declared = (graph_type.node_labels if role == "node"
                    else graph_type.edge_labels)
        for lc in label_canons:
            if lc not in declared:
                raise UnknownLabelInClosedGraph(
                    f"label {lc!r} is not declared in graph type "
                    f"/{'/'.join(graph_type.segments)}")
        union = self.signature_union(label_canons)
        for pc, value in props.items():
            if pc not in union:
                raise UnknownProperty(f"property {pc!r} is not declared for "
                                      f"labels {label_canons}")
            if value is not None and tag_of(value) != union[pc].tag:
                raise PropertyTypeMismatch(
                    f"property {pc!r} expects {TAG_NAMES[union[pc].tag]}")
        if role == "edge" and endpoints is not None:
            for lc in label_canons:
                self.check_connecting(lc, endpoints[0], endpoints[1])

    def check_connecting(self, edge_canon: str, leaving: list[str],
                         arriving: list[str]):
        et = self.edge_types.get(edge_canon)
        if et is None or et.connecting is None:
            return
        src, tgt = et.connecting
        if src not in leaving or tgt not in arriving:
            raise ConnectingViolation(
                f"edge {edge_canon!r} must connect ({src}->{tgt}); "
                f"got ({leaving}->{arriving})")

    # --- record application (shared by live execution and replay) ---

    def apply_schema_def(self, pos: int, segments: tuple[str, ...]):
        self.schemata[canonical_path(segments)] = SchemaEntry(segments, pos)

    def apply_node_type(self, pos: int, display: str, quoted: bool,
                        origin_graph: int, singleton: bool):
        lc = canon(display, quoted)
        self.types_by_pos[pos] = ("node", lc)
        if lc in self.node_types:
            return
        label = Label(lc, display, quoted, pos)
        self.labels.setdefault(lc, label)
        self.node_types[lc] = NodeType(label, origin_graph=origin_graph,
                                       singleton=singleton)

    def apply_edge_type(self, pos: int, display: str, quoted: bool,
                        origin_graph: int, singleton: bool,
                        connecting: tuple[str, str] | None):
        lc = canon(display, quoted)
        self.types_by_pos[pos] = ("edge", lc)
        if lc in self.edge_types:
            return
        label = Label(lc, display, quoted, pos)
        self.labels.setdefault(lc, label)
        self.edge_types[lc] = EdgeType(label, connecting=connecting,
                                       origin_graph=origin_graph,
                                       singleton=singleton)

    def apply_property(self, pos: int, owner_pos: int, display: str, tag: int):
        role, lc = self.types_by_pos[owner_pos]
        t = self.node_types[lc] if role == "node" else self.edge_types[lc]
        t.signature.setdefault(display.lower(), PropSig(display, tag, pos))

    def apply_graph_type(self, pos: int, segments: tuple[str, ...],
                         node_refs: list[int], edge_refs: list[int]):
        node_labels = [self.types_by_pos[r][1] for r in node_refs]
        edge_labels = [self.types_by_pos[r][1] for r in edge_refs]
        self.graph_types[canonical_path(segments)] = GraphType(
            segments, node_labels, edge_labels, pos)

    def apply_graph_def(self, pos: int, segments: tuple[str, ...], kind: str,
                        type_path: tuple[str, ...] | None):
        key = canonical_path(segments)
        self.graphs[key] = GraphDef(
            segments, kind,
            canonical_path(type_path) if type_path else None, pos)

    def apply_subproperty(self, sub_pos: int, super_pos: int):
        sub = self.types_by_pos[sub_pos][1]
        sup = self.types_by_pos[super_pos][1]
        if (sub, sup) in self.subprops:
            return
        if self.would_cycle(sub, sup):
            raise SubPropertyCycle(f"{sub} => {sup} would create a cycle")
        self.subprops.add((sub, sup))

    # --- lookups ---

    def find_prop_def(self, label_canons: list[str], prop_canon: str) -> PropSig | None:
        """The property signature used for storing a value on an element with
        this label set: first label (in label-set order) that declares it."""
        for lc in label_canons:
            t = self.node_types.get(lc) or self.edge_types.get(lc)
            if t is not None and prop_canon in t.signature:
                return t.signature[prop_canon]
        return None

    def prop_display(self, def_pos: int) -> str:
        for t in list(self.node_types.values()) + list(self.edge_types.values()):
            for sig in t.signature.values():
                if sig.def_pos == def_pos:
                    return sig.display
        return f"prop@{def_pos}"
