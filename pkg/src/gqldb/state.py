"""Materialized database state: elements plus the catalog, built by applying
log records.  The same application path serves live execution (with
provisional positions) and replay (with final positions), so a replayed
store reproduces the live state exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import log
from .catalog import Catalog, GraphType, canon
from .errors import UnknownGraph
from .values import TAG_NAMES, Value

# Synthetic position bases for schema-view elements (never log offsets).
_SCHEMA_EDGE_BASE = 1 << 40
_SUBPROP_EDGE_BASE = 1 << 41


@dataclass
class Node:
    pos: int
    graph: int  # GraphDef position the element was inserted into
    labels: list[str]  # canonical labels, label-set order
    props: dict[str, Value]


@dataclass
class Edge:
    pos: int
    graph: int
    labels: list[str]
    props: dict[str, Value]
    leaving: int
    arriving: int


Element = Node | Edge


class DatabaseState:
    def __init__(self):
        self.catalog = Catalog()
        self.nodes: dict[int, Node] = {}
        self.edges: dict[int, Edge] = {}
        # PropertyDef position -> canonical property name
        self.props_by_pos: dict[int, str] = {}

    def clone(self) -> "DatabaseState":
        out = DatabaseState()
        out.catalog = self.catalog.clone()
        out.nodes = {p: Node(n.pos, n.graph, list(n.labels), dict(n.props))
                     for p, n in self.nodes.items()}
        out.edges = {p: Edge(e.pos, e.graph, list(e.labels), dict(e.props),
                             e.leaving, e.arriving)
                     for p, e in self.edges.items()}
        out.props_by_pos = dict(self.props_by_pos)
        return out

    def element(self, pos: int) -> Element | None:
        return self.nodes.get(pos) or self.edges.get(pos)

    def apply(self, pos: int, record: log.LogRecord):
        cat = self.catalog
        if isinstance(record, (log.TxnBegin, log.TxnCommit)):
            return
        if isinstance(record, log.SchemaDef):
            cat.apply_schema_def(pos, record.segments)
        elif isinstance(record, log.NodeTypeDef):
            cat.apply_node_type(pos, record.display, record.quoted,
                                record.origin_graph, record.singleton)
        elif isinstance(record, log.EdgeTypeDef):
            connecting = None
            if record.connecting is not None:
                src_d, src_q, tgt_d, tgt_q = record.connecting
                connecting = (canon(src_d, src_q), canon(tgt_d, tgt_q))
            cat.apply_edge_type(pos, record.display, record.quoted,
                                record.origin_graph, record.singleton,
                                connecting)
        elif isinstance(record, log.PropertyDef):
            cat.apply_property(pos, record.owner_type, record.display,
                               record.tag)
            self.props_by_pos[pos] = record.display.lower()
        elif isinstance(record, log.GraphTypeDef):
            cat.apply_graph_type(pos, record.segments, record.node_refs,
                                 record.edge_refs)
        elif isinstance(record, log.GraphDefRec):
            type_path = None
            if record.closed:
                for gt in cat.graph_types.values():
                    if gt.def_pos == record.type_ref:
                        type_path = gt.segments
                        break
            cat.apply_graph_def(pos, record.segments,
                                "closed" if record.closed else "open",
                                type_path)
        elif isinstance(record, log.NodeRec):
            labels = [cat.types_by_pos[p][1] for p in record.label_types]
            props = {self.props_by_pos[ref]: v for ref, v in record.props}
            self.nodes[pos] = Node(pos, record.graph, labels, props)
        elif isinstance(record, log.EdgeRec):
            labels = [cat.types_by_pos[p][1] for p in record.label_types]
            props = {self.props_by_pos[ref]: v for ref, v in record.props}
            self.edges[pos] = Edge(pos, record.graph, labels, props,
                                   record.leaving, record.arriving)
        elif isinstance(record, log.UpdateRec):
            elem = self.element(record.target)
            if elem is not None:
                for ref, value in record.sets:
                    name = self.props_by_pos[ref]
                    if value is None:
                        elem.props.pop(name, None)
                    else:
                        elem.props[name] = value
        elif isinstance(record, log.DeleteRec):
            self.nodes.pop(record.target, None)
            self.edges.pop(record.target, None)
        elif isinstance(record, log.SubPropertyRec):
            cat.apply_subproperty(record.sub_type, record.super_type)
        else:
            raise TypeError(f"unhandled record {record!r}")


@dataclass
class CurrentGraph:
    """A resolved USE/CREATE GRAPH target: a graph definition, or a graph
    type standing in as an implicit graph instance."""
    key: tuple[str, ...]
    def_pos: int
    open: bool
    type_key: tuple[str, ...] | None  # graph type governing closed inserts


def resolve_graph(state: DatabaseState, key: tuple[str, ...]) -> CurrentGraph:
    gd = state.catalog.graphs.get(key)
    if gd is not None:
        return CurrentGraph(key, gd.def_pos, gd.kind == "open", gd.type_path)
    gt = state.catalog.graph_types.get(key)
    if gt is not None:
        return CurrentGraph(key, gt.def_pos, False, key)
    raise UnknownGraph("/" + "/".join(key))


def graph_members(state: DatabaseState,
                  graph: CurrentGraph) -> tuple[list[Node], list[Edge]]:
    """Member elements of a graph: inserted into it, or carrying a label
    declared in its graph type."""
    gtype: GraphType | None = None
    if graph.type_key is not None:
        gtype = state.catalog.graph_types.get(graph.type_key)
    node_labels = set(gtype.node_labels) if gtype else set()
    edge_labels = set(gtype.edge_labels) if gtype else set()
    nodes = [n for n in state.nodes.values()
             if n.graph == graph.def_pos or (set(n.labels) & node_labels)]
    edges = [e for e in state.edges.values()
             if e.graph == graph.def_pos or (set(e.labels) & edge_labels)]
    return nodes, edges


def schema_view(state: DatabaseState,
                graph: CurrentGraph) -> tuple[list[Node], list[Edge]]:
    """The graph-of-types view: node types and edge types become nodes,
    connecting constraints and subproperty assertions become edges."""
    cat = state.catalog
    if graph.type_key is not None:
        gtype = cat.graph_types[graph.type_key]
        node_canons = list(gtype.node_labels)
        edge_canons = list(gtype.edge_labels)
    else:
        node_canons = [lc for lc, t in cat.node_types.items()
                       if t.origin_graph == graph.def_pos]
        edge_canons = [lc for lc, t in cat.edge_types.items()
                       if t.origin_graph == graph.def_pos]
        # Pull in globally-declared supertypes of the graph's edge labels.
        changed = True
        while changed:
            changed = False
            for sub, sup in cat.subprops:
                if sub in edge_canons and sup not in edge_canons:
                    edge_canons.append(sup)
                    changed = True

    def type_props(t) -> dict[str, Value]:
        props: dict[str, Value] = {pc: TAG_NAMES[sig.tag]
                                   for pc, sig in t.signature.items()}
        props["name"] = t.label.display
        return props

    nodes: list[Node] = []
    for lc in node_canons:
        t = cat.node_types[lc]
        nodes.append(Node(t.def_pos, 0, [lc], type_props(t)))
    for lc in edge_canons:
        t = cat.edge_types[lc]
        nodes.append(Node(t.def_pos, 0, [lc], type_props(t)))

    edges: list[Edge] = []
    for lc in edge_canons:
        t = cat.edge_types[lc]
        if t.connecting is None:
            continue
        src, tgt = t.connecting
        if src in node_canons and tgt in node_canons:
            edges.append(Edge(_SCHEMA_EDGE_BASE + t.def_pos, 0, [lc],
                              type_props(t),
                              cat.node_types[src].def_pos,
                              cat.node_types[tgt].def_pos))
    pairs = sorted((sub, sup) for sub, sup in cat.subprops
                   if sub in edge_canons and sup in edge_canons)
    for k, (sub, sup) in enumerate(pairs):
        edges.append(Edge(_SUBPROP_EDGE_BASE + k, 0, ["=>"], {},
                          cat.edge_types[sub].def_pos,
                          cat.edge_types[sup].def_pos))
    return nodes, edges
