"""Statement execution over snapshot state with optimistic commit.

Transactions work on a private clone of the committed state; every change
is expressed as a log record that is applied to the working state when
staged and appended to the store at commit.  Commit validation scans the
records that arrived after the transaction's base version and fails with
ConflictError on any overlap with the transaction's read or write sets.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from . import ast, log
from .catalog import canon
from .errors import (
    ConflictError,
    DuplicatePath,
    EdgeEndpointMissing,
    ExecutionError,
    NoCurrentGraph,
    NodeHasEdges,
    NotAnEdgeLabel,
    PropertyTypeMismatch,
    ReadOnlyProperty,
    SubPropertyCycle,
    UnknownAlias,
    UnknownGraphType,
    UnknownProperty,
    UnknownSchema,
    UnknownLabelInConnecting,
)
from .matching import MatchSolutions, match_patterns
from .state import (
    CurrentGraph,
    DatabaseState,
    Edge,
    Element,
    Node,
    graph_members,
    resolve_graph,
    schema_view,
)
from .log import Store
from .values import Value, tag_of


@dataclass
class BindingTable:
    columns: list[str]
    rows: list[list[object]]  # Element or plain value per cell


class Database:
    """One open database file plus its committed in-memory state."""

    def __init__(self, path: str, create_if_missing: bool = True):
        self.store = Store(path, create_if_missing)
        state = DatabaseState()
        history: list[tuple[int, log.LogRecord]] = []

        def visit(pos, record):
            state.apply(pos, record)
            history.append((pos, record))

        self.store.replay(visit)
        self.committed_state = state
        self.history = history
        self.lock = threading.RLock()

    @property
    def version(self) -> int:
        return self.store.committed_end

    def begin(self, current_graph: tuple[str, ...] | None = None) -> "Transaction":
        with self.lock:
            return Transaction(self, self.committed_state, self.version,
                               current_graph)

    def run(self, script: str, user: str = "anonymous") -> list[BindingTable | None]:
        """One-shot convenience: execute a script with session semantics."""
        return [table for _stmt, table in Session(self, user).execute_text(script)]


class Transaction:
    def __init__(self, db: Database, base: DatabaseState, version: int,
                 current_graph: tuple[str, ...] | None):
        self.db = db
        self.version = version
        self.state = base.clone()
        self.staged: list[log.LogRecord] = [log.TxnBegin(0)]
        self.current_key = current_graph
        self.read_set: set[int] = set()
        self.write_set: set[int] = set()
        self.write_labels: set[str] = set()
        self.finished = False

    # --- staging ---

    def stage(self, record: log.LogRecord) -> int:
        """Stage a record, apply it to the working state, and return its
        provisional position (a negative run index)."""
        pos = -(len(self.staged) + 1)
        self.staged.append(record)
        self.state.apply(pos, record)
        return pos

    @property
    def current_graph(self) -> CurrentGraph:
        if self.current_key is None:
            raise NoCurrentGraph("no current graph; USE or CREATE GRAPH first")
        return resolve_graph(self.state, self.current_key)

    def note_write(self, pos: int):
        if pos >= 0:
            self.write_set.add(pos)

    def note_read(self, pos: int):
        if pos >= 0:
            self.read_set.add(pos)

    # --- statement dispatch ---

    def execute(self, stmt: ast.Statement) -> BindingTable | None:
        if self.finished:
            raise ExecutionError("transaction already finished")
        if isinstance(stmt, ast.CreateSchema):
            return self._create_schema(stmt)
        if isinstance(stmt, ast.CreateGraphType):
            self._create_graph_type(stmt.path, stmt.spec)
            return None
        if isinstance(stmt, ast.CreateGraph):
            return self._create_graph(stmt)
        if isinstance(stmt, ast.UseGraph):
            if stmt.url is not None:
                raise ExecutionError("remote USE GRAPH is handled by the session")
            self.current_key = resolve_graph(self.state,
                                             stmt.path.canonical).key
            return None
        if isinstance(stmt, ast.Insert):
            self.eval_insert(stmt.patterns, None)
            return None
        if isinstance(stmt, ast.InsertSchema):
            self.eval_insert_schema(stmt.sub, stmt.sup)
            return None
        if isinstance(stmt, ast.Match):
            return self._match(stmt)
        if isinstance(stmt, ast.MatchSchema):
            return self.eval_match_schema(stmt.patterns, stmt.ret)
        if isinstance(stmt, (ast.Begin, ast.Commit, ast.Rollback)):
            raise ExecutionError("transaction control is handled by the session")
        raise ExecutionError(f"unsupported statement {type(stmt).__name__}")

    # --- DDL ---

    def _create_schema(self, stmt: ast.CreateSchema):
        key = stmt.path.canonical
        if key in self.state.catalog.schemata:
            raise DuplicatePath(f"schema {stmt.path} already exists")
        self.stage(log.SchemaDef(stmt.path.segments))
        self.write_labels.add("/" + "/".join(key))
        return None

    def _require_schema(self, path: ast.Path):
        schema_key = path.canonical[:-1]
        if not schema_key or schema_key not in self.state.catalog.schemata:
            raise UnknownSchema("/" + "/".join(path.segments[:-1]))

    def _create_graph_type(self, path: ast.Path, spec: ast.InlineType,
                           allow_shared_path: bool = False) -> int:
        cat = self.state.catalog
        self._require_schema(path)
        if not allow_shared_path and cat.path_in_use(path.canonical):
            raise DuplicatePath(f"path {path} already in use")
        declared_nodes = {s.label.canonical for s in spec.node_specs}
        node_refs: list[int] = []
        for nspec in spec.node_specs:
            node_refs.append(self._ensure_node_type(
                nspec.label, [(n, t) for n, t in nspec.props], origin=0,
                singleton=False))
        edge_refs: list[int] = []
        for espec in spec.edge_specs:
            for endpoint in (espec.source, espec.target):
                if (endpoint.canonical not in declared_nodes
                        and endpoint.canonical not in cat.node_types):
                    raise UnknownLabelInConnecting(
                        f"connecting references undeclared label "
                        f"{endpoint.display!r}")
            edge_refs.append(self._ensure_edge_type(
                espec.label, [(n, t) for n, t in espec.props], origin=0,
                singleton=False,
                connecting=(espec.source.display, espec.source.quoted,
                            espec.target.display, espec.target.quoted)))
        pos = self.stage(log.GraphTypeDef(path.segments, node_refs, edge_refs))
        self.write_labels.add("/" + "/".join(path.canonical))
        return pos

    def _ensure_node_type(self, label: ast.LabelRef,
                          sig: list[tuple[str, str]], origin: int,
                          singleton: bool) -> int:
        """Type position for a declared node type, staging definitions for
        anything new; sig entries are (name, tag name)."""
        cat = self.state.catalog
        lc = label.canonical
        existing = cat.node_types.get(lc)
        if existing is None:
            pos = self.stage(log.NodeTypeDef(label.display, label.quoted,
                                             origin, singleton))
            self.write_labels.add(lc)
        else:
            pos = existing.def_pos
        from .values import NAME_TAGS
        for name, tag_name in sig:
            self._widen_type("node", lc, name, NAME_TAGS[tag_name])
        return cat.node_types[lc].def_pos if lc in cat.node_types else pos

    def _ensure_edge_type(self, label: ast.LabelRef,
                          sig: list[tuple[str, str]], origin: int,
                          singleton: bool,
                          connecting: tuple[str, bool, str, bool] | None) -> int:
        cat = self.state.catalog
        lc = label.canonical
        existing = cat.edge_types.get(lc)
        if existing is None:
            pos = self.stage(log.EdgeTypeDef(label.display, label.quoted,
                                             origin, singleton, connecting))
            self.write_labels.add(lc)
        else:
            pos = existing.def_pos
        from .values import NAME_TAGS
        for name, tag_name in sig:
            self._widen_type("edge", lc, name, NAME_TAGS[tag_name])
        return cat.edge_types[lc].def_pos

    def _widen_type(self, role: str, lc: str, name: str, tag: int,
                    display: str | None = None):
        """Add a property to a type's signature, or check an existing one."""
        cat = self.state.catalog
        t = cat.node_types[lc] if role == "node" else cat.edge_types[lc]
        pc = name.lower()
        sig = t.signature.get(pc)
        if sig is not None:
            if sig.tag != tag:
                raise PropertyTypeMismatch(
                    f"property {name!r} of {lc!r} is "
                    f"{_tag_name(sig.tag)}, not {_tag_name(tag)}")
            return
        self.stage(log.PropertyDef(t.def_pos, display or name, tag))
        self.write_labels.add(lc)

    def _create_graph(self, stmt: ast.CreateGraph):
        cat = self.state.catalog
        self._require_schema(stmt.path)
        if cat.path_in_use(stmt.path.canonical):
            raise DuplicatePath(f"path {stmt.path} already in use")
        if stmt.kind == "any":
            self.stage(log.GraphDefRec(stmt.path.segments, closed=False))
        elif isinstance(stmt.kind, ast.Path):
            gt = cat.graph_types.get(stmt.kind.canonical)
            if gt is None:
                raise UnknownGraphType(str(stmt.kind))
            self.stage(log.GraphDefRec(stmt.path.segments, closed=True,
                                       type_ref=gt.def_pos))
        else:  # inline spec: the graph and its type share the path
            type_pos = self._create_graph_type(stmt.path, stmt.kind,
                                               allow_shared_path=True)
            self.stage(log.GraphDefRec(stmt.path.segments, closed=True,
                                       type_ref=type_pos))
        self.write_labels.add("/" + "/".join(stmt.path.canonical))
        self.current_key = stmt.path.canonical
        return None

    # --- MATCH and dependents ---

    def _match(self, stmt: ast.Match) -> BindingTable | None:
        solutions = self.eval_match(stmt.patterns)
        dep = stmt.dependent
        if dep is None:
            return None
        if isinstance(dep, ast.Return):
            return self._project(solutions, dep.items)
        if isinstance(dep, ast.Insert):
            for env in solutions.envs:
                self._insert_patterns(dep.patterns, env)
            return None
        if isinstance(dep, ast.SetDep):
            self.eval_set(solutions, dep.assignments)
            return None
        if isinstance(dep, ast.RemoveDep):
            self.eval_remove(solutions, dep.targets)
            return None
        if isinstance(dep, ast.DeleteDep):
            self.eval_delete(solutions, dep.aliases, dep.detach)
            return None
        raise ExecutionError(f"unsupported dependent {type(dep).__name__}")

    def eval_match(self, patterns: list[ast.PathPattern]) -> MatchSolutions:
        nodes, edges = graph_members(self.state, self.current_graph)
        solutions = match_patterns(nodes, edges, patterns,
                                   self.state.catalog.label_closure)
        for env in solutions.envs:
            for key in solutions.column_keys:
                self.note_read(env[key].pos)
        return solutions

    def match_table(self, solutions: MatchSolutions) -> BindingTable:
        return BindingTable(
            solutions.columns,
            [[env[k] for k in solutions.column_keys] for env in solutions.envs])

    def _project(self, solutions: MatchSolutions,
                 items: list[ast.ReturnItem]) -> BindingTable:
        columns = [item.column for item in items]
        rows: list[list[object]] = []
        for env in solutions.envs:
            row: list[object] = []
            for item in items:
                key = item.alias.lower()
                if key not in env:
                    raise UnknownAlias(item.alias)
                elem = env[key]
                if item.prop is None:
                    row.append(elem)
                elif item.prop == "@id":
                    row.append(elem.pos)
                else:
                    row.append(elem.props.get(item.prop.lower()))
            rows.append(row)
        return BindingTable(columns, rows)

    def eval_return(self, solutions: MatchSolutions,
                    items: list[ast.ReturnItem]) -> BindingTable:
        return self._project(solutions, items)

    # --- INSERT ---

    def eval_insert(self, patterns: list[ast.PathPattern],
                    prior: MatchSolutions | None):
        envs = prior.envs if prior is not None else [{}]
        for env in envs:
            self._insert_patterns(patterns, env)

    def _insert_patterns(self, patterns: list[ast.PathPattern],
                         bound: dict[str, Element]):
        graph = self.current_graph
        env: dict[str, Element] = dict(bound)
        for path in patterns:
            node_elems: list[Node] = []
            for np in path.nodes:
                node_elems.append(self._insert_node(np, env, graph))
            for i, ep in enumerate(path.edges):
                left, right = node_elems[i], node_elems[i + 1]
                if ep.direction == "lr":
                    leaving, arriving = left, right
                else:
                    leaving, arriving = right, left
                self._insert_edge(ep, leaving, arriving, env, graph)

    def _insert_node(self, np: ast.NodePattern, env: dict[str, Element],
                     graph: CurrentGraph) -> Node:
        key = np.alias.lower() if np.alias else None
        if key is not None and key in env:
            elem = env[key]
            if not isinstance(elem, Node):
                raise EdgeEndpointMissing(f"{np.alias!r} is not bound to a node")
            return elem
        labels = _conjunct_labels(np.label)
        if not labels:
            raise ExecutionError("inserted nodes need at least one label")
        props = [(name, value) for name, value in np.props if value is not None]
        if graph.open:
            type_refs = [self._open_node_type(ref, props, graph)
                         for ref in labels]
        else:
            gtype = self.state.catalog.graph_types[graph.type_key]
            self.state.catalog.validate_closed_insert(
                gtype, [r.canonical for r in labels],
                {n.lower(): v for n, v in props}, "node")
            type_refs = [self.state.catalog.node_types[r.canonical].def_pos
                         for r in labels]
        prop_refs = self._prop_refs([r.canonical for r in labels], props)
        pos = self.stage(log.NodeRec(graph.def_pos, type_refs, prop_refs))
        elem = self.state.nodes[pos]
        if key is not None:
            env[key] = elem
        return elem

    def _insert_edge(self, ep: ast.EdgePattern, leaving: Node, arriving: Node,
                     env: dict[str, Element], graph: CurrentGraph) -> Edge:
        key = ep.alias.lower() if ep.alias else None
        if key is not None and key in env:
            elem = env[key]
            if not isinstance(elem, Edge):
                raise ExecutionError(f"{ep.alias!r} is not bound to an edge")
            return elem
        labels = _conjunct_labels(ep.label)
        if not labels:
            raise ExecutionError("inserted edges need at least one label")
        props = [(name, value) for name, value in ep.props if value is not None]
        cat = self.state.catalog
        if graph.open:
            type_refs = []
            for ref in labels:
                type_refs.append(self._open_edge_type(ref, props, graph,
                                                      leaving, arriving))
        else:
            gtype = cat.graph_types[graph.type_key]
            cat.validate_closed_insert(
                gtype, [r.canonical for r in labels],
                {n.lower(): v for n, v in props}, "edge",
                endpoints=(leaving.labels, arriving.labels))
            type_refs = [cat.edge_types[r.canonical].def_pos for r in labels]
        prop_refs = self._prop_refs([r.canonical for r in labels], props)
        pos = self.stage(log.EdgeRec(graph.def_pos, type_refs, leaving.pos,
                                     arriving.pos, prop_refs))
        self.note_write(leaving.pos)
        self.note_write(arriving.pos)
        elem = self.state.edges[pos]
        if key is not None:
            env[key] = elem
        return elem

    def _open_node_type(self, ref: ast.LabelRef, props: ast.Props,
                        graph: CurrentGraph) -> int:
        cat = self.state.catalog
        lc = ref.canonical
        if lc in cat.edge_types and lc not in cat.node_types:
            raise ExecutionError(f"{ref.display!r} is an edge label")
        if lc not in cat.node_types:
            self.stage(log.NodeTypeDef(ref.display, ref.quoted,
                                       graph.def_pos, singleton=True))
            self.write_labels.add(lc)
        for name, value in props:
            self._widen_type("node", lc, name, tag_of(value))
        return cat.node_types[lc].def_pos

    def _open_edge_type(self, ref: ast.LabelRef, props: ast.Props,
                        graph: CurrentGraph, leaving: Node,
                        arriving: Node) -> int:
        cat = self.state.catalog
        lc = ref.canonical
        if lc in cat.node_types and lc not in cat.edge_types:
            raise ExecutionError(f"{ref.display!r} is a node label")
        if lc not in cat.edge_types:
            src = cat.labels[leaving.labels[0]]
            tgt = cat.labels[arriving.labels[0]]
            connecting = (src.display, src.quoted, tgt.display, tgt.quoted)
            self.stage(log.EdgeTypeDef(ref.display, ref.quoted, graph.def_pos,
                                       singleton=True, connecting=connecting))
            self.write_labels.add(lc)
        else:
            cat.check_connecting(lc, leaving.labels, arriving.labels)
        for name, value in props:
            self._widen_type("edge", lc, name, tag_of(value))
        return cat.edge_types[lc].def_pos

    def _prop_refs(self, label_canons: list[str],
                   props: ast.Props) -> list[tuple[int, Value]]:
        refs: list[tuple[int, Value]] = []
        for name, value in props:
            sig = self.state.catalog.find_prop_def(label_canons, name.lower())
            if sig is None:
                raise UnknownProperty(name)
            refs.append((sig.def_pos, value))
        return refs

    # --- SET / REMOVE / DELETE ---

    def eval_set(self, solutions: MatchSolutions,
                 assignments: list[tuple[str, str, Value]]):
        for env in solutions.envs:
            for alias, prop, value in assignments:
                elem = _lookup(env, alias)
                if prop == "@id":
                    raise ReadOnlyProperty("@id")
                if self.state.element(elem.pos) is None:
                    continue
                if value is None:
                    sig = self.state.catalog.find_prop_def(elem.labels,
                                                           prop.lower())
                    if sig is None:
                        continue
                else:
                    sig = self._sig_for_write(elem, prop, tag_of(value))
                self.stage(log.UpdateRec(elem.pos, [(sig.def_pos, value)]))
                self.note_write(elem.pos)

    def eval_remove(self, solutions: MatchSolutions,
                    targets: list[tuple[str, str]]):
        for env in solutions.envs:
            for alias, prop in targets:
                elem = _lookup(env, alias)
                if prop == "@id":
                    raise ReadOnlyProperty("@id")
                if self.state.element(elem.pos) is None:
                    continue
                sig = self.state.catalog.find_prop_def(elem.labels,
                                                       prop.lower())
                if sig is None:
                    continue
                self.stage(log.UpdateRec(elem.pos, [(sig.def_pos, None)]))
                self.note_write(elem.pos)

    def _sig_for_write(self, elem: Element, prop: str, tag: int | None):
        if prop == "@id":
            raise ReadOnlyProperty("@id")
        cat = self.state.catalog
        pc = prop.lower()
        sig = cat.find_prop_def(elem.labels, pc)
        if sig is not None:
            if tag is not None and sig.tag != tag:
                raise PropertyTypeMismatch(
                    f"property {prop!r} is {_tag_name(sig.tag)}")
            return sig
        graph = self.current_graph
        if not graph.open:
            raise UnknownProperty(prop)
        role = "node" if isinstance(elem, Node) else "edge"
        self._widen_type(role, elem.labels[0], prop,
                         tag if tag is not None else 0)
        return cat.find_prop_def(elem.labels, pc)

    def eval_delete(self, solutions: MatchSolutions, aliases: list[str],
                    detach: bool):
        for env in solutions.envs:
            for alias in aliases:
                elem = _lookup(env, alias)
                if self.state.element(elem.pos) is None:
                    continue  # already deleted via an earlier row
                if isinstance(elem, Node):
                    incident = [e for e in self.state.edges.values()
                                if elem.pos in (e.leaving, e.arriving)]
                    if incident and not detach:
                        raise NodeHasEdges(
                            f"node @{elem.pos} has {len(incident)} edges")
                    for e in sorted(incident, key=lambda e: e.pos):
                        self.stage(log.DeleteRec(e.pos))
                        self.note_write(e.pos)
                self.stage(log.DeleteRec(elem.pos))
                self.note_write(elem.pos)

    # --- schema statements ---

    def eval_insert_schema(self, sub: ast.LabelRef, sup: ast.LabelRef):
        self.current_graph  # assertion requires an execution context
        cat = self.state.catalog
        if sub.canonical not in cat.edge_types:
            raise NotAnEdgeLabel(f"{sub.display!r} does not name an edge type")
        if sup.canonical in cat.node_types and sup.canonical not in cat.edge_types:
            raise NotAnEdgeLabel(f"{sup.display!r} names a node type")
        if sup.canonical not in cat.edge_types:
            self.stage(log.EdgeTypeDef(sup.display, sup.quoted, 0,
                                       singleton=True, connecting=None))
            self.write_labels.add(sup.canonical)
        if (sub.canonical, sup.canonical) in cat.subprops:
            return  # idempotent
        if cat.would_cycle(sub.canonical, sup.canonical):
            raise SubPropertyCycle(f"{sub.display} => {sup.display}")
        self.stage(log.SubPropertyRec(
            cat.edge_types[sub.canonical].def_pos,
            cat.edge_types[sup.canonical].def_pos))
        self.write_labels.add(sub.canonical)
        self.write_labels.add(sup.canonical)

    def eval_match_schema(self, patterns: list[ast.PathPattern],
                          ret: ast.Return) -> BindingTable:
        nodes, edges = schema_view(self.state, self.current_graph)
        solutions = match_patterns(nodes, edges, patterns,
                                   lambda lc: (lc,))
        return self._project(solutions, ret.items)

    # --- commit / rollback ---

    def commit(self) -> int:
        db = self.db
        with db.lock:
            if self.finished:
                raise ExecutionError("transaction already finished")
            self._validate()
            self.finished = True
            if len(self.staged) <= 1:
                return db.version
            txn_id = db.store.txn_count + 1
            self.staged[0] = log.TxnBegin(txn_id)
            run = self.staged + [log.TxnCommit(txn_id)]
            mapping = db.store.append_commit(run)

            def resolve(pos: int) -> int:
                return mapping[-pos - 1] if pos < 0 else pos

            new_state = db.committed_state.clone()
            for i, record in enumerate(run):
                final = record.map_positions(resolve)
                new_state.apply(mapping[i], final)
                db.history.append((mapping[i], final))
            db.committed_state = new_state
            return db.version

    def rollback(self):
        self.finished = True
        self.staged = [self.staged[0]]

    def _validate(self):
        guard = self.read_set | self.write_set
        catalog = self.db.committed_state.catalog
        for pos, record in self.db.history:
            if pos < self.version:
                continue
            touched, labels = _touches(record, catalog)
            if touched & guard:
                raise ConflictError(
                    f"concurrent change to position(s) {sorted(touched & guard)}")
            if labels & self.write_labels:
                raise ConflictError(
                    f"concurrent schema change to {sorted(labels & self.write_labels)}")


def _touches(record: log.LogRecord, catalog) -> tuple[set[int], set[str]]:
    """Positions and canonical catalog names a committed record touched."""
    if isinstance(record, log.UpdateRec):
        return {record.target}, set()
    if isinstance(record, log.DeleteRec):
        return {record.target}, set()
    if isinstance(record, log.EdgeRec):
        return {record.leaving, record.arriving}, set()
    if isinstance(record, log.NodeTypeDef):
        return set(), {canon(record.display, record.quoted)}
    if isinstance(record, log.EdgeTypeDef):
        return set(), {canon(record.display, record.quoted)}
    if isinstance(record, log.PropertyDef):
        entry = catalog.types_by_pos.get(record.owner_type)
        return set(), {entry[1]} if entry else set()
    if isinstance(record, log.SchemaDef):
        return set(), {"/" + "/".join(s.lower() for s in record.segments)}
    if isinstance(record, (log.GraphTypeDef, log.GraphDefRec)):
        return set(), {"/" + "/".join(s.lower() for s in record.segments)}
    if isinstance(record, log.SubPropertyRec):
        labels = set()
        for ref in (record.sub_type, record.super_type):
            entry = catalog.types_by_pos.get(ref)
            if entry:
                labels.add(entry[1])
        return set(), labels
    return set(), set()


def _conjunct_labels(expr: ast.LabelExpr | None) -> list[ast.LabelRef]:
    """Flatten a conjunction into its labels; alternation cannot be inserted."""
    if expr is None:
        return []
    if isinstance(expr, ast.LabelAtom):
        return [expr.ref]
    if isinstance(expr, ast.LabelAnd):
        out = _conjunct_labels(expr.left)
        for ref in _conjunct_labels(expr.right):
            if ref.canonical not in [r.canonical for r in out]:
                out.append(ref)
        return out
    raise ExecutionError("alternative labels ('|') cannot be inserted")


def _lookup(env: dict[str, Element], alias: str) -> Element:
    key = alias.lower()
    if key not in env:
        raise UnknownAlias(alias)
    return env[key]


def _tag_name(tag: int) -> str:
    from .values import TAG_NAMES
    return TAG_NAMES[tag]


# --- sessions ---

class Session:
    """Statement-at-a-time execution with auto-commit, explicit BEGIN/COMMIT
    brackets, a persistent current graph, and remote USE GRAPH routing."""

    def __init__(self, db: Database, user: str = "anonymous"):
        self.db = db
        self.user = user
        self.current_graph: tuple[str, ...] | None = None
        self.txn: Transaction | None = None
        self.remote = None  # RemoteSession when a remote graph is current
        self._remote_buffer: list[str] = []

    def execute_text(self, text: str) -> list[tuple[ast.Statement, BindingTable | None]]:
        from .parser import parse_script
        results: list[tuple[ast.Statement, BindingTable | None]] = []
        for stmt in parse_script(text):
            results.append((stmt, self._execute(stmt)))
        if self.remote is not None and self._remote_buffer and self.txn is None:
            table = self._flush_remote()
            if results:
                results[-1] = (results[-1][0], table)
        return results

    def _execute(self, stmt: ast.Statement) -> BindingTable | None:
        from .remote import RemoteSession
        if isinstance(stmt, ast.UseGraph) and stmt.url is not None:
            self._flush_remote()
            self.remote = RemoteSession(stmt.url, self.user)
            return None
        if self.remote is not None:
            if isinstance(stmt, ast.UseGraph):
                self._flush_remote()
                self.remote = None
            else:
                self._remote_buffer.append(ast.to_gql(stmt))
                return None
        if isinstance(stmt, ast.Begin):
            if self.txn is not None:
                raise ExecutionError("transaction already open")
            self.txn = self.db.begin(self.current_graph)
            return None
        if isinstance(stmt, ast.Commit):
            if self.txn is None:
                return None
            txn, self.txn = self.txn, None
            txn.commit()
            self.current_graph = txn.current_key
            return None
        if isinstance(stmt, ast.Rollback):
            if self.txn is not None:
                self.txn.rollback()
                self.txn = None
            return None
        if self.txn is not None:
            return self.txn.execute(stmt)
        txn = self.db.begin(self.current_graph)
        table = txn.execute(stmt)
        txn.commit()
        self.current_graph = txn.current_key
        return table

    def _flush_remote(self) -> BindingTable | None:
        from .remote import remote_execute
        if self.remote is None or not self._remote_buffer:
            self._remote_buffer = []
            return None
        script = ";\n".join(self._remote_buffer) + ";"
        self._remote_buffer = []
        result = remote_execute(self.remote, script)
        return BindingTable(result.columns, result.rows)
