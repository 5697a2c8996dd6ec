"""Shared scripts, builders, and independent oracles for the test suite."""

from __future__ import annotations

import itertools

import pytest

from gqldb import Database, Session

YACHT_CLUB_SCRIPT = """\
create schema /yc;
create graph type /yc/Social {node Person {name string},
    node YachtClub {name string,address string},
    directed edge "Member" connecting (Person->YachtClub)};
create graph /yc/Fraud ANY;
insert (a2 :Account{owner:'Scott',isBlocked:false})-[:Transfer{amount:350000}]->
(:Account{owner:'Aretha',isBlocked:false})-[:Transfer{amount:2000000}]->
(p1 :Person&Account{owner:'Jay',name:'Jay',isBlocked:false})
-[:"Member"]->(:YachtClub {name:'Ankh-Morpork Yacht Club',address: 'Cable Street'})
<-[:"Member"]-(p2 :Person&Account {owner:'Mike',name:'Mike', isBlocked:true})
-[:"Member"]->(:YachtClub{name:'Emerald City Yacht Club',address:'Yellow Brick Road'}),
(p1)-[:Transfer{amount:250000}]->(p2)-[:Transfer{amount:300000}]->(a2);
"""

# The two-triple knowledge graph built in one statement (one transaction).
TRIPLE_SCRIPT = """\
begin;
create schema /kg;
create graph /kg/g ANY;
insert (j:John)-[:degreefrom:masterFrom]->(d:DauphineUni),
       (j)-[:degreefrom:phdFrom]->(d);
commit;
"""

# The same graph built from raw triples plus schema-level assertions.
SCHEMA_SCRIPT = """\
create schema /kg;
create graph /kg/g ANY;
INSERT (:John)-[:masterFrom]->(:DauphineUni);
MATCH (j:John),(u:DauphineUni) INSERT (j)-[:phdFrom]->(u);
INSERT SCHEMA [:masterFrom=>:DegreeFrom];
INSERT SCHEMA [:phdFrom=>:DegreeFrom];
"""


@pytest.fixture
def db_path(tmp_path):
    return str(tmp_path / "test.gqldb")


@pytest.fixture
def db(db_path):
    return Database(db_path)


@pytest.fixture
def session(db):
    return Session(db)


def fresh_session(tmp_path, name="db.gqldb") -> Session:
    return Session(Database(str(tmp_path / name)))


def run(session: Session, text: str):
    """Execute and return the last statement's result table."""
    results = session.execute_text(text)
    return results[-1][1] if results else None


# --- state fingerprints ---

def exact_fingerprint(state):
    """Position-exact content: equal iff the states are identical."""
    nodes = tuple(sorted(
        (n.pos, n.graph, tuple(n.labels), tuple(sorted(n.props.items())))
        for n in state.nodes.values()))
    edges = tuple(sorted(
        (e.pos, e.graph, tuple(e.labels), tuple(sorted(e.props.items())),
         e.leaving, e.arriving)
        for e in state.edges.values()))
    labels = tuple(sorted(
        (lc, t.label.display, t.label.def_pos,
         tuple(sorted((p, s.tag, s.def_pos) for p, s in t.signature.items())))
        for lc, t in
        list(state.catalog.node_types.items()) + list(state.catalog.edge_types.items())))
    return nodes, edges, labels, tuple(sorted(state.catalog.subprops))


def logical_fingerprint(state):
    """Content up to positions: for comparing alternate histories."""
    def nfp(n):
        return tuple(sorted(n.labels)), tuple(sorted(n.props.items()))

    nodes = tuple(sorted(nfp(n) for n in state.nodes.values()))
    edges = tuple(sorted(
        (tuple(sorted(e.labels)), tuple(sorted(e.props.items())),
         nfp(state.nodes[e.leaving]), nfp(state.nodes[e.arriving]))
        for e in state.edges.values()))
    return nodes, edges


# --- independent matcher oracle ---

def _olabel(expr, labels, closure):
    from gqldb import ast
    if isinstance(expr, ast.LabelAtom):
        return any(l in labels for l in closure(expr.ref.canonical))
    if isinstance(expr, ast.LabelAnd):
        return (_olabel(expr.left, labels, closure)
                and _olabel(expr.right, labels, closure))
    return (_olabel(expr.left, labels, closure)
            or _olabel(expr.right, labels, closure))


def _oprops(props, elem):
    for name, wanted in props:
        have = elem.props.get(name.lower())
        if have is None:
            return False
        if type(have) is not type(wanted) or have != wanted:
            return False
    return True


def oracle_match(nodes, edges, patterns, closure):
    """Exhaustive enumeration over all alias-to-element assignments; returns
    the named alias order plus the sorted bag of their position tuples.

    Each variable's domain is the full node (or edge) pool narrowed by that
    variable's own label/property constraints; every adjacency and direction
    constraint is then checked on the cartesian product of the domains.
    """
    named: list[str] = []
    var_kind: dict[str, str] = {}
    unary: dict[str, list] = {}  # var -> [(label expr, props), ...]
    adjacency = []  # (edge var, direction, left var, right var)
    anon = itertools.count()

    def register(alias, kind, pattern):
        if alias is None:
            var = f"anon{next(anon)}"
        else:
            var = alias.lower()
            if var not in named:
                named.append(var)
        if var in var_kind and var_kind[var] != kind:
            var_kind[var] = "conflict"
        else:
            var_kind.setdefault(var, kind)
        unary.setdefault(var, []).append((pattern.label, pattern.props))
        return var

    for path in patterns:
        nvars = [register(np.alias, "node", np) for np in path.nodes]
        for i, ep in enumerate(path.edges):
            evar = register(ep.alias, "edge", ep)
            adjacency.append((evar, ep.direction, nvars[i], nvars[i + 1]))

    def satisfies(var, elem):
        for label, props in unary[var]:
            if label is not None and not _olabel(label, set(elem.labels),
                                                 closure):
                return False
            if not _oprops(props, elem):
                return False
        return True

    order = list(var_kind)
    domains = []
    for var in order:
        if var_kind[var] == "conflict":  # used as both node and edge
            return named, []
        pool = nodes if var_kind[var] == "node" else edges
        domains.append([e for e in pool if satisfies(var, e)])

    bag = []
    for choice in itertools.product(*domains):
        env = dict(zip(order, choice))
        ok = True
        for evar, direction, lvar, rvar in adjacency:
            e = env[evar]
            left, right = env[lvar], env[rvar]
            src, dst = (left, right) if direction == "lr" else (right, left)
            if e.leaving != src.pos or e.arriving != dst.pos:
                ok = False
                break
        if ok:
            bag.append(tuple(env[v].pos for v in named))
    return named, sorted(bag)


def reachability_closure(pairs, start):
    """Brute-force downward closure over asserted (sub, super) pairs."""
    out = {start}
    changed = True
    while changed:
        changed = False
        for sub, sup in pairs:
            if sup in out and sub not in out:
                out.add(sub)
                changed = True
    return out
