"""Homomorphic pattern matching over a set of candidate nodes and edges.

Produces the ordered bag of all assignments of pattern variables to
elements.  Label atoms are satisfied under subproperty saturation: an
element matches label L when its label set intersects the downward closure
of L.  Property maps are equality filters (missing property = no match).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from . import ast
from .state import Edge, Element, Node
from .values import values_equal

Closure = Callable[[str], Iterable[str]]


def label_satisfied(expr: ast.LabelExpr, labels: set[str],
                    closure: Closure) -> bool:
    if isinstance(expr, ast.LabelAtom):
        return bool(labels & set(closure(expr.ref.canonical)))
    if isinstance(expr, ast.LabelAnd):
        return (label_satisfied(expr.left, labels, closure)
                and label_satisfied(expr.right, labels, closure))
    return (label_satisfied(expr.left, labels, closure)
            or label_satisfied(expr.right, labels, closure))


def props_satisfied(props: ast.Props, elem_props: dict) -> bool:
    for name, wanted in props:
        have = elem_props.get(name.lower())
        if have is None or not values_equal(have, wanted):
            return False
    return True


def element_matches(elem: Element, label: ast.LabelExpr | None,
                    props: ast.Props, closure: Closure) -> bool:
    if label is not None and not label_satisfied(label, set(elem.labels), closure):
        return False
    return props_satisfied(props, elem.props)


@dataclass
class MatchSolutions:
    columns: list[str]  # named alias display spellings, first appearance
    column_keys: list[str]  # canonical alias names matching columns
    envs: list[dict[str, Element]]  # variable -> element per solution


def match_patterns(nodes: list[Node], edges: list[Edge],
                   patterns: list[ast.PathPattern],
                   closure: Closure) -> MatchSolutions:
    nodes = sorted(nodes, key=lambda n: n.pos)
    edges = sorted(edges, key=lambda e: e.pos)
    nodes_by_pos = {n.pos: n for n in nodes}

    # Variable bookkeeping: aliases share one variable, anonymous patterns
    # get a fresh internal one each.
    columns: list[str] = []
    column_keys: list[str] = []
    var_order: list[str] = []
    anon = 0

    def var_for(alias: str | None) -> str:
        nonlocal anon
        if alias is None:
            anon += 1
            key = f"#{anon}"
        else:
            key = alias.lower()
            if key not in var_order:
                columns.append(alias)
                column_keys.append(key)
        if key not in var_order:
            var_order.append(key)
        return key

    # One step per path: the start node, then (edge, node) hops.
    steps: list[tuple] = []
    for path in patterns:
        node_vars = [var_for(np.alias) for np in path.nodes]
        edge_vars = [var_for(ep.alias) for ep in path.edges]
        steps.append(("node", node_vars[0], path.nodes[0]))
        for i, ep in enumerate(path.edges):
            steps.append(("hop", edge_vars[i], ep, node_vars[i],
                          node_vars[i + 1], path.nodes[i + 1]))

    solutions: list[dict[str, Element]] = []

    def bind_node(env, var, pattern: ast.NodePattern, candidates):
        if var in env:
            elem = env[var]
            if (isinstance(elem, Node)
                    and any(elem.pos == n.pos for n in candidates)
                    and element_matches(elem, pattern.label, pattern.props,
                                        closure)):
                yield env
            return
        for n in candidates:
            if element_matches(n, pattern.label, pattern.props, closure):
                yield {**env, var: n}

    def walk(i: int, env: dict[str, Element]):
        if i == len(steps):
            solutions.append(env)
            return
        step = steps[i]
        if step[0] == "node":
            for new_env in bind_node(env, step[1], step[2], nodes):
                walk(i + 1, new_env)
            return
        _, edge_var, ep, left_var, right_var, right_pattern = step
        left = env[left_var]
        if not isinstance(left, Node):
            return
        if edge_var in env:
            candidates = [env[edge_var]] if isinstance(env[edge_var], Edge) else []
        else:
            candidates = edges
        for e in candidates:
            src, dst = (e.leaving, e.arriving) if ep.direction == "lr" \
                else (e.arriving, e.leaving)
            if src != left.pos:
                continue
            if not element_matches(e, ep.label, ep.props, closure):
                continue
            endpoint = nodes_by_pos.get(dst)
            if endpoint is None:  # endpoint outside the matched graph
                continue
            env2 = env if edge_var in env else {**env, edge_var: e}
            for env3 in bind_node(env2, right_var, right_pattern, [endpoint]):
                walk(i + 1, env3)

    walk(0, {})

    def order_key(pos: int):
        # Staged elements (negative provisional positions) sort after the
        # committed ones, in staging order: the eventual byte order.
        return (0, pos) if pos >= 0 else (1, -pos)

    solutions.sort(key=lambda env: tuple(order_key(env[v].pos)
                                         for v in var_order))
    return MatchSolutions(columns, column_keys, solutions)
