"""Result rendering shared by the CLI and the HTTP service."""

from __future__ import annotations

import json

from .engine import BindingTable
from .state import Edge, Element, Node
from .values import render_literal


def render_element(elem: Element) -> str:
    labels = "".join(":" + lc for lc in elem.labels)
    props = ", ".join(f"{k}: {render_literal(v)}"
                      for k, v in sorted(elem.props.items()))
    return f"({labels} @{elem.pos} {{{props}}})"


def _table_cell(value) -> str:
    if isinstance(value, (Node, Edge)):
        return render_element(value)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def table_text(table: BindingTable) -> str:
    """Aligned column layout with a header and dashed separator."""
    header = table.columns
    cells = [[_table_cell(v) for v in row] for row in table.rows]
    widths = [len(h) for h in header]
    for row in cells:
        for i, c in enumerate(row):
            widths[i] = max(widths[i], len(c))
    lines = ["|".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("|".join("-" * w for w in widths))
    for row in cells:
        lines.append("|".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def wire_value(value):
    if isinstance(value, (Node, Edge)):
        return {"labels": list(value.labels), "id": value.pos,
                "properties": dict(sorted(value.props.items()))}
    return value


def wire_body(table: BindingTable) -> dict:
    return {"columns": list(table.columns),
            "rows": [[wire_value(v) for v in row] for row in table.rows]}


def json_text(table: BindingTable) -> str:
    return json.dumps(wire_body(table), sort_keys=False)
