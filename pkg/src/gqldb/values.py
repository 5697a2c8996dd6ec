"""Property value model: null, bool, int, float, string.

Python's bool is an int subclass, so every type dispatch here checks bool
first.  Ints and floats are distinct types and never compare equal.
"""

from __future__ import annotations

Value = None | bool | int | float | str

TAG_NULL = 0
TAG_BOOL = 1
TAG_INT = 2
TAG_FLOAT = 3
TAG_STRING = 4

TAG_NAMES = {
    TAG_NULL: "null",
    TAG_BOOL: "bool",
    TAG_INT: "int",
    TAG_FLOAT: "float",
    TAG_STRING: "string",
}

NAME_TAGS = {name: tag for tag, name in TAG_NAMES.items()}


def tag_of(value: Value) -> int:
    if value is None:
        return TAG_NULL
    if isinstance(value, bool):
        return TAG_BOOL
    if isinstance(value, int):
        return TAG_INT
    if isinstance(value, float):
        return TAG_FLOAT
    if isinstance(value, str):
        return TAG_STRING
    raise TypeError(f"unsupported property value: {value!r}")


def values_equal(a: Value, b: Value) -> bool:
    """Equality by type and value; int != float, null equals nothing."""
    if a is None or b is None:
        return False
    if tag_of(a) != tag_of(b):
        return False
    return a == b


def render_literal(value: Value) -> str:
    """Render a value the way it is written in a script."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return "'" + value.replace("'", "''") + "'"
    return repr(value)
