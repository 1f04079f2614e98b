"""Value coercion rules for block operands.

Operand values are plain Python ``bool``, ``float`` or ``str``. Every
coercion is total: any value converts to any other kind, and numeric
coercion never produces NaN (inputs that would become NaN map to 0).
The rules mirror the forgiving casting conventions block programmers
expect: numeric strings act as numbers, anything else falls back to 0,
and string comparison ignores case.
"""

from __future__ import annotations

from typing import Union

Value = Union[bool, float, str]

_FALSE_STRINGS = frozenset({"", "0", "false"})
_NON_FINITE = frozenset({"inf", "+inf", "-inf", "infinity", "+infinity", "-infinity", "nan", "+nan", "-nan"})


def is_value(v: object) -> bool:
    return isinstance(v, (bool, float, str, int))


def numeric_value(v: Value) -> float | None:
    """Number for *v*, or None when the zero-fallback would apply.

    Strings that are empty, whitespace-only, or not decimal numerals have
    no numeric value. ``"true"``/``"false"`` count as 1/0 so that a value
    round-tripped through its string form keeps its number.
    """
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    if isinstance(v, (int, float)):
        f = float(v)
        if f != f or f in (float("inf"), float("-inf")):
            return None
        return f + 0.0  # normalize -0.0
    s = v.strip()
    if not s:
        return None
    low = s.lower()
    if low == "true":
        return 1.0
    if low == "false":
        return 0.0
    if low in _NON_FINITE or "_" in s:
        return None
    try:
        f = float(s)
    except ValueError:
        return None
    if f != f or f in (float("inf"), float("-inf")):
        return None
    return f + 0.0


def to_number(v: Value) -> float:
    n = numeric_value(v)
    return 0.0 if n is None else n


def to_string(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        f = float(v)
        if f == int(f):
            return str(int(f))
        return repr(f)
    return v


def to_boolean(v: Value) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, (int, float)):
        return float(v) != 0.0
    return v.lower() not in _FALSE_STRINGS


def compare(a: Value, b: Value) -> int:
    """Three-way compare: numeric when both sides have a numeric value,
    case-insensitive string comparison otherwise. Returns -1, 0 or 1."""
    na, nb = numeric_value(a), numeric_value(b)
    if na is not None and nb is not None:
        return (na > nb) - (na < nb)
    sa, sb = to_string(a).lower(), to_string(b).lower()
    return (sa > sb) - (sa < sb)


def values_equal(a: Value, b: Value) -> bool:
    return compare(a, b) == 0
