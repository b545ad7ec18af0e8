"""Deterministic JSON/CSV text output.

Reals are always printed with 17 significant digits so that a rerun with the
same inputs reproduces the same bytes and every double round-trips.
"""

from __future__ import annotations

import json
import math

import numpy as np


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialise non-finite value {x}")
    return format(x, ".17g")


def dumps(obj, indent: int | None = None) -> str:
    return "".join(_encode(obj, indent, 0)) + ("\n" if indent is not None else "")


def _encode(obj, indent, level):
    nl = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        yield json.dumps(None if obj is None else bool(obj))
    elif isinstance(obj, (int, np.integer)):
        yield str(int(obj))
    elif isinstance(obj, (float, np.floating)):
        yield fmt_float(obj)
    elif isinstance(obj, str):
        yield json.dumps(obj)
    elif isinstance(obj, np.ndarray):
        yield from _encode(obj.tolist(), indent, level)
    elif isinstance(obj, dict):
        if not obj:
            yield "{}"
            return
        yield "{"
        for i, (k, v) in enumerate(obj.items()):
            yield ("," if i else "") + nl + json.dumps(str(k)) + (": " if indent is not None else ":")
            yield from _encode(v, indent, level + 1)
        yield end + "}"
    elif isinstance(obj, (list, tuple)):
        if not obj:
            yield "[]"
            return
        # short numeric rows stay on one line
        if indent is not None and all(isinstance(v, (int, float, np.number)) for v in obj):
            yield "[" + ", ".join("".join(_encode(v, None, 0)) for v in obj) + "]"
            return
        yield "["
        for i, v in enumerate(obj):
            yield ("," if i else "") + nl
            yield from _encode(v, indent, level + 1)
        yield end + "]"
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj, indent=1))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
