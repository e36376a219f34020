"""Byte-deterministic JSON/CSV output with 17 significant digits.

Non-finite floats are written as ``Infinity``, ``-Infinity`` and ``NaN``,
which Python's :mod:`json` reads back.
"""
from __future__ import annotations

import io
import json
import math

import numpy as np


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _emit(obj, out: list, indent: int, level: int):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," + ("" if indent else " ")
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(sep)
            out.append(pad + json.dumps(str(k)) + ": ")
            _emit(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        # numeric rows stay on one line
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq)
        out.append("[")
        for i, v in enumerate(seq):
            if i:
                out.append(", " if flat else sep)
            if not flat:
                out.append(pad)
            _emit(v, out, indent, level + 1)
        out.append("]" if flat or not seq else end + "]")
    elif hasattr(obj, "to_dict"):
        _emit(obj.to_dict(), out, indent, level)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out) + "\n"


def csv_text(header, columns) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*columns):
        buf.write(",".join(fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row))
        buf.write("\n")
    return buf.getvalue()


def loads(text: str):
    return json.loads(text)
