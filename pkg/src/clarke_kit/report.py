"""JSON run reports with fixed key order and 17-significant-digit floats."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

SCHEMA_VERSION = "1"


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Serialise dicts (insertion order), lists, numpy arrays and scalars."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def run_report(command: str, inputs: dict, outputs: dict, pass_fail=None) -> dict:
    from . import __version__

    return {
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "pass_fail": pass_fail,
        "versions": {"schema": SCHEMA_VERSION, "clarke_kit": __version__},
    }


def points_csv(points: np.ndarray) -> str:
    """``index,coord_0,...`` rows, floats with 17 significant digits."""
    P = np.asarray(points, dtype=float)
    n = P.shape[1] if P.ndim == 2 else 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index"] + [f"coord_{j}" for j in range(n)])
    for i, row in enumerate(P):
        w.writerow([i] + [format(float(c), ".17g") for c in row])
    return buf.getvalue()
