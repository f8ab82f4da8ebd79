"""Canonical JSON: sorted keys, compact separators, floats at 17 significant digits.

Identical data always serializes to identical bytes, which the golden-file
and determinism checks rely on.
"""

import json
import math

import numpy as np


def _float(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite float {x} cannot be serialized")
    if x == 0.0:
        return "0.0"
    text = format(x, ".17g")
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def _encode(obj, out):
    if obj is None or isinstance(obj, (bool, np.bool_)):
        out.append(json.dumps(None if obj is None else bool(obj)))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj, key=str)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _encode(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _encode(item, out)
        out.append("]")
    elif isinstance(obj, (complex, np.complexfloating)):
        _encode([obj.real, obj.imag], out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj):
    out = []
    _encode(obj, out)
    return "".join(out)


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}
