"""CSV output with round-trip exact floats."""

import math
import numbers
from pathlib import Path

import numpy as np

__all__ = ["emit_csv", "format_value"]


def format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "%.17g" % value
    if value is None:
        return ""
    text = str(value)
    if any(ch in text for ch in ',"\n'):
        text = '"' + text.replace('"', '""') + '"'
    return text


def emit_csv(header, rows, path):
    """Write `rows` under `header` as UTF-8 CSV with LF line endings.

    Floats use 17 significant digits.  Parent directories are created.
    Returns the path written.  I/O problems raise :class:`OSError`.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    width = len(header)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            row = tuple(row)
            if len(row) != width:
                raise ValueError(f"row has {len(row)} fields, header has {width}")
            fh.write(",".join(format_value(v) for v in row) + "\n")
    return path
