"""Bit-stable CSV emission: fixed header, '\n' newlines, 17 significant
digits for floats so values round-trip exactly."""
from __future__ import annotations

import math

__all__ = ["fmt", "write_csv"]


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
