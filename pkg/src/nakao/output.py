"""Deterministic CSV/JSON emission: identical config in, identical bytes out."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np


def _native(value):
    """Convert numpy scalars/arrays so json and repr behave predictably;
    non-finite floats become strings (strict JSON has no Infinity token)."""
    if isinstance(value, (np.floating,)):
        value = float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, np.ndarray):
        return [_native(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _native(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_native(v) for v in value]
    return value


def fmt_cell(value) -> str:
    """Shortest round-trip text for a CSV cell."""
    value = _native(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def config_line(config: dict) -> str:
    return "# config: " + json.dumps(_native(config), sort_keys=True,
                                     separators=(",", ":"))


def write_csv(path, config: dict, header: list[str], rows) -> None:
    """CSV with the resolved config embedded as a leading comment line."""
    lines = [config_line(config), ",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_cell(c) for c in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path, obj: dict) -> None:
    text = json.dumps(_native(obj), sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")
