"""Readers for the solver's documented CSV/JSON outputs.

Every reader validates the header against the documented schema and fails
loudly on mismatch; no model quantity is ever recomputed here.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

SCHEMAS = {
    "region": ["theta", "c", "in_R", "in_S", "subregion", "binding_constraint"],
    "curve": ["curve_id", "tau", "c", "rho", "j"],
    "trajectory": ["t", "h", "segment_index"],
    "comparison": ["tau", "kappa", "c_smooth", "c_psgzt", "rel_gap"],
}


class SchemaError(ValueError):
    pass


def read_table(path, kind: str) -> dict:
    """CSV -> dict of column name to list of raw string cells."""
    expected = SCHEMAS[kind]
    lines = Path(path).read_text().strip().split("\n")
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    if header[:len(expected)] != expected:
        raise SchemaError(
            f"{path}: header {header} does not start with the documented "
            f"{kind} schema {expected}")
    cols: dict = {name: [] for name in header}
    for ln, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise SchemaError(f"{path}:{ln}: {len(cells)} cells, expected {len(header)}")
        for name, cell in zip(header, cells):
            cols[name].append(cell)
    return cols


def floats(cols: dict, name: str) -> np.ndarray:
    if name not in cols:
        raise SchemaError(f"missing column '{name}'")
    return np.array([float(x) if x != "" else np.nan for x in cols[name]])


def read_meta(path) -> dict:
    return json.loads(Path(path).read_text())
