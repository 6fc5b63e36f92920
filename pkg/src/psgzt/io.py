"""CSV/JSON output helpers shared by the CLI.

CSV is the primary data format: mandatory headers, '.' decimal, 17
significant digits. Metadata (config echo, version, wall time) goes to a
sibling JSON file so data files stay byte-identical across reruns.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence


def fmt_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_cell(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


def meta_path(out_path) -> Path:
    p = Path(out_path)
    return p.with_name(p.stem + "_meta.json")
