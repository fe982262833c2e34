"""Writes experiment artifacts as CSV or JSON to a file or to stdout."""

import csv
import io
import json
import logging
import sys
from typing import Iterable, List, Optional, Sequence

import numpy as np

from utils.errors import OutputException


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def _plain(value):
    """Converts numpy scalars and arrays so json can serialize them."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_plain(item) for item in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def render_json(payload: dict) -> str:
    return json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"


def write_text(text: str, out: Optional[str]) -> None:
    """Writes `text` to `out`, or to stdout when `out` is None or '-'."""
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        logging.info(f"Wrote {len(text)} bytes to {out}")
    except OSError as e:
        logging.error(f"Could not write {out}: {e}")
        raise OutputException(out, e)


# --- Artifact layouts ---

PATH_HEADER = ("k", "x", "f")
FRAME_HEADER = ("j", "u", "value")
TAIL_HEADER = ("r", "survival", "bound")
SURFACE_HEADER = ("s", "t", "area")


def path_rows(points: np.ndarray, values: np.ndarray) -> List[tuple]:
    return [(k, float(x), float(f)) for k, (x, f) in enumerate(zip(points, values))]


def frame_rows(level: int, values: np.ndarray) -> List[tuple]:
    scale = float(1 << level)
    return [(j, j / scale, float(v)) for j, v in enumerate(values)]
