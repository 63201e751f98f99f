"""Serialization: 17-digit JSON, field CSV, atomic writes, complex literals."""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .grid import DiskGrid, ScalarField


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        # JSON has no inf/nan; strings keep the file parseable
        return json.dumps(str(x))
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written at 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if obj is None:
        return "null"
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag])
    return json.dumps(obj)


def write_atomic(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path, obj) -> Path:
    return write_atomic(path, dumps(obj) + "\n")


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def field_csv(f: ScalarField) -> str:
    """CSV rows r,theta,x,y,value: center (if any), interior row-major, boundary (if any)."""
    g = f.grid
    lines = ["r,theta,x,y,value"]

    def row(r, t, v):
        lines.append(",".join(format(float(x), ".17g") for x in (r, t, r * np.cos(t), r * np.sin(t), v)))

    if f.center is not None:
        row(0.0, 0.0, f.center)
    for i, r in enumerate(g.radii):
        for j, t in enumerate(g.angles):
            row(r, t, f.values[i, j])
    if f.boundary_trace is not None:
        for t, v in zip(g.boundary_angles, f.boundary_trace):
            row(1.0, t, v)
    return "\n".join(lines) + "\n"


def write_field(path, f: ScalarField) -> Path:
    return write_atomic(path, field_csv(f))


def read_field(path, grid: DiskGrid) -> ScalarField:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    r = data[:, 0]
    center = data[r == 0.0, 4]
    interior = data[(r > 0.0) & (r < 1.0), 4]
    boundary = data[r == 1.0, 4]
    return ScalarField(
        grid,
        interior.reshape(grid.shape),
        float(center[0]) if len(center) else None,
        boundary if len(boundary) else None,
    )


def parse_complex(text: str) -> complex:
    """Parse 'a+bi' / 'a-bi' / 'bi' / 'a' literals."""
    s = text.strip().replace(" ", "").replace("I", "i")
    if not s:
        raise ValueError("empty complex literal")
    try:
        return complex(s.replace("i", "j"))
    except ValueError:
        raise ValueError(f"malformed complex literal {text!r}") from None


def parse_complex_list(text: str) -> list[complex]:
    return [parse_complex(p) for p in text.split(",") if p.strip()]


def parse_grid(text: str, refinement: float = 2.0) -> DiskGrid:
    """'NRxNT' -> DiskGrid."""
    try:
        nr, nt = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise ValueError(f"grid must look like NRxNT, got {text!r}") from None
    from .grid import make_grid

    return make_grid(nr, nt, refinement)
