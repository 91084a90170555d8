"""Sampled surfaces in a comma-separated grid format.

Layout: the top-left cell is empty, the first row holds ascending xs, the
first column ascending ys, and ``values[i][j] = f(xs[j], ys[i])``.  Between
nodes the surface is the bilinear interpolant; at nodes it returns the stored
value unchanged.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DataError, DomainError, Rect, Surface


@dataclass(frozen=True)
class GridFile:
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # shape (len(ys), len(xs))
    digest: str = ""
    path: str = ""

    def __post_init__(self):
        if self.values.shape != (len(self.ys), len(self.xs)):
            raise DataError(f"values shape {self.values.shape} does not match axes ({len(self.ys)}, {len(self.xs)})")
        for name, ax in (("xs", self.xs), ("ys", self.ys)):
            if len(ax) < 2 or np.any(np.diff(ax) <= 0):
                raise DataError(f"{name} must have at least two strictly increasing entries")
        if not np.all(np.isfinite(self.values)):
            raise DataError("grid values must be finite")

    @property
    def hull(self) -> Rect:
        return Rect(float(self.xs[0]), float(self.xs[-1]), float(self.ys[0]), float(self.ys[-1]))


def _cell(text: str, row: int, col: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DataError(f"row {row + 1}, column {col + 1}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise DataError(f"row {row + 1}, column {col + 1}: value is not finite")
    return v


def parse_grid(text: str, path: str = "") -> GridFile:
    lines = [ln for ln in text.replace("\r\n", "\n").split("\n") if ln.strip()]
    if len(lines) < 3:
        raise DataError("grid needs a header row and at least two data rows")
    rows = [ln.split(",") for ln in lines]
    width = len(rows[0])
    if rows[0][0].strip():
        raise DataError("row 1, column 1: the corner cell must be empty")
    for r, cells in enumerate(rows):
        if len(cells) != width:
            raise DataError(f"row {r + 1}: expected {width} cells, found {len(cells)}")
    xs = np.array([_cell(c, 0, j) for j, c in enumerate(rows[0]) if j > 0])
    ys = np.array([_cell(cells[0], r, 0) for r, cells in enumerate(rows) if r > 0])
    vals = np.array([[_cell(c, r, j) for j, c in enumerate(cells) if j > 0] for r, cells in enumerate(rows) if r > 0])
    for name, ax, pos in (("x", xs, lambda k: (0, k + 1)), ("y", ys, lambda k: (k + 1, 0))):
        bad = np.nonzero(np.diff(ax) <= 0)[0]
        if bad.size:
            r, c = pos(int(bad[0]) + 1)
            raise DataError(f"row {r + 1}, column {c + 1}: {name} axis is not strictly increasing")
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return GridFile(xs, ys, vals, digest, path)


def read_grid(path) -> GridFile:
    p = Path(path)
    return parse_grid(p.read_bytes().decode("utf-8"), str(p))


def format_grid(g: GridFile) -> str:
    out = ["," + ",".join(repr(float(x)) for x in g.xs)]
    for i, y in enumerate(g.ys):
        out.append(repr(float(y)) + "," + ",".join(repr(float(v)) for v in g.values[i]))
    return "\n".join(out) + "\n"


def write_grid(path, xs, ys, values) -> GridFile:
    g = GridFile(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), np.asarray(values, dtype=float))
    Path(path).write_text(format_grid(g), encoding="utf-8")
    return g


def sample_grid(f: Surface, xs, ys) -> GridFile:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    return GridFile(xs, ys, f(xs[None, :], ys[:, None]))


def grid_surface(g: GridFile) -> Surface:
    xs, ys, v = g.xs, g.ys, g.values
    hull = g.hull

    def fn(t, s):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        if np.any((t < xs[0]) | (t > xs[-1]) | (s < ys[0]) | (s > ys[-1])):
            raise DomainError(f"query outside the grid hull {hull}")
        j = np.clip(np.searchsorted(xs, t, side="right") - 1, 0, len(xs) - 2)
        i = np.clip(np.searchsorted(ys, s, side="right") - 1, 0, len(ys) - 2)
        x0, x1, y0, y1 = xs[j], xs[j + 1], ys[i], ys[i + 1]
        u = (t - x0) / (x1 - x0)
        w = (s - y0) / (y1 - y0)
        out = ((1 - u) * (1 - w) * v[i, j] + u * (1 - w) * v[i, j + 1]
               + (1 - u) * w * v[i + 1, j] + u * w * v[i + 1, j + 1])
        # nodes (and the far edges) return the stored value untouched
        on_x = (u == 0) | (u == 1)
        on_y = (w == 0) | (w == 1)
        node = on_x & on_y
        if np.any(node):
            jj = np.where(u == 1, j + 1, j)
            ii = np.where(w == 1, i + 1, i)
            out = np.where(node, v[ii, jj], out)
        return out

    tag = g.digest[:12] if g.digest else "memory"
    name = f"grid[{g.path or '<memory>'}#{tag}]"
    return Surface(fn, name, domain=hull)


def load_grid(path) -> Surface:
    return grid_surface(read_grid(path))
