"""Riemann-Stieltjes double sums and the dyadic refinement oracle."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import DataError, GridPartition, Rect, Surface, corners, grid_delta11

DEFAULT_MAX_CELLS = 2048
ENV_MAX_CELLS = "STIELTJES2D_MAX_CELLS"


def rs_double_sum(f: Surface, u: Surface, p: GridPartition) -> float:
    """Sum over cells of f(tag) times the mixed increment of u."""
    uv = u(p.xs[:, None], p.ys[None, :])
    fv = f(p.tag_x, p.tag_y)
    return float(np.sum(fv * grid_delta11(uv)))


@dataclass(frozen=True)
class OracleReport:
    value: float
    levels: tuple
    deltas: tuple
    converged: bool
    error_estimate: float
    cells: int
    tol: float = 0.0

    def __post_init__(self):
        if not self.levels:
            raise ValueError("oracle report needs at least one level")
        if len(self.deltas) != len(self.levels) - 1:
            raise ValueError("deltas must have one entry fewer than levels")


def max_cells(override: Optional[int] = None) -> int:
    if override is not None:
        return int(override)
    env = os.environ.get(ENV_MAX_CELLS)
    if env:
        return int(env)
    return DEFAULT_MAX_CELLS


def aligned_nodes(lo: float, hi: float, n: int, node_jumps: Sequence[float] = (),
                  centre_jumps: Sequence[float] = ()) -> np.ndarray:
    """Uniform nodes on [lo, hi], adjusted to declared discontinuities.

    ``node_jumps`` (integrand jumps) become nodes, so midpoint tags never sit on
    them.  ``centre_jumps`` (integrator jumps) become cell centres, so the
    integrator is only sampled off the jump while the tag lands on it.
    """
    h = (hi - lo) / n
    pts = np.linspace(lo, hi, n + 1)
    inner_c = [j for j in centre_jumps if lo < j < hi]
    for j in inner_c:
        # half-width shrinks near the ends so the centring cell stays inside
        hw = min(h / 4, (j - lo) / 2, (hi - j) / 2)
        keep = (np.abs(pts - j) >= h / 2) | (pts == lo) | (pts == hi)
        pts = np.concatenate([pts[keep], [j - hw, j + hw]])
    if any(j == hi for j in centre_jumps):
        # a right-continuous jump on the far edge: a sliver cell puts its tag next to it
        pts = np.concatenate([pts, [hi - 1e-9 * h]])
    inner_n = [j for j in node_jumps if lo < j < hi and all(abs(j - c) >= h / 2 for c in inner_c)]
    for j in inner_n:
        keep = (np.abs(pts - j) >= h / 4) | (pts == lo) | (pts == hi)
        pts = np.concatenate([pts[keep], [j]])
    return np.unique(pts)


def oracle_partition(f: Surface, u: Surface, q: Rect, n: int) -> GridPartition:
    xs = aligned_nodes(q.a, q.b, n, f.jumps_x, u.jumps_x)
    ys = aligned_nodes(q.c, q.d, n, f.jumps_y, u.jumps_y)
    return GridPartition.from_nodes(xs, ys, "mid")


def rs_oracle(f: Surface, u: Surface, q: Rect, tol: float = 1e-8, max_cells_per_axis: Optional[int] = None,
              min_cells: int = 1) -> OracleReport:
    """Brute-force reference for the RS double integral of f against u.

    Cells per axis double from ``min_cells`` until successive sums differ by
    less than tol * max(1, |value|) or the cap is reached.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    cap = max_cells(max_cells_per_axis)
    levels: list[float] = []
    deltas: list[float] = []
    n = max(1, int(min_cells))
    converged = False
    while True:
        val = rs_double_sum(f, u, oracle_partition(f, u, q, n))
        if not math.isfinite(val):
            raise DataError(f"non-finite RS sum at {n} cells per axis")
        if levels:
            deltas.append(val - levels[-1])
        levels.append(val)
        if deltas and abs(deltas[-1]) < tol * max(1.0, abs(val)):
            converged = True
            break
        if 2 * n > cap:
            break
        n *= 2
    err = 2.0 * abs(deltas[-1]) if deltas else math.inf
    return OracleReport(levels[-1], tuple(levels), tuple(deltas), converged, err, n, tol)


@dataclass(frozen=True)
class PartsReport:
    """Both sides of the corner-product identity for RS double integrals.

    ``residual`` compares the two RS integrals with the corner combination
    alone.  ``mixed`` is the cross term sum of f_t u_s + f_s u_t, computed from
    one-sided increments on the oracle mesh, and ``corrected_residual``
    compares lhs + mixed with the corner combination.
    """

    lhs: float
    rhs: float
    residual: float
    mixed: float
    corrected_residual: float
    converged: bool
    error_estimate: float
    reports: tuple = field(default_factory=tuple)


def cross_increment_sum(f: Surface, u: Surface, p: GridPartition) -> float:
    """Discrete analogue of the integral of f_t u_s + f_s u_t over the partition."""
    xs, ys, tx, ty = p.xs, p.ys, p.tag_x, p.tag_y
    dtf = f(xs[1:, None], ty) - f(xs[:-1, None], ty)
    dsu = u(tx, ys[None, 1:]) - u(tx, ys[None, :-1])
    dsf = f(tx, ys[None, 1:]) - f(tx, ys[None, :-1])
    dtu = u(xs[1:, None], ty) - u(xs[:-1, None], ty)
    return float(np.sum(dtf * dsu + dsf * dtu))


def cross_term(f: Surface, u: Surface, q: Rect, tol: float, max_cells_per_axis: Optional[int] = None) -> OracleReport:
    cap = max_cells(max_cells_per_axis)
    levels, deltas = [], []
    n = 1
    converged = False
    while True:
        val = cross_increment_sum(f, u, oracle_partition(f, u, q, n))
        if levels:
            deltas.append(val - levels[-1])
        levels.append(val)
        if deltas and abs(deltas[-1]) < tol * max(1.0, abs(val)):
            converged = True
            break
        if 2 * n > cap:
            break
        n *= 2
    err = 2.0 * abs(deltas[-1]) if deltas else math.inf
    return OracleReport(levels[-1], tuple(levels), tuple(deltas), converged, err, n, tol)


def corner_products(f: Surface, u: Surface, q: Rect) -> float:
    fac, fad, fbc, fbd = corners(f, q)
    uac, uad, ubc, ubd = corners(u, q)
    return fbd * ubd - fbc * ubc - fad * uad + fac * uac


def integration_by_parts(f: Surface, u: Surface, q: Rect, tol: float = 1e-9,
                         max_cells_per_axis: Optional[int] = None) -> PartsReport:
    r1 = rs_oracle(f, u, q, tol, max_cells_per_axis)
    r2 = rs_oracle(u, f, q, tol, max_cells_per_axis)
    r3 = cross_term(f, u, q, tol, max_cells_per_axis)
    lhs = r1.value + r2.value
    rhs = corner_products(f, u, q)
    return PartsReport(
        lhs=lhs,
        rhs=rhs,
        residual=abs(lhs - rhs),
        mixed=r3.value,
        corrected_residual=abs(lhs + r3.value - rhs),
        converged=r1.converged and r2.converged,
        error_estimate=r1.error_estimate + r2.error_estimate,
        reports=(r1, r2, r3),
    )
