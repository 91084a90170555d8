"""Regularity estimation: bivariation, Arzela variation, bimonotonicity and constants."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import qmc

from .core import (Box, DataError, GridPartition, Holder, Lipschitz, Range, Rect, Surface, grid_delta11)

INFLATION = 1.25
DEFAULT_TOL = 1e-4
MAX_LEVEL = 10


@dataclass(frozen=True)
class VariationEstimate:
    value: float
    levels: tuple
    converged: bool
    resolution: int


def _node_values(f: Surface, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    v = f(xs[:, None], ys[None, :])
    if not np.all(np.isfinite(v)):
        raise DataError(f"{f.descriptor} produced non-finite values")
    return v


def vitali_sum(f: Surface, p: GridPartition) -> float:
    return float(np.sum(np.abs(grid_delta11(_node_values(f, p.xs, p.ys)))))


def _vitali_on(f: Surface, box: Box, n: int) -> float:
    xs = np.linspace(box.a, box.b, n + 1)
    ys = np.linspace(box.c, box.d, n + 1)
    return float(np.sum(np.abs(grid_delta11(_node_values(f, xs, ys)))))


def _refine(measure, tol: float, max_level: int, min_level: int) -> VariationEstimate:
    levels = []
    converged = False
    for k in range(max_level + 1):
        levels.append(measure(2 ** k))
        if k >= max(1, min_level):
            rise = levels[-1] - levels[-2]
            if rise <= tol * abs(levels[-1]):
                converged = True
                break
    return VariationEstimate(max(levels), tuple(levels), converged, 2 ** (len(levels) - 1))


def vitali_bivariation(f: Surface, q: Box, tol: float = DEFAULT_TOL, max_level: int = MAX_LEVEL,
                       min_level: int = 1) -> VariationEstimate:
    """Lower estimate of the total bivariation from dyadic Vitali sums.

    Degenerate boxes have zero bivariation.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if q.degenerate:
        return VariationEstimate(0.0, (0.0,), True, 0)
    return _refine(lambda n: _vitali_on(f, q, n), tol, max_level, min_level)


def staircase_max(values: np.ndarray) -> float:
    """Largest sum of |increments| along a monotone lattice path from [0,0] to [-1,-1].

    Right and up unit steps suffice: by the triangle inequality any increasing
    chain through lattice points is dominated by a staircase through it.
    """
    nx, ny = values.shape
    dx = np.abs(np.diff(values, axis=0))
    dy = np.abs(np.diff(values, axis=1))
    best = np.full((nx, ny), -np.inf)
    best[0, 0] = 0.0
    for k in range(1, nx + ny - 1):
        i = np.arange(max(0, k - ny + 1), min(nx - 1, k) + 1)
        j = k - i
        cand = np.full(i.shape, -np.inf)
        m = i > 0
        cand[m] = best[i[m] - 1, j[m]] + dx[i[m] - 1, j[m]]
        m = j > 0
        cand[m] = np.maximum(cand[m], best[i[m], j[m] - 1] + dy[i[m], j[m] - 1])
        best[i, j] = cand
    return float(best[-1, -1])


def arzela_variation(f: Surface, q: Rect, tol: float = DEFAULT_TOL, max_level: int = MAX_LEVEL,
                     min_level: int = 1) -> VariationEstimate:
    """Arzela variation estimated over monotone staircase chains on dyadic grids."""
    if not tol > 0:
        raise ValueError("tol must be positive")

    def measure(n):
        xs = np.linspace(q.a, q.b, n + 1)
        ys = np.linspace(q.c, q.d, n + 1)
        return staircase_max(_node_values(f, xs, ys))

    return _refine(measure, tol, max_level, min_level)


class Bimonotonicity(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    NEITHER = "neither"


@dataclass(frozen=True)
class BimonotoneResult:
    kind: Bimonotonicity
    flat: bool
    min_delta: float
    max_delta: float


def bimonotone_check(f: Surface, q: Rect, n: int = 64) -> BimonotoneResult:
    """Classify by the sign of every mixed increment on an n x n grid.

    A grid where every increment vanishes is reported as increasing with
    ``flat`` set, since it is both.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    xs = np.linspace(q.a, q.b, n + 1)
    ys = np.linspace(q.c, q.d, n + 1)
    v = _node_values(f, xs, ys)
    d = grid_delta11(v)
    eps = 1e-12 * max(1.0, float(np.max(np.abs(v))))
    lo, hi = float(d.min()), float(d.max())
    if lo >= -eps and hi <= eps:
        return BimonotoneResult(Bimonotonicity.INCREASING, True, lo, hi)
    if lo >= -eps:
        return BimonotoneResult(Bimonotonicity.INCREASING, False, lo, hi)
    if hi <= eps:
        return BimonotoneResult(Bimonotonicity.DECREASING, False, lo, hi)
    return BimonotoneResult(Bimonotonicity.NEITHER, False, lo, hi)


def monotone_check(f: Surface, q: Rect, n: int = 64) -> Optional[str]:
    """'increasing' / 'decreasing' if f is monotone in each coordinate on the grid, else None."""
    xs = np.linspace(q.a, q.b, n + 1)
    ys = np.linspace(q.c, q.d, n + 1)
    v = _node_values(f, xs, ys)
    eps = 1e-12 * max(1.0, float(np.max(np.abs(v))))
    dx, dy = np.diff(v, axis=0), np.diff(v, axis=1)
    if dx.min() >= -eps and dy.min() >= -eps:
        return "increasing"
    if dx.max() <= eps and dy.max() <= eps:
        return "decreasing"
    return None


# ---------------------------------------------------------------------------
# sampled constants


def halton_points(q: Rect, samples: int) -> tuple[np.ndarray, np.ndarray]:
    pts = qmc.Halton(d=2, scramble=False).random(samples)
    x = q.a + pts[:, 0] * q.width
    y = q.c + pts[:, 1] * q.height
    cx = np.array([q.a, q.a, q.b, q.b])
    cy = np.array([q.c, q.d, q.c, q.d])
    return np.concatenate([x, cx]), np.concatenate([y, cy])


def _partners(x: np.ndarray, lo: float, hi: float) -> list[np.ndarray]:
    """Partner abscissae for ratio estimates: other samples, both ends, and short steps."""
    out = [np.roll(x, r) for r in (1, 2, 3, 5, 8, 13)]
    out += [np.full_like(x, lo), np.full_like(x, hi)]
    for h in (1e-1, 1e-2, 1e-3, 1e-4):
        step = h * (hi - lo)
        out.append(np.clip(x + step, lo, hi))
        out.append(np.clip(x - step, lo, hi))
    return out


def _ratio_max(f: Surface, x, y, lo, hi, beta, axis: int) -> float:
    base = f(x, y)
    best = 0.0
    for xp in _partners(x if axis == 0 else y, lo, hi):
        other = f(xp, y) if axis == 0 else f(x, xp)
        if not np.all(np.isfinite(other)):
            raise DataError(f"{f.descriptor} produced non-finite values")
        step = np.abs(xp - (x if axis == 0 else y))
        ok = step > 0
        if np.any(ok):
            best = max(best, float(np.max(np.abs(other - base)[ok] / step[ok] ** beta)))
    return best


def estimate_constants(f: Surface, q: Rect, kind: str, samples: int = 256, beta1: float = 1.0,
                       beta2: float = 1.0):
    """Sampled Range / Lipschitz / Holder certificate marked as estimated.

    Lipschitz and Holder ratio maxima are inflated by 1.25 because sampling
    can only under-estimate a supremum.
    """
    if samples < 64:
        raise ValueError("at least 64 samples are required")
    x, y = halton_points(q, samples)
    v = f(x, y)
    if not np.all(np.isfinite(v)):
        raise DataError(f"{f.descriptor} produced non-finite values")
    kind = kind.lower()
    if kind == "range":
        return Range(float(v.min()), float(v.max()), "estimated", samples)
    if kind == "lipschitz":
        L1 = _ratio_max(f, x, y, q.a, q.b, 1.0, 0)
        L2 = _ratio_max(f, x, y, q.c, q.d, 1.0, 1)
        return Lipschitz(INFLATION * L1, INFLATION * L2, "estimated", samples)
    if kind == "holder":
        H1 = _ratio_max(f, x, y, q.a, q.b, beta1, 0)
        H2 = _ratio_max(f, x, y, q.c, q.d, beta2, 1)
        return Holder(INFLATION * H1, INFLATION * H2, beta1, beta2, "estimated", samples)
    raise ValueError(f"unknown constant class {kind!r}")


# ---------------------------------------------------------------------------
# sup / inf of mixed increments over sub-rectangles


@dataclass(frozen=True)
class SupInf:
    S: float
    s: float
    S_box: Box
    s_box: Box
    stable: bool
    resolution: int


def _scan(u: Surface, q: Rect, n: int):
    xs = np.linspace(q.a, q.b, n + 1)
    ys = np.linspace(q.c, q.d, n + 1)
    U = _node_values(u, xs, ys)
    i1, i2 = np.triu_indices(n + 1, k=1)
    D = U[i2] - U[i1]  # rows: x-pairs, columns: y nodes
    # max over j1 < j2 of D[j2] - D[j1], and min likewise
    pmin = np.minimum.accumulate(D, axis=1)
    pmax = np.maximum.accumulate(D, axis=1)
    up = D[:, 1:] - pmin[:, :-1]
    dn = D[:, 1:] - pmax[:, :-1]
    k_up = np.unravel_index(np.argmax(up), up.shape)
    k_dn = np.unravel_index(np.argmin(dn), dn.shape)
    S, s = float(up[k_up]), float(dn[k_dn])

    def box_of(k, arg):
        row, j2 = k[0], k[1] + 1
        j1 = int(arg(D[row, :j2]))
        return Box(float(xs[i1[row]]), float(xs[i2[row]]), float(ys[j1]), float(ys[j2]))

    S_box = box_of(k_up, np.argmin) if S > 0 else Box(q.a, q.a, q.c, q.c)
    s_box = box_of(k_dn, np.argmax) if s < 0 else Box(q.a, q.a, q.c, q.c)
    return max(S, 0.0), min(s, 0.0), S_box, s_box


def bdp_sup_inf(u: Surface, q: Rect, n: int = 32, stability_tol: float = 1e-6) -> SupInf:
    """Largest and smallest mixed increment of u over grid sub-rectangles.

    Degenerate sub-rectangles count as 0, so S >= 0 >= s.  The scan runs at n
    and again at 2n (capped at 64) and reports whether the two agree.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    n = min(n, 64)
    fine = min(2 * n, 64)
    S0, s0, _, _ = _scan(u, q, n)
    S1, s1, Sb, sb = _scan(u, q, fine)
    scale = max(1.0, abs(S1), abs(s1))
    stable = abs(S1 - S0) <= stability_tol * scale and abs(s1 - s0) <= stability_tol * scale
    return SupInf(S1, s1, Sb, sb, stable, fine)
