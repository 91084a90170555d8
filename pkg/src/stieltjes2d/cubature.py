"""Single-panel rules on a rectangle and their composite versions."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (DegenerateIntegrator, DomainError, GridPartition, HypothesisError, Measured, NodeOutOfDomain,
                   Rect, Surface, corners, delta11, grid_delta11)
from .quad import DEFAULT_TOL, cell_integrals, edge_integral_x, edge_integral_y, integrate_2d
from .rs_sum import rs_oracle


class RuleId(enum.Enum):
    OSTROWSKI_POINT = "ostrowski"
    TRAPEZOID4 = "trapezoid4"
    MIDPOINT_RS = "midpoint"
    SIMPSON9 = "simpson"
    COMPANION4 = "companion"
    TRAPEZOID_RS = "rs-trapezoid"
    TRAPEZOID_FUNCTIONAL = "trapezoid-functional"
    RIEMANN_COMPOSITE = "riemann"
    RS_COMPOSITE = "rs-composite"
    MERCER_BRACKET = "mercer"


def _check_point(q: Rect, x: float, y: float):
    if not q.contains(x, y):
        raise DomainError(f"point ({x},{y}) outside {q}")


def ostrowski_point_rule(f: Surface, q: Rect, x: float, y: float) -> float:
    _check_point(q, x, y)
    return q.area * f.at(x, y)


def trapezoid4_rule(f: Surface, q: Rect) -> float:
    """Area/4 times the mixed corner increment of f."""
    return 0.25 * q.area * delta11(f, q)


def simpson_rule(f: Surface, q: Rect) -> float:
    """Nine-point combination with the alternating edge signs, not normalised for constants."""
    mx, my = q.center
    xs = np.array([mx, q.b, mx, mx, q.a])
    ys = np.array([q.d, my, my, q.c, my])
    top, right, centre, bottom, left = f(xs, ys)
    return q.area / 36.0 * delta11(f, q) + q.area / 9.0 * (top + right + 4 * centre - bottom - left)


def companion_rule(f: Surface, q: Rect, x: float, y: float) -> float:
    mx, my = q.center
    if not (q.a <= x <= mx and q.c <= y <= my):
        raise DomainError(f"companion point ({x},{y}) must lie in the lower-left quarter of {q}")
    xr, yr = q.a + q.b - x, q.c + q.d - y
    v = f(np.array([x, xr, x, xr]), np.array([y, y, yr, yr]))
    return 0.25 * q.area * float(np.sum(v))


# ---------------------------------------------------------------------------
# Stieltjes rules built from integrator moments


@dataclass(frozen=True)
class IntegratorMoments:
    """Corner values, edge integrals and double integral of an integrator g."""

    corners: tuple  # g(a,c), g(a,d), g(b,c), g(b,d)
    bottom: float  # integral of g(., c)
    top: float  # integral of g(., d)
    left: float  # integral of g(a, .)
    right: float  # integral of g(b, .)
    total: float
    error: float

    @property
    def delta(self) -> float:
        ac, ad, bc, bd = self.corners
        return ac - ad - bc + bd


def integrator_moments(g: Surface, q: Rect, tol: float = DEFAULT_TOL) -> IntegratorMoments:
    parts = [edge_integral_x(g, q.a, q.b, q.c, tol), edge_integral_x(g, q.a, q.b, q.d, tol),
             edge_integral_y(g, q.c, q.d, q.a, tol), edge_integral_y(g, q.c, q.d, q.b, tol),
             integrate_2d(g, q, tol)]
    bad = [p for p in parts if not p.converged]
    if bad:
        raise ArithmeticError(f"integrator quadrature did not converge for {g.descriptor}")
    return IntegratorMoments(corners(g, q), *(p.value for p in parts), sum(p.error for p in parts))


@dataclass(frozen=True)
class TrapezoidWeights:
    A: float
    B: float
    C: float
    D: float


def rs_trapezoid_weights(g: Surface, q: Rect, tol: float = DEFAULT_TOL) -> TrapezoidWeights:
    mo = integrator_moments(g, q, tol)
    w, h = q.width, q.height
    G = mo.total / q.area
    ac, ad, bc, bd = mo.corners
    A = ac - mo.bottom / w - mo.left / h + G
    B = -(ad - mo.top / w - mo.left / h + G)
    C = -(bc - mo.bottom / w - mo.right / h + G)
    D = bd - mo.top / w - mo.right / h + G
    return TrapezoidWeights(A, B, C, D)


def rs_trapezoid_rule(f: Surface, g: Surface, q: Rect, quadrature_tol: float = DEFAULT_TOL) -> float:
    w = rs_trapezoid_weights(g, q, quadrature_tol)
    fac, fad, fbc, fbd = corners(f, q)
    return w.A * fac + w.B * fad + w.C * fbc + w.D * fbd


@dataclass(frozen=True)
class MidpointResult:
    value: float
    node: tuple
    weight: float


def rs_midpoint_node(g: Surface, q: Rect, quadrature_tol: float = DEFAULT_TOL) -> tuple[float, float, float]:
    """Node (t, s) and weight of the one-point Stieltjes rule exact for 1, x and y."""
    mo = integrator_moments(g, q, quadrature_tol)
    ac, ad, bc, bd = mo.corners
    den = mo.delta
    if abs(den) <= 1e-12 * max(1.0, *(abs(v) for v in mo.corners)):
        raise DegenerateIntegrator(f"mixed increment of {g.descriptor} vanishes on {q}")
    t = (q.b * (bd - bc) - q.a * (ad - ac) - (mo.top - mo.bottom)) / den
    s = (q.d * (bd - ad) - q.c * (bc - ac) - (mo.right - mo.left)) / den
    slack_x, slack_y = 1e-12 * q.width, 1e-12 * q.height
    if not (q.a - slack_x <= t <= q.b + slack_x and q.c - slack_y <= s <= q.d + slack_y):
        raise NodeOutOfDomain(f"rule node ({t},{s}) lies outside {q}")
    return t, s, den


def rs_midpoint_rule(f: Surface, g: Surface, q: Rect, quadrature_tol: float = DEFAULT_TOL) -> MidpointResult:
    t, s, w = rs_midpoint_node(g, q, quadrature_tol)
    return MidpointResult(w * f.at(t, s), (t, s), w)


# ---------------------------------------------------------------------------
# functionals and composite rules


def trapezoid_functional(f: Surface, u: Surface, q: Rect, tol: float = 1e-8,
                         max_cells_per_axis: Optional[int] = None) -> Measured:
    """Corner average of f times the mixed increment of u, minus the RS integral."""
    rep = rs_oracle(f, u, q, tol, max_cells_per_axis)
    avg = 0.25 * sum(corners(f, q))
    return Measured(avg * delta11(u, q) - rep.value, rep.error_estimate, rep.converged)


def composite_riemann(f: Surface, p: GridPartition) -> float:
    dx = np.diff(p.xs)[:, None]
    dy = np.diff(p.ys)[None, :]
    return float(np.sum(dx * dy * f(p.tag_x, p.tag_y)))


def composite_rs(f: Surface, g: Surface, p: GridPartition, tol: float = DEFAULT_TOL) -> float:
    """Sum over cells of (mixed increment of g / cell area) times the cell integral of f."""
    gv = g(p.xs[:, None], p.ys[None, :])
    areas = np.diff(p.xs)[:, None] * np.diff(p.ys)[None, :]
    return float(np.sum(grid_delta11(gv) / areas * cell_integrals(f, p.xs, p.ys)))


# ---------------------------------------------------------------------------
# bracket for integrands with nonnegative mixed partial


@dataclass(frozen=True)
class Bracket:
    lower: float
    upper: float
    nodes: tuple


def mercer_bracket(f: Surface, g: Surface, q: Rect, tol: float = DEFAULT_TOL, check_samples: int = 17) -> Bracket:
    """Lower end from the one-point node equations, upper end from the four-corner rule.

    The node equations are linear in t and s, so they are solved in closed
    form; the solution coincides with the one-point rule node.  The mixed
    partial of f is sampled on a grid when available and must be nonnegative.
    """
    fxy = f.partial(1, 1)
    if fxy is not None:
        xs = np.linspace(q.a, q.b, check_samples)
        ys = np.linspace(q.c, q.d, check_samples)
        v = fxy(xs[:, None], ys[None, :])
        scale = max(1.0, float(np.max(np.abs(v))))
        if float(v.min()) < -1e-9 * scale:
            raise HypothesisError(f"mixed partial of {f.descriptor} is negative somewhere on {q}")
    t, s, w = rs_midpoint_node(g, q, tol)
    return Bracket(w * f.at(t, s), rs_trapezoid_rule(f, g, q, tol), (t, s))


# ---------------------------------------------------------------------------
# dyadic refinement tables


def cell_bivariations(f: Surface, xs: np.ndarray, ys: np.ndarray, sub: int = 16) -> np.ndarray:
    """Bivariation of f on every cell of the node grid.

    With a mixed-partial in the metadata this is the cell integral of its
    absolute value; otherwise each cell is subdivided ``sub`` times per axis
    and the Vitali sum of the refined grid is taken (a lower estimate).
    """
    fts = f.partial(1, 1)
    if fts is not None and not f.jumps_x and not f.jumps_y:
        return np.abs(cell_integrals(Surface(lambda t, s: np.abs(fts(t, s)), "|f_ts|"), xs, ys, m=12))
    fx = np.concatenate([np.linspace(xs[i], xs[i + 1], sub + 1)[:-1] for i in range(len(xs) - 1)] + [xs[-1:]])
    fy = np.concatenate([np.linspace(ys[j], ys[j + 1], sub + 1)[:-1] for j in range(len(ys) - 1)] + [ys[-1:]])
    d = np.abs(grid_delta11(f(fx[:, None], fy[None, :])))
    nx, ny = len(xs) - 1, len(ys) - 1
    return d.reshape(nx, sub, ny, sub).sum(axis=(1, 3))


@dataclass(frozen=True)
class RefinementRow:
    level: int
    cells: int
    estimate: float
    reference: float
    bound: Optional[float]

    @property
    def error(self) -> float:
        return abs(self.estimate - self.reference)


def riemann_cell_bound(p: GridPartition, V: np.ndarray) -> float:
    """Sum over cells of the one-point (Ostrowski-type) bound at each cell's tag."""
    w = np.diff(p.xs)[:, None]
    h = np.diff(p.ys)[None, :]
    mx = 0.5 * (p.xs[:-1] + p.xs[1:])[:, None]
    my = 0.5 * (p.ys[:-1] + p.ys[1:])[None, :]
    return float(np.sum((w / 2 + np.abs(p.tag_x - mx)) * (h / 2 + np.abs(p.tag_y - my)) * V))


def refinement_table(rule: str, f: Surface, q: Rect, levels: int, g: Optional[Surface] = None, tags: str = "lower",
                     tol: float = 1e-10, max_cells: Optional[int] = None) -> list[RefinementRow]:
    """Composite rule on uniform 2^k x 2^k partitions for k = 1..levels.

    ``riemann`` is compared with the plain double integral and carries the
    summed per-cell bound; ``rs-composite`` is compared with the oracle value
    of the Stieltjes integral against ``g``.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    rule = RuleId(rule)
    if rule is RuleId.RIEMANN_COMPOSITE:
        ref = f.integral(q)
        ref = ref if ref is not None else integrate_2d(f, q, tol).value
    elif rule is RuleId.RS_COMPOSITE:
        if g is None:
            raise ValueError("rs-composite needs an integrator")
        ref = rs_oracle(f, g, q, 1e-9, max_cells).value
    else:
        raise ValueError(f"no refinement table for rule {rule.value!r}")
    rows = []
    for k in range(1, levels + 1):
        p = GridPartition.uniform(q, 2 ** k, tags=tags)
        if rule is RuleId.RIEMANN_COMPOSITE:
            est = composite_riemann(f, p)
            bound = riemann_cell_bound(p, cell_bivariations(f, p.xs, p.ys))
        else:
            est, bound = composite_rs(f, g, p), None
        rows.append(RefinementRow(k, 4 ** k, est, ref, bound))
    return rows
