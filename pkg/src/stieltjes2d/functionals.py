"""Error functionals whose size the bound catalog controls.

Every functional is evaluated from its defining integrals with the refinement
oracle (Stieltjes parts) or Gauss-Legendre quadrature (plain double integrals).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import Box, Measured, Rect, Surface, corners, delta11
from .quad import integrate_2d
from .rs_sum import rs_oracle

ORACLE_TOL = 1e-8


@dataclass(frozen=True)
class Split:
    """A rule estimate and the reference value it approximates."""

    estimate: float
    reference: float
    error: float
    converged: bool = True

    @property
    def residual(self) -> float:
        return abs(self.estimate - self.reference)


def riemann_integral(f: Surface, q: Box, tol: float = 1e-12) -> Measured:
    r = integrate_2d(f, q, tol)
    return Measured(r.value, r.error, r.converged)


def rs_integral(f: Surface, u: Surface, q: Rect, tol: float = ORACLE_TOL,
                max_cells: Optional[int] = None) -> Measured:
    r = rs_oracle(f, u, q, tol, max_cells)
    return Measured(r.value, r.error_estimate, r.converged)


# ---------------------------------------------------------------------------
# plain-integral rules


def ostrowski_split(f: Surface, q: Rect, x: float, y: float) -> Split:
    ref = riemann_integral(f, q)
    return Split(q.area * f.at(x, y), ref.value, ref.error, ref.converged)


# ---------------------------------------------------------------------------
# Stieltjes functionals with an estimate / integral split


def omega_split(f: Surface, u: Surface, q: Rect, m: float, M: float, tol: float = ORACLE_TOL,
                max_cells: Optional[int] = None) -> Split:
    """Mid-range rule 0.5 (m + M) times the mixed increment of u."""
    ref = rs_integral(f, u, q, tol, max_cells)
    return Split(0.5 * (m + M) * delta11(u, q), ref.value, ref.error, ref.converged)


def theta_split(f: Surface, u: Surface, q: Rect, x: float, y: float, tol: float = ORACLE_TOL,
                max_cells: Optional[int] = None) -> Split:
    ref = rs_integral(f, u, q, tol, max_cells)
    return Split(delta11(u, q) * f.at(x, y), ref.value, ref.error, ref.converged)


def aleph_split(f: Surface, g: Surface, q: Rect, tol: float = ORACLE_TOL,
                max_cells: Optional[int] = None) -> Split:
    """Integral of f against g versus the g-increment weighted mean of f."""
    ref = rs_integral(f, g, q, tol, max_cells)
    mean = riemann_integral(f, q)
    return Split(delta11(g, q) / q.area * mean.value, ref.value, ref.error + mean.error, ref.converged)


def trapezoid_split(f: Surface, u: Surface, q: Rect, tol: float = ORACLE_TOL,
                    max_cells: Optional[int] = None) -> Split:
    ref = rs_integral(f, u, q, tol, max_cells)
    return Split(0.25 * sum(corners(f, q)) * delta11(u, q), ref.value, ref.error, ref.converged)


# ---------------------------------------------------------------------------
# corner blend and kernel functionals


def phi_surface(f: Surface, q: Rect) -> Surface:
    """Bilinear corner combination used to define psi_f."""
    fac, fad, fbc, fbd = corners(f, q)
    a, b, c, d = q.a, q.b, q.c, q.d

    def fn(t, s):
        return (t - a) * ((s - c) * fac + (d - s) * fad) + (b - t) * ((d - s) * fbd + (s - c) * fbc)

    return Surface(fn, f"phi[{f.descriptor}]")


def psi_surface(f: Surface, q: Rect) -> Surface:
    phi = phi_surface(f, q)
    area = q.area

    def fn(t, s):
        return f(t, s) - phi(t, s) / area

    return Surface(fn, f"psi[{f.descriptor}]", jumps_x=f.jumps_x, jumps_y=f.jumps_y)


def psi_split(f: Surface, u: Surface, q: Rect, tol: float = ORACLE_TOL,
              max_cells: Optional[int] = None) -> Split:
    """Integral of f du against the integral of phi_f / area du.

    Both sums run on the same meshes, so their difference is the oracle value
    of the integral of psi_f du.
    """
    ref = rs_oracle(f, u, q, tol, max_cells)
    phi = phi_surface(f, q)
    scaled = Surface(lambda t, s: phi(t, s) / q.area, "phi/area", jumps_x=f.jumps_x, jumps_y=f.jumps_y)
    est = rs_oracle(scaled, u, q, tol, max_cells)
    return Split(est.value, ref.value, ref.error_estimate + est.error_estimate, ref.converged and est.converged)


def kernel_E_surface(f: Surface, q: Rect) -> Surface:
    a, b, c, d = q.a, q.b, q.c, q.d
    fac, fad, fbc, fbd = corners(f, q)

    def fn(t, s):
        fts = f(t, s)
        ftc, ftd = f(t, c), f(t, d)
        fas, fbs = f(a, s), f(b, s)
        return ((t - a) * (s - c) * (fts - ftc - fas + fac)
                + (t - a) * (s - d) * (ftd - fts - fad + fas)
                + (t - b) * (s - c) * (fbs - fbc - fts + ftc)
                + (t - b) * (s - d) * (fbd - fbs - ftd + fts))

    return Surface(fn, f"KE[{f.descriptor}]", jumps_x=f.jumps_x, jumps_y=f.jumps_y)


def kernel_F_surface(u: Surface, q: Rect) -> Surface:
    a, b, c, d = q.a, q.b, q.c, q.d
    uac, uad, ubc, ubd = corners(u, q)

    def fn(t, s):
        uts = u(t, s)
        utc, utd = u(t, c), u(t, d)
        uas, ubs = u(a, s), u(b, s)
        return ((t - a) * (s - c) * (uts - utc - uas + uac)
                + (t - a) * (d - s) * (utd - uts - uad + uas)
                + (b - t) * (s - c) * (ubs - ubc - uts + utc)
                + (b - t) * (d - s) * (ubd - ubs - utd + uts))

    return Surface(fn, f"KF[{u.descriptor}]", jumps_x=u.jumps_x, jumps_y=u.jumps_y)


def E_functional(f: Surface, u: Surface, q: Rect, tol: float = ORACLE_TOL,
                 max_cells: Optional[int] = None) -> Measured:
    r = rs_oracle(kernel_E_surface(f, q), u, q, tol, max_cells)
    return Measured(r.value / q.area, r.error_estimate / q.area, r.converged)


def F_functional(f: Surface, u: Surface, q: Rect, tol: float = ORACLE_TOL,
                 max_cells: Optional[int] = None) -> Measured:
    r = rs_oracle(kernel_F_surface(u, q), f, q, tol, max_cells)
    return Measured(r.value / q.area, r.error_estimate / q.area, r.converged)


def grid_mean(f: Surface, q: Rect) -> float:
    return riemann_integral(f, q).value / q.area


def corner_mean_sum(w: Surface, v: Surface, q: Rect) -> float:
    """Sum of +/-[w(corner) - mean w] * v(corner) with signs + (b,d), - (b,c), - (a,d), + (a,c)."""
    mean = grid_mean(w, q)
    wac, wad, wbc, wbd = corners(w, q)
    vac, vad, vbc, vbd = corners(v, q)
    return (wbd - mean) * vbd - (wbc - mean) * vbc - (wad - mean) * vad + (wac - mean) * vac
