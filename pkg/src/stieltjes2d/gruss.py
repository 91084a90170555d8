"""Chebyshev functionals on rectangles, the Korkine identity and Gruss-type bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import BoundedBivariation, DataError, Range, Rect, Surface
from .quad import gauss_legendre, integrate_2d, rule_1d
from .rs_sum import rs_oracle

DEFAULT_TOL = 1e-12


def product(f: Surface, g: Surface) -> Surface:
    return Surface(lambda x, y: f(x, y) * g(x, y), f"({f.descriptor})*({g.descriptor})",
                   jumps_x=sorted(set(f.jumps_x) | set(g.jumps_x)), jumps_y=sorted(set(f.jumps_y) | set(g.jumps_y)))


def _integral(f: Surface, q: Rect, tol: float) -> float:
    r = integrate_2d(f, q, tol)
    if not r.converged:
        raise ArithmeticError(f"quadrature for {f.descriptor} did not converge")
    return r.value


def mean(f: Surface, q: Rect, tol: float = DEFAULT_TOL) -> float:
    return _integral(f, q, tol) / q.area


def shift(f: Surface, q: Rect, tol: float = DEFAULT_TOL) -> Surface:
    """f minus its integral mean over q."""
    m = mean(f, q, tol)
    return Surface(lambda x, y: f(x, y) - m, f"S[{f.descriptor}]", jumps_x=f.jumps_x, jumps_y=f.jumps_y)


# ---------------------------------------------------------------------------
# Korkine identity


def _tensor_nodes(f: Surface, g: Surface, q: Rect, panels: int, m: int):
    jx = sorted(set(f.jumps_x) | set(g.jumps_x))
    jy = sorted(set(f.jumps_y) | set(g.jumps_y))
    x, wx = rule_1d(q.a, q.b, panels, jx, m)
    y, wy = rule_1d(q.c, q.d, panels, jy, m)
    X, Y = np.meshgrid(x, y, indexing="ij")
    W = wx[:, None] * wy[None, :]
    return X.ravel(), Y.ravel(), W.ravel()


def korkine_double(f: Surface, g: Surface, q: Rect, panels: int = 1, m: int = 6) -> float:
    """Half the integral over Q x Q of (f(p1) - f(p2)) (g(p1) - g(p2)), by an explicit tensor sum."""
    X, Y, W = _tensor_nodes(f, g, q, panels, m)
    fv, gv = f(X, Y), g(X, Y)
    df = fv[:, None] - fv[None, :]
    dg = gv[:, None] - gv[None, :]
    return 0.5 * float(W @ (df * dg) @ W)


def korkine_4d(f: Surface, g: Surface, q: Rect, tol: float = 1e-12, max_panels: int = 8) -> tuple[float, float]:
    """Value and error estimate of the quadruple integral, doubling panels until stable."""
    prev = korkine_double(f, g, q, 1)
    panels = 1
    while panels < max_panels:
        panels *= 2
        cur = korkine_double(f, g, q, panels)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur, abs(cur - prev)
        prev = cur
    return prev, math.inf


def korkine_sides(f: Surface, g: Surface, q: Rect, tol: float = 1e-12) -> tuple[float, float]:
    lhs = q.area * _integral(product(f, g), q, tol) - _integral(f, q, tol) * _integral(g, q, tol)
    rhs, _ = korkine_4d(f, g, q, tol)
    return lhs, rhs


def korkine_residual(f: Surface, g: Surface, q: Rect, tol: float = 1e-12) -> float:
    """|area * int fg - int f * int g - (1/2) int int (f1 - f2)(g1 - g2)|."""
    lhs, rhs = korkine_sides(f, g, q, tol)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Chebyshev functional


@dataclass(frozen=True)
class ChebyshevReport:
    T_value: float
    mean_f: float
    mean_g: float
    bound: float
    method: str
    T_korkine: float
    T_shifted: float

    @property
    def agreement(self) -> float:
        return abs(self.T_value - self.T_korkine)


def gruss_bound(f_range: Range, g_range: Range) -> float:
    return 0.25 * (f_range.M - f_range.m) * (g_range.M - g_range.m)


def chebyshev(f: Surface, g: Surface, q: Rect, tol: float = DEFAULT_TOL, f_range: Optional[Range] = None,
              g_range: Optional[Range] = None) -> ChebyshevReport:
    """Mean of fg minus the product of means, with the Korkine and shifted evaluations.

    ``bound`` is the range bound when both ranges are supplied, else NaN.
    """
    mf, mg = mean(f, q, tol), mean(g, q, tol)
    T = mean(product(f, g), q, tol) - mf * mg
    T4, _ = korkine_4d(f, g, q, tol)
    Ts = mean(product(shift(f, q, tol), g), q, tol)
    b = gruss_bound(f_range, g_range) if (f_range is not None and g_range is not None) else math.nan
    return ChebyshevReport(T, mf, mg, b, "direct", T4 / q.area ** 2, Ts)


def gruss_lipschitz_bounds(L_f: float, L_g: float, q: Rect, variant: str = "euclidean") -> float:
    """Lipschitz-type Gruss bounds.

    'euclidean': both maps Lipschitz for the Euclidean norm,
    L_f L_g / 12 * [(b-a)^2 + (d-c)^2].
    'product': increments bounded by L |x1-x2||y1-y2|, using the constant
    L_f L_g / 36 * (d-c)^4 (b-a)^4.
    """
    w, h = q.width, q.height
    if variant == "euclidean":
        return L_f * L_g / 12.0 * (w * w + h * h)
    if variant == "product":
        return L_f * L_g / 36.0 * h ** 4 * w ** 4
    raise ValueError(f"unknown variant {variant!r}")


def product_korkine_side(L_f: float, L_g: float, q: Rect) -> float:
    """What the Korkine identity yields under the product-increment condition: L_f L_g (b-a)^2 (d-c)^2 / 72."""
    return L_f * L_g * q.width ** 2 * q.height ** 2 / 72.0


# ---------------------------------------------------------------------------
# Peano-kernel representation


_PARTIAL_NODES = 12


def partial_integrals(g: Surface, q: Rect, t, s, m: int = _PARTIAL_NODES) -> np.ndarray:
    """G(t, s) = integral of g over [a, t] x [c, s], vectorised by a fixed tensor Gauss rule."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    x, w = gauss_legendre(m)
    ht = 0.5 * (t - q.a)
    hs = 0.5 * (s - q.c)
    X = q.a + ht[..., None, None] * (1 + x[:, None])
    Y = q.c + hs[..., None, None] * (1 + x[None, :])
    vals = g(X, Y)
    return ht * hs * np.einsum("...ij,i,j->...", vals, w, w)


def psi_kernel(g: Surface, q: Rect) -> Surface:
    """The kernel built from the four partial rectangle integrals of g around (t, s)."""
    a, b, c, d = q.a, q.b, q.c, q.d
    total = float(partial_integrals(g, q, b, d))

    def fn(t, s):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        G_ts = partial_integrals(g, q, t, s)
        G_bs = partial_integrals(g, q, np.full_like(t, b), s)
        G_td = partial_integrals(g, q, t, np.full_like(s, d))
        A_ul = G_td - G_ts  # [a,t] x [s,d]
        A_ur = total - G_bs - G_td + G_ts  # [t,b] x [s,d]
        A_ll = G_ts  # [a,t] x [c,s]
        A_lr = G_bs - G_ts  # [t,b] x [c,s]
        return ((s - c) * (t - a) * A_ur - (s - c) * (b - t) * A_ul
                - (d - s) * (t - a) * A_lr + (d - s) * (b - t) * A_ll)

    return Surface(fn, f"psi[{g.descriptor}]")


@dataclass(frozen=True)
class KernelReport:
    T_via_kernel: float
    T_direct: float
    residual_vs_direct: float
    kernel_error: float
    sup_kernel: float
    sup_bv_bound: Optional[float] = None
    lipschitz_bound: Optional[float] = None
    bimonotone_bound: Optional[float] = None


def _sup_abs(k: Surface, q: Rect, n: int = 65) -> float:
    xs = np.linspace(q.a, q.b, n)
    ys = np.linspace(q.c, q.d, n)
    return float(np.max(np.abs(k(xs[:, None], ys[None, :]))))


def _kernel_bounds(kernel: Surface, f: Surface, q: Rect, scale: float, V: Optional[BoundedBivariation],
                   L: Optional[float], bimonotone: bool, tol: float, max_cells: Optional[int]):
    sup = _sup_abs(kernel, q)
    b_sup = sup * V.V / scale if V is not None else None
    b_lip = None
    if L is not None:
        absk = Surface(lambda x, y: np.abs(kernel(x, y)), "|kernel|")
        b_lip = L * integrate_2d(absk, q, 1e-8).value / scale
    b_bim = None
    if bimonotone:
        absk = Surface(lambda x, y: np.abs(kernel(x, y)), "|kernel|")
        b_bim = rs_oracle(absk, f, q, tol, max_cells).value / scale
    return sup, b_sup, b_lip, b_bim


def cheby_kernel_psi(f: Surface, g: Surface, q: Rect, tol: float = 1e-8, max_cells: Optional[int] = None,
                     V: Optional[BoundedBivariation] = None, L: Optional[float] = None,
                     bimonotone: bool = False) -> KernelReport:
    """Evaluate T(f, g) as (1/area^2) times the RS integral of the kernel against f.

    The three bound branches (sup times bivariation, Lipschitz, bimonotone)
    are filled in when the matching data is supplied; all are divided by
    area^2 so they compare with |T| directly.
    """
    kernel = psi_kernel(g, q)
    rep = rs_oracle(kernel, f, q, tol, max_cells)
    scale = q.area ** 2
    Tk = rep.value / scale
    Td = chebyshev(f, g, q).T_value
    sup, b_sup, b_lip, b_bim = _kernel_bounds(kernel, f, q, scale, V, L, bimonotone, tol, max_cells)
    return KernelReport(Tk, Td, abs(Tk - Td), rep.error_estimate / scale, sup, b_sup, b_lip, b_bim)


# weighted version


def weighted_mean(f: Surface, p: Surface, q: Rect, tol: float = DEFAULT_TOL) -> float:
    P = _integral(p, q, tol)
    if not P > 0:
        raise DataError("weight must have positive integral")
    return _integral(product(p, f), q, tol) / P


def weighted_chebyshev(f: Surface, g: Surface, p: Surface, q: Rect, tol: float = DEFAULT_TOL) -> float:
    return weighted_mean(product(f, g), p, q, tol) - weighted_mean(f, p, q, tol) * weighted_mean(g, p, q, tol)


def weighted_kernel(g: Surface, p: Surface, q: Rect, point_term: bool = True) -> Surface:
    """Psi = P G* - P* G from cumulative integrals of p and p g.

    With ``point_term`` the G* combination uses the point value g(t, d);
    without it, the cumulative integral G(t, d), matching the pattern of P*.
    """
    b, d = q.b, q.d
    pg = product(p, g)
    Pbd = float(partial_integrals(p, q, b, d))
    Gbd = float(partial_integrals(pg, q, b, d))

    def fn(t, s):
        t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
        bb, dd = np.full_like(t, b), np.full_like(s, d)
        P = partial_integrals(p, q, t, s)
        G = partial_integrals(pg, q, t, s)
        Pstar = Pbd - partial_integrals(p, q, bb, s) - partial_integrals(p, q, t, dd) + P
        td = g(t, dd) if point_term else partial_integrals(pg, q, t, dd)
        Gstar = Gbd - partial_integrals(pg, q, bb, s) - td + G
        return P * Gstar - Pstar * G

    return Surface(fn, f"Psi[{g.descriptor};{p.descriptor}]")


def cheby_kernel_weighted(f: Surface, g: Surface, p: Surface, q: Rect, tol: float = 1e-8,
                          max_cells: Optional[int] = None, point_term: bool = True,
                          V: Optional[BoundedBivariation] = None, L: Optional[float] = None,
                          bimonotone: bool = False) -> KernelReport:
    kernel = weighted_kernel(g, p, q, point_term)
    rep = rs_oracle(kernel, f, q, tol, max_cells)
    scale = _integral(p, q, DEFAULT_TOL) ** 2
    Tk = rep.value / scale
    Td = weighted_chebyshev(f, g, p, q)
    sup, b_sup, b_lip, b_bim = _kernel_bounds(kernel, f, q, scale, V, L, bimonotone, tol, max_cells)
    return KernelReport(Tk, Td, abs(Tk - Td), rep.error_estimate / scale, sup, b_sup, b_lip, b_bim)


# ---------------------------------------------------------------------------
# Gruss-type bound for the Stieltjes mean functional


def aleph_gruss_bound(f_range: Range, q: Rect) -> float:
    """0.5 (M - m) (b - a)(d - c); the Lipschitz constant of g does not enter."""
    return 0.5 * (f_range.M - f_range.m) * q.area


def aleph_gruss_intermediate(f: Surface, L: float, q: Rect, tol: float = 1e-6) -> float:
    """L times the integral of |f - mean f|, the step before the range estimate."""
    m = mean(f, q)
    dev = Surface(lambda x, y: np.abs(f(x, y) - m), "|f-mean|", jumps_x=f.jumps_x, jumps_y=f.jumps_y)
    return L * _integral(dev, q, tol)
