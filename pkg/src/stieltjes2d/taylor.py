"""Corner-Taylor approximation of a function on a rectangle with a Stieltjes remainder.

For order n the approximation blends the four corner values and corrects with
corner values of the order-n partials; the remainder integrates a
piecewise-polynomial kernel against an order-n partial of f.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (Box, BoundedBivariation, CertificateMismatch, DomainError, Measured, QuadrantBivariation, Rect,
                   Surface, corners, rect_split)
from .quad import integrate_2d_fn
from .rs_sum import rs_oracle

MAX_ORDER = 4
FD_REL = 1e-3
SIGN_KERNEL = "kernel"
SIGN_PROOF = "proof"


# ---------------------------------------------------------------------------
# partial derivatives


def fd_partial(f: Surface, i: int, j: int, h: float) -> Surface:
    """Nested central differences for d^(i+j) f / dt^i ds^j with step h."""
    if i == 0 and j == 0:
        return f

    def fn(t, s):
        t = np.asarray(t, dtype=float)
        s = np.asarray(s, dtype=float)
        out = 0.0
        for a in range(i + 1):
            for b in range(j + 1):
                w = math.comb(i, a) * math.comb(j, b) * (-1) ** (a + b)
                out = out + w * f(t + (i / 2 - a) * h, s + (j / 2 - b) * h)
        return out / h ** (i + j)

    return Surface(fn, f"D{i},{j}[{f.descriptor}]~")


def _partial(f: Surface, i: int, j: int, h: float) -> tuple[Surface, bool]:
    got = f.partial(i, j)
    if got is not None:
        return got, True
    return fd_partial(f, i, j, h), False


@dataclass(frozen=True)
class DnField:
    """Order-n partials of f, indexed by j for the split (n - j, j).

    ``integrator`` is the index of the partial used as the Stieltjes
    integrator of the remainder; ``mixed`` is its t-s mixed partial (the
    density of that integrator's mixed increments).
    """

    n: int
    partials: tuple
    integrator: int
    mixed: Surface
    exact: bool

    @property
    def Dn(self) -> Surface:
        return self.partials[self.integrator]

    def at_corners(self, j: int, q: Rect) -> tuple[float, float, float, float]:
        return corners(self.partials[j], q)

    @classmethod
    def from_surface(cls, f: Surface, n: int, q: Rect, integrator: Optional[int] = None,
                     h: Optional[float] = None, validate: bool = True) -> "DnField":
        if not (0 <= n <= MAX_ORDER):
            raise ValueError(f"order must lie in 0..{MAX_ORDER}")
        if integrator is None:
            integrator = n // 2
        if not 0 <= integrator <= n:
            raise ValueError("integrator index must lie in 0..n")
        h = h if h is not None else FD_REL * min(q.width, q.height)
        parts, exact = [], True
        for j in range(n + 1):
            p, ok = _partial(f, n - j, j, h)
            parts.append(p)
            exact &= ok
        mixed, ok = _partial(f, n - integrator + 1, integrator + 1, h)
        field_ = cls(n, tuple(parts), integrator, mixed, exact and ok)
        if validate:
            field_.check(f, q)
        return field_

    def check(self, f: Surface, q: Rect, points: int = 5, rel: float = 1e-4, seed: int = 0):
        """Compare metadata partials with finite differences at interior points."""
        rng = np.random.default_rng(seed)
        h = FD_REL * min(q.width, q.height)
        xs = rng.uniform(q.a + 0.1 * q.width, q.b - 0.1 * q.width, points)
        ys = rng.uniform(q.c + 0.1 * q.height, q.d - 0.1 * q.height, points)
        for j, p in enumerate(self.partials):
            if self.n == 0:
                break
            ref = fd_partial(f, self.n - j, j, h)(xs, ys)
            got = p(xs, ys)
            scale = np.maximum(1.0, np.abs(ref))
            if np.any(np.abs(got - ref) > rel * scale * max(1, 10 ** (self.n - 1))):
                raise ValueError(f"partial ({self.n - j},{j}) is inconsistent with finite differences")


# ---------------------------------------------------------------------------
# approximation and remainder


def _check_point(q: Rect, x: float, y: float):
    if not q.contains(x, y):
        raise DomainError(f"point ({x},{y}) outside {q}")


def bilinear_blend(f: Surface, q: Rect, x: float, y: float) -> float:
    fac, fad, fbc, fbd = corners(f, q)
    a, b, c, d = q.a, q.b, q.c, q.d
    return ((b - x) * (d - y) * fac + (b - x) * (y - c) * fad + (x - a) * (d - y) * fbc
            + (x - a) * (y - c) * fbd) / q.area


def taylor_blend_An(f: Surface, dn: DnField, q: Rect, x: float, y: float) -> float:
    """Bilinear corner blend plus the j = 1..n corner-partial corrections."""
    _check_point(q, x, y)
    a, b, c, d = q.a, q.b, q.c, q.d
    n = dn.n
    total = 0.0
    for j in range(1, n + 1):
        Dac, Dad, Dbc, Dbd = dn.at_corners(j, q)
        sgn = (-1) ** j
        left = (b - x) * (x - a) ** (n - j) * ((y - c) ** (j - 1) * Dac + sgn * (d - y) ** (j - 1) * Dad)
        right = (x - a) * (b - x) ** (n - j) * (sgn * (y - c) ** (j - 1) * Dbc + (d - y) ** (j - 1) * Dbd)
        total += math.comb(n, j) / math.factorial(j) * (left + right)
    return bilinear_blend(f, q, x, y) + (y - c) * (d - y) / q.area * total


def _quadrant_signs(n: int, convention: str) -> tuple[int, int]:
    """Signs of the (SE, NW) branches; SW and NE are always +."""
    if convention == SIGN_KERNEL:
        s = (-1) ** n
    elif convention == SIGN_PROOF:
        s = (-1) ** (n + 1)
    else:
        raise ValueError(f"unknown sign convention {convention!r}")
    return s, s


def remainder_kernels(q: Rect, x: float, y: float, n: int, convention: str = SIGN_PROOF):
    """The four smooth branches of S_n as (box, Surface) pairs in SW, SE, NW, NE order."""
    a, b, c, d = q.a, q.b, q.c, q.d
    fac = 1.0 / math.factorial(n)
    s_se, s_nw = _quadrant_signs(n, convention)
    sw, se, nw, ne = rect_split(q, x, y)
    branches = [
        (sw, lambda t, s: fac * (x - t) ** n * (b - x) * (y - s) ** n * (d - y)),
        (se, lambda t, s: s_se * fac * (t - x) ** n * (x - a) * (y - s) ** n * (d - y)),
        (nw, lambda t, s: s_nw * fac * (x - t) ** n * (b - x) * (s - y) ** n * (y - c)),
        (ne, lambda t, s: fac * (t - x) ** n * (x - a) * (s - y) ** n * (y - c)),
    ]
    return [(box, Surface(fn, "S_n")) for box, fn in branches]


def _quadrant_rs(pairs, integrator: Surface, tol: float, max_cells: Optional[int]) -> Measured:
    live = [(box.to_rect(), kernel) for box, kernel in pairs if not box.degenerate]
    with ThreadPoolExecutor(max_workers=4) as pool:
        reps = list(pool.map(lambda bk: rs_oracle(bk[1], integrator, bk[0], tol, max_cells), live))
    # combined in the fixed SW, SE, NW, NE order
    total = math.fsum(r.value for r in reps)
    err = math.fsum(r.error_estimate for r in reps)
    return Measured(total, err, all(r.converged for r in reps))


def taylor_remainder_Bn(f: Surface, dn: DnField, q: Rect, x: float, y: float, tol: float = 1e-9,
                        max_cells: Optional[int] = None, convention: str = SIGN_PROOF) -> Measured:
    """(1/area) times the Stieltjes integral of S_n against the order-n partial, by quadrant."""
    _check_point(q, x, y)
    r = _quadrant_rs(remainder_kernels(q, x, y, dn.n, convention), dn.Dn, tol, max_cells)
    return Measured(r.value / q.area, r.error / q.area, r.converged)


@dataclass(frozen=True)
class Representation:
    value: float
    A: float
    B: float
    B_error: float

    @property
    def residual(self) -> float:
        return abs(self.A + self.B - self.value)


def representation(f: Surface, dn: DnField, q: Rect, x: float, y: float, tol: float = 1e-9,
                   max_cells: Optional[int] = None, convention: str = SIGN_PROOF) -> Representation:
    B = taylor_remainder_Bn(f, dn, q, x, y, tol, max_cells, convention)
    return Representation(f.at(x, y), taylor_blend_An(f, dn, q, x, y), B.value, B.error)


def arbitrate_sign(f: Surface, dn: DnField, q: Rect, points: Sequence[tuple[float, float]], tol: float = 1e-9,
                   max_cells: Optional[int] = None) -> tuple[str, dict]:
    """Pick the branch-sign convention with the smaller worst representation residual."""
    worst = {}
    for conv in (SIGN_KERNEL, SIGN_PROOF):
        worst[conv] = max(representation(f, dn, q, x, y, tol, max_cells, conv).residual for x, y in points)
    best = min(worst, key=worst.get)
    return best, worst


# midpoint split


@dataclass(frozen=True)
class MidpointSplit:
    E_M: float
    F_M: float
    F_error: float
    value: float

    @property
    def residual(self) -> float:
        return abs(self.E_M + self.F_M - self.value)


def midpoint_corner_sum(f: Surface, dn: DnField, q: Rect) -> float:
    n = dn.n
    total = 0.25 * sum(corners(f, q))
    for j in range(1, n + 1):
        Dac, Dad, Dbc, Dbd = dn.at_corners(j, q)
        sgn = (-1) ** j
        total += (math.comb(n, j) / math.factorial(j) * q.width ** (n - j) * q.height ** j
                  * (Dac + sgn * Dad + sgn * Dbc + Dbd)) / 2 ** (n + 2)
    return total


def midpoint_kernels(q: Rect, n: int, convention: str = SIGN_PROOF):
    """Branches of M_n in SW, SE, NW, NE order."""
    mx, my = q.center
    fac = q.area / (4 * math.factorial(n))
    s_se, s_nw = _quadrant_signs(n, convention)
    sw, se, nw, ne = rect_split(q, mx, my)
    branches = [
        (sw, lambda t, s: fac * (mx - t) ** n * (my - s) ** n),
        (se, lambda t, s: s_se * fac * (t - mx) ** n * (my - s) ** n),
        (nw, lambda t, s: s_nw * fac * (mx - t) ** n * (s - my) ** n),
        (ne, lambda t, s: fac * (t - mx) ** n * (s - my) ** n),
    ]
    return [(box, Surface(fn, "M_n")) for box, fn in branches]


def taylor_midpoint(f: Surface, dn: DnField, q: Rect, tol: float = 1e-9, max_cells: Optional[int] = None,
                    convention: str = SIGN_PROOF) -> MidpointSplit:
    E = midpoint_corner_sum(f, dn, q)
    F = _quadrant_rs(midpoint_kernels(q, dn.n, convention), dn.Dn, tol, max_cells)
    mx, my = q.center
    return MidpointSplit(E, F.value / q.area, F.error / q.area, f.at(mx, my))


# ---------------------------------------------------------------------------
# a-priori bounds


@dataclass(frozen=True)
class QuadrantConstants:
    """Per-quadrant constants at the split point (x, y), SW, SE, NW, NE order.

    ``kind`` is 'mixed-lipschitz' (the mixed increments of the order-n
    partial over any sub-rectangle are at most L times its area), or
    'L1', 'Lp', 'Linf' norms of the mixed partial of the order-n partial.
    """

    x: float
    y: float
    sw: float
    se: float
    nw: float
    ne: float
    kind: str = "mixed-lipschitz"
    p: float = math.inf

    def __post_init__(self):
        if min(self.sw, self.se, self.nw, self.ne) < 0:
            raise ValueError("quadrant constants must be nonnegative")


BV_FAMILIES = ("bv-quadrant", "bv-sup", "bv-p", "bv-max", "bv-sup-weak", "bv-p-weak", "bv-max-weak")
FAMILIES = BV_FAMILIES + ("lipschitz", "lipschitz-weak", "midpoint", "midpoint-lipschitz", "ac-inf", "ac-p", "ac-1")


def taylor_bounds(family: str, q: Rect, x: float, y: float, n: int, cert, p: float = 2.0) -> float:
    """Evaluate one remainder bound.

    BV families take a QuadrantBivariation of the order-n partial (and
    'bv-sup*' its total through the sum of the quadrants); 'midpoint' takes a
    BoundedBivariation; the Lipschitz and absolutely-continuous families take
    QuadrantConstants of the matching kind.
    """
    a, b, c, d = q.a, q.b, q.c, q.d
    area = q.area
    nf = math.factorial(n)
    if family == "midpoint":
        if not isinstance(cert, BoundedBivariation):
            raise CertificateMismatch("midpoint bound needs a BoundedBivariation certificate")
        return q.width ** n * q.height ** n / (2 ** (2 * n + 2) * nf) * cert.V
    if family == "midpoint-lipschitz":
        _need_quadrants(cert, "mixed-lipschitz")
        return (q.height * q.width) ** (n + 1) / (nf * 2 ** (2 * n + 4) * (n + 1) ** 2) * (
            cert.sw + cert.se + cert.nw + cert.ne)
    _check_point(q, x, y)
    if family in BV_FAMILIES:
        if not isinstance(cert, QuadrantBivariation):
            raise CertificateMismatch(f"{family} needs a QuadrantBivariation certificate")
        if (cert.x, cert.y) != (x, y):
            raise CertificateMismatch("quadrant variations were computed for a different split point")
        Vsw, Vse, Vnw, Vne = cert.V_sw, cert.V_se, cert.V_nw, cert.V_ne
        if family == "bv-quadrant":
            return ((x - a) ** n * (b - x) * (y - c) ** n * (d - y) * Vsw
                    + (x - a) ** n * (b - x) * (d - y) ** n * (y - c) * Vnw
                    + (b - x) ** n * (x - a) * (y - c) ** n * (d - y) * Vse
                    + (b - x) ** n * (x - a) * (d - y) ** n * (y - c) * Vne) / (nf * area)
        if n < 1:
            raise ValueError(f"{family} needs n >= 1")
        weak = family.endswith("-weak")
        pre = area / (16 * nf) if weak else (x - a) * (b - x) * (y - c) * (d - y) / (nf * area)
        base = family[:-5] if weak else family
        k = n - 1
        if base == "bv-sup":
            V = Vsw + Vse + Vnw + Vne
            return pre * (q.width / 2 + abs(x - (a + b) / 2)) ** k * (q.height / 2 + abs(y - (c + d) / 2)) ** k * V
        if base == "bv-p":
            if not p > 1:
                raise ValueError("p must exceed 1")
            qq = p / (p - 1)
            gx = ((x - a) ** (p * k) + (b - x) ** (p * k)) ** (1 / p)
            gy = ((y - c) ** (p * k) + (d - y) ** (p * k)) ** (1 / p)
            return pre * gx * gy * (Vsw ** qq + Vnw ** qq + Vse ** qq + Vne ** qq) ** (1 / qq)
        if base == "bv-max":
            return pre * max(Vsw, Vse, Vnw, Vne) * ((x - a) ** k + (b - x) ** k) * ((y - c) ** k + (d - y) ** k)
    if family in ("lipschitz", "lipschitz-weak"):
        _need_quadrants(cert, "mixed-lipschitz", x, y)
        brace = ((x - a) ** n * (cert.sw * (y - c) ** n + cert.nw * (d - y) ** n)
                 + (b - x) ** n * (cert.se * (y - c) ** n + cert.ne * (d - y) ** n))
        if family == "lipschitz":
            return (b - x) * (x - a) * (d - y) * (y - c) / (nf * (n + 1) ** 2 * area) * brace
        return area / (nf * 16 * (n + 1) ** 2) * brace
    if family in ("ac-inf", "ac-p", "ac-1"):
        kind = {"ac-inf": "Linf", "ac-p": "Lp", "ac-1": "L1"}[family]
        _need_quadrants(cert, kind, x, y)
        quads = [((b - x) * (d - y), x - a, y - c, cert.sw), ((b - x) * (y - c), x - a, d - y, cert.nw),
                 ((x - a) * (d - y), b - x, y - c, cert.se), ((x - a) * (y - c), b - x, d - y, cert.ne)]
        total = 0.0
        for w, u, v, norm in quads:
            if family == "ac-inf":
                inner = u ** (n + 1) * v ** (n + 1) / (n + 1) ** 2
            elif family == "ac-p":
                qq = cert.p / (cert.p - 1)
                inner = u ** (n + 1 / qq) * v ** (n + 1 / qq) / (n * qq + 1) ** (1 / qq)
            else:
                inner = u ** n * v ** n
            total += w * inner * norm
        return total / (nf * area)
    raise ValueError(f"unknown bound family {family!r}")


def _need_quadrants(cert, kind: str, x: Optional[float] = None, y: Optional[float] = None):
    if not isinstance(cert, QuadrantConstants) or cert.kind != kind:
        raise CertificateMismatch(f"needs QuadrantConstants of kind {kind!r}")
    if x is not None and (cert.x, cert.y) != (x, y):
        raise CertificateMismatch("quadrant constants were computed for a different split point")


# certificates computed from the mixed partial


def _quadrant_boxes(q: Rect, x: float, y: float) -> tuple[Box, Box, Box, Box]:
    return rect_split(q, x, y)


def quadrant_integral(fn, box: Box, tol: float = 1e-11) -> float:
    if box.degenerate:
        return 0.0
    return integrate_2d_fn(fn, box, tol).value


def quadrant_certificates(dn: DnField, q: Rect, x: float, y: float, p: float = 2.0, samples: int = 65):
    """Bivariation, mixed-Lipschitz, and L1/Lp/Linf constants of the integrator per quadrant.

    The bivariation of a function with a continuous mixed partial equals the
    integral of its absolute value, so these are exact up to quadrature
    error.  The sup is taken on a grid and widened by 2% plus a grid-spacing
    margin estimated from neighbouring samples.
    """
    m = dn.mixed
    boxes = _quadrant_boxes(q, x, y)
    V, sup, Lp, L1 = [], [], [], []
    for box in boxes:
        V.append(quadrant_integral(lambda t, s: np.abs(m(t, s)), box))
        L1.append(V[-1])
        Lp.append(quadrant_integral(lambda t, s: np.abs(m(t, s)) ** p, box) ** (1 / p))
        if box.degenerate:
            sup.append(0.0)
            continue
        xs = np.linspace(box.a, box.b, samples)
        ys = np.linspace(box.c, box.d, samples)
        g = np.abs(m(xs[:, None], ys[None, :]))
        jump = max(float(np.max(np.abs(np.diff(g, axis=0)), initial=0.0)),
                   float(np.max(np.abs(np.diff(g, axis=1)), initial=0.0)))
        sup.append(1.02 * float(g.max()) + jump)
    qb = QuadrantBivariation(x, y, V[0], V[1], V[2], V[3])
    order = dict(zip(("sw", "se", "nw", "ne"), range(4)))

    def qc(vals, kind, pp=math.inf):
        return QuadrantConstants(x, y, *(vals[order[k]] for k in ("sw", "se", "nw", "ne")), kind=kind, p=pp)

    return {
        "bv": qb,
        "total": BoundedBivariation(sum(V)),
        "mixed-lipschitz": qc(sup, "mixed-lipschitz"),
        "Linf": qc(sup, "Linf"),
        "Lp": qc(Lp, "Lp", p),
        "L1": qc(L1, "L1", 1.0),
    }


def family_certificate(family: str, certs: dict):
    if family in BV_FAMILIES:
        return certs["bv"]
    if family == "midpoint":
        return certs["total"]
    if family in ("lipschitz", "lipschitz-weak", "midpoint-lipschitz"):
        return certs["mixed-lipschitz"]
    return certs[{"ac-inf": "Linf", "ac-p": "Lp", "ac-1": "L1"}[family]]
