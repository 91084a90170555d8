"""Randomised fixture families with exactly known regularity certificates.

Every surface has the separable form

    f(t, s) = A * phi(t) * psi(s) + alpha(t) + beta(s) + C

with one-dimensional factors drawn from a small library.  Mixed increments of
such a surface only see the product term, so the bivariation, quadrant
bivariations and increment extremes follow from one-dimensional variation
data, and Lipschitz / Hoelder / range data follow from per-axis bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (Bimonotone, Box, BoundedBivariation, CornerGrowth, Holder, IncrementExtremes, Lipschitz,
                   PartialRange, QuadrantBivariation, Range, Rect, Surface)


# ---------------------------------------------------------------------------
# one-dimensional factors


@dataclass(frozen=True)
class Fn1D:
    """A real function on an interval with the data needed for exact certificates.

    ``turning`` lists interior points where monotonicity may change.
    ``jumps`` holds (x0, left_limit) pairs; the function is right-continuous.
    ``lip`` is a Lipschitz constant on the whole interval (None if it jumps),
    ``half`` an optional 1/2-Hoelder constant for functions with a steep end.
    """

    name: str
    fn: Callable
    antider: Callable
    lo: float
    hi: float
    deriv: Optional[Callable] = None
    turning: tuple = ()
    jumps: tuple = ()
    lip: Optional[float] = None
    half: Optional[float] = None
    direction: int = 0  # +1 nondecreasing, -1 nonincreasing, 0 neither

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def _value(self, x: float) -> float:
        return float(self.fn(np.asarray(x, dtype=float)))

    def _profile(self, lo: float, hi: float) -> list[float]:
        """Values at the critical points of [lo, hi] in order, left limits before jumps."""
        pts = [(lo, None)]
        for p in self.turning:
            if lo < p < hi:
                pts.append((p, None))
        for x0, left in self.jumps:
            if lo < x0 <= hi:
                pts.append((x0, left))
        pts.append((hi, None))
        pts.sort(key=lambda e: (e[0], e[1] is None))
        out = []
        for x, left in pts:
            if left is not None:
                out.append(left)
                out.append(self._value(x))
            else:
                out.append(self._value(x))
        return out

    def variation(self, lo: Optional[float] = None, hi: Optional[float] = None) -> float:
        lo = self.lo if lo is None else lo
        hi = self.hi if hi is None else hi
        if hi <= lo:
            return 0.0
        v = self._profile(lo, hi)
        return float(sum(abs(v[i + 1] - v[i]) for i in range(len(v) - 1)))

    def hull(self) -> tuple[float, float]:
        v = self._profile(self.lo, self.hi)
        return min(v), max(v)

    def sup_abs(self) -> float:
        m, M = self.hull()
        return max(abs(m), abs(M))

    def rises(self) -> tuple[float, float]:
        """Largest increase (>= 0) and largest decrease (<= 0) of phi(b') - phi(a') with a' <= b'."""
        v = self._profile(self.lo, self.hi)
        up, dn = 0.0, 0.0
        lo_seen, hi_seen = v[0], v[0]
        for w in v[1:]:
            up = max(up, w - lo_seen)
            dn = min(dn, w - hi_seen)
            lo_seen, hi_seen = min(lo_seen, w), max(hi_seen, w)
        return up, dn

    def holder(self, beta: float) -> Optional[float]:
        """A Hoelder-beta constant on [lo, hi], or None for discontinuous factors."""
        if self.jumps:
            return None
        w = self.hi - self.lo
        if self.half is None:
            return self.lip * w ** (1.0 - beta)
        if beta <= 0.5:
            return self.half * w ** (0.5 - beta)
        # min(L h, H h^1/2) <= L^(2b-1) H^(2-2b) h^b
        return self.lip ** (2 * beta - 1) * self.half ** (2 - 2 * beta)

    @property
    def continuous(self) -> bool:
        return not self.jumps


def _const_fn(k: float, lo: float, hi: float) -> Fn1D:
    return Fn1D(f"{k:g}", lambda x: np.full(np.shape(x), k), lambda x: k * x, lo, hi,
                lambda x: np.zeros(np.shape(x)), lip=0.0, direction=1)


def linear(k: float, lo: float, hi: float) -> Fn1D:
    return Fn1D(f"{k:.3g}x", lambda x: k * x, lambda x: 0.5 * k * x * x, lo, hi, lambda x: np.full(np.shape(x), k),
                lip=abs(k), direction=1 if k >= 0 else -1)


def exponential(k: float, lo: float, hi: float) -> Fn1D:
    lip = abs(k) * math.exp(max(k * lo, k * hi))
    if k == 0:
        return _const_fn(1.0, lo, hi)
    return Fn1D(f"exp({k:.3g}x)", lambda x: np.exp(k * x), lambda x: np.exp(k * x) / k, lo, hi,
                lambda x: k * np.exp(k * x), lip=lip, direction=1 if k > 0 else -1)


def sine(w: float, ph: float, lo: float, hi: float) -> Fn1D:
    # turning points where w x + ph = pi/2 + k pi
    kmin = math.ceil(((min(w * lo, w * hi) + ph) - math.pi / 2) / math.pi)
    kmax = math.floor(((max(w * lo, w * hi) + ph) - math.pi / 2) / math.pi)
    turn = tuple(sorted((math.pi / 2 + k * math.pi - ph) / w for k in range(kmin, kmax + 1)))
    return Fn1D(f"sin({w:.3g}x+{ph:.3g})", lambda x: np.sin(w * x + ph), lambda x: -np.cos(w * x + ph) / w, lo, hi,
                lambda x: w * np.cos(w * x + ph), turning=turn, lip=abs(w), direction=0)


def power(p: int, x0: float, lo: float, hi: float) -> Fn1D:
    """(x - x0)^p for p in {2, 3}."""
    if p not in (2, 3):
        raise ValueError("power factors support p = 2 or 3")
    reach = max(abs(lo - x0), abs(hi - x0))
    turn = (x0,) if p % 2 == 0 else ()
    direction = 1 if (p % 2 == 1 or x0 <= lo) else (-1 if x0 >= hi else 0)
    if p == 2:
        fn, d = (lambda x: (x - x0) * (x - x0)), (lambda x: 2 * (x - x0))
    else:
        fn, d = (lambda x: (x - x0) * (x - x0) * (x - x0)), (lambda x: 3 * (x - x0) * (x - x0))
    return Fn1D(f"(x-{x0:.3g})^{p}", fn, lambda x: (x - x0) ** (p + 1) / (p + 1), lo, hi, d, turning=turn,
                lip=p * reach ** (p - 1), direction=direction)


def root(delta: float, lo: float, hi: float) -> Fn1D:
    """sqrt(x - lo + delta): Lipschitz 1/(2 sqrt(delta)) and 1/2-Hoelder with constant 1."""
    s = lo - delta
    return Fn1D(f"sqrt(x-{s:.3g})", lambda x: np.sqrt(np.maximum(x - s, 0.0)),
                lambda x: (2.0 / 3.0) * np.maximum(x - s, 0.0) ** 1.5, lo, hi,
                lambda x: 0.5 / np.sqrt(np.maximum(x - s, 1e-300)), lip=0.5 / math.sqrt(delta), half=1.0, direction=1)


def smooth_step(k: float, x0: float, lo: float, hi: float) -> Fn1D:
    def logcosh(z):
        z = np.abs(z)
        return z + np.log1p(np.exp(-2 * z)) - math.log(2.0)

    return Fn1D(f"tanh({k:.3g}(x-{x0:.3g}))", lambda x: np.tanh(k * (x - x0)), lambda x: logcosh(k * (x - x0)) / k,
                lo, hi, lambda x: k / np.cosh(k * (x - x0)) ** 2, lip=abs(k), direction=1 if k > 0 else -1)


def step(height: float, x0: float, lo: float, hi: float) -> Fn1D:
    """height * [x >= x0], right-continuous, with x0 strictly inside (lo, hi)."""
    return Fn1D(f"{height:.3g}*H(x-{x0:.3g})", lambda x: np.where(x >= x0, height, 0.0),
                lambda x: height * np.maximum(x - x0, 0.0), lo, hi, None, jumps=((x0, 0.0),),
                direction=1 if height >= 0 else -1)


def random_fn1d(rng: np.random.Generator, lo: float, hi: float, *, continuous: bool = True,
                monotone: int = 0, jumps: bool = False) -> Fn1D:
    """Draw a factor; ``monotone`` +1/-1 forces the direction, ``jumps`` forces a step."""
    w = hi - lo
    if jumps:
        return step(float(rng.uniform(0.3, 2.0)) * (monotone or rng.choice([-1, 1])),
                    float(rng.uniform(lo + 0.1 * w, hi - 0.1 * w)), lo, hi)
    kinds = ["linear", "exp", "tanh", "root", "cube"]
    if not monotone:
        kinds += ["sine", "square"]
    if not continuous:
        kinds += ["step"]
    kind = kinds[int(rng.integers(len(kinds)))]
    sign = monotone or int(rng.choice([-1, 1]))
    if kind == "linear":
        return linear(sign * float(rng.uniform(0.2, 2.0)), lo, hi)
    if kind == "exp":
        return exponential(sign * float(rng.uniform(0.2, 1.5)) / w, lo, hi)
    if kind == "tanh":
        return smooth_step(sign * float(rng.uniform(0.5, 4.0)) / w, float(rng.uniform(lo, hi)), lo, hi)
    if kind == "root":
        f = root(float(rng.uniform(0.05, 0.5)) * w, lo, hi)
        return f if sign > 0 else _negate(f)
    if kind == "cube":
        f = power(3, float(rng.uniform(lo, hi)), lo, hi)
        return f if sign > 0 else _negate(f)
    if kind == "sine":
        return sine(float(rng.uniform(0.5, 6.0)) / w, float(rng.uniform(0, 2 * math.pi)), lo, hi)
    if kind == "square":
        return power(2, float(rng.uniform(lo, hi)), lo, hi)
    return step(float(rng.uniform(0.3, 2.0)) * sign, float(rng.uniform(lo + 0.1 * w, hi - 0.1 * w)), lo, hi)


def _negate(g: Fn1D) -> Fn1D:
    d = None if g.deriv is None else (lambda x: -g.deriv(x))
    return Fn1D(f"-{g.name}", lambda x: -g.fn(x), lambda x: -g.antider(x), g.lo, g.hi, d, g.turning,
                tuple((x0, -left) for x0, left in g.jumps), g.lip, g.half, -g.direction)


# ---------------------------------------------------------------------------
# separable surfaces


@dataclass(frozen=True)
class Separable:
    """A * phi(t) psi(s) + alpha(t) + beta(s) + C on q, with exact certificate data."""

    A: float
    phi: Fn1D
    psi: Fn1D
    alpha: Fn1D
    beta: Fn1D
    C: float
    q: Rect
    surface: Surface = field(compare=False)

    # certificates ---------------------------------------------------------

    def bivariation(self) -> BoundedBivariation:
        return BoundedBivariation(abs(self.A) * self.phi.variation() * self.psi.variation())

    def quadrants(self, x: float, y: float) -> QuadrantBivariation:
        q = self.q
        vx = (self.phi.variation(q.a, x), self.phi.variation(x, q.b))
        vy = (self.psi.variation(q.c, y), self.psi.variation(y, q.d))
        k = abs(self.A)
        return QuadrantBivariation(x, y, k * vx[0] * vy[0], k * vx[1] * vy[0], k * vx[0] * vy[1], k * vx[1] * vy[1])

    def range(self) -> Range:
        pm, pM = self.phi.hull()
        sm, sM = self.psi.hull()
        prods = [self.A * u * v for u in (pm, pM) for v in (sm, sM)]
        am, aM = self.alpha.hull()
        bm, bM = self.beta.hull()
        return Range(min(prods) + am + bm + self.C, max(prods) + aM + bM + self.C)

    def partial_range(self, rng: Optional[np.random.Generator] = None) -> PartialRange:
        r = self.range()
        if rng is None:
            return PartialRange(r.m, r.M, r.m, r.M)
        spread = max(r.M - r.m, 1e-3)
        lo1, hi1, lo2, hi2 = rng.uniform(0, 0.2, size=4) * spread
        return PartialRange(r.m - lo1, r.M + hi1, r.m - lo2, r.M + hi2)

    def lipschitz(self) -> Optional[Lipschitz]:
        parts = (self.phi, self.psi, self.alpha, self.beta)
        if any(p.lip is None for p in parts):
            return None
        k = abs(self.A)
        return Lipschitz(k * self.psi.sup_abs() * self.phi.lip + self.alpha.lip,
                         k * self.phi.sup_abs() * self.psi.lip + self.beta.lip)

    def holder(self, beta1: float, beta2: float) -> Optional[Holder]:
        hs = [self.phi.holder(beta1), self.alpha.holder(beta1), self.psi.holder(beta2), self.beta.holder(beta2)]
        if any(h is None for h in hs):
            return None
        k = abs(self.A)
        return Holder(k * self.psi.sup_abs() * hs[0] + hs[1], k * self.phi.sup_abs() * hs[2] + hs[3], beta1, beta2)

    def increment_extremes(self) -> IncrementExtremes:
        pu, pd = self.phi.rises()
        su, sd = self.psi.rises()
        prods = [self.A * u * v for u in (pu, pd) for v in (su, sd)]
        return IncrementExtremes(max(0.0, *prods), min(0.0, *prods))

    def bimonotone(self) -> Optional[Bimonotone]:
        sign = self.A * self.phi.direction * self.psi.direction
        if self.A == 0 or sign > 0:
            return Bimonotone()
        return None

    def corner_growth(self, alpha1: float, alpha2: float, beta1: float, beta2: float) -> Optional[CornerGrowth]:
        lip = self.lipschitz()
        if lip is None:
            return None
        w, h = self.q.width, self.q.height
        return CornerGrowth(lip.L1 * w ** (1 - alpha1), lip.L1 * w ** (1 - beta1),
                            lip.L2 * h ** (1 - alpha2), lip.L2 * h ** (1 - beta2), alpha1, alpha2, beta1, beta2)

    @property
    def has_jumps(self) -> bool:
        return bool(self.surface.jumps_x or self.surface.jumps_y)


def separable(A: float, phi: Fn1D, psi: Fn1D, alpha: Fn1D, beta: Fn1D, C: float, q: Rect) -> Separable:
    def fn(t, s):
        return A * phi.fn(t) * psi.fn(s) + alpha.fn(t) + beta.fn(s) + C

    def ci(box: Box) -> float:
        w, h = box.b - box.a, box.d - box.c
        P = float(phi.antider(np.asarray(box.b)) - phi.antider(np.asarray(box.a)))
        S = float(psi.antider(np.asarray(box.d)) - psi.antider(np.asarray(box.c)))
        al = float(alpha.antider(np.asarray(box.b)) - alpha.antider(np.asarray(box.a)))
        be = float(beta.antider(np.asarray(box.d)) - beta.antider(np.asarray(box.c)))
        return A * P * S + al * h + be * w + C * w * h

    parts = {}
    if all(g.deriv is not None for g in (phi, psi, alpha, beta)):
        parts[(1, 0)] = Surface(lambda t, s: A * phi.deriv(t) * psi.fn(s) + alpha.deriv(t), "f_t")
        parts[(0, 1)] = Surface(lambda t, s: A * phi.fn(t) * psi.deriv(s) + beta.deriv(s), "f_s")
        parts[(1, 1)] = Surface(lambda t, s: A * phi.deriv(t) * psi.deriv(s), "f_ts")
    jx = sorted({j for j, _ in phi.jumps} | {j for j, _ in alpha.jumps})
    jy = sorted({j for j, _ in psi.jumps} | {j for j, _ in beta.jumps})
    desc = f"{A:.3g}*{phi.name}*{psi.name}+{alpha.name}+{beta.name}+{C:.3g}"
    surf = Surface(fn, desc, parts, ci, jx, jy, q)
    return Separable(A, phi, psi, alpha, beta, C, q, surf)


def random_rect(rng: np.random.Generator) -> Rect:
    a = float(rng.uniform(-1, 1))
    c = float(rng.uniform(-1, 1))
    return Rect(a, a + float(rng.uniform(0.5, 2.0)), c, c + float(rng.uniform(0.5, 2.0)))


def random_separable(rng: np.random.Generator, q: Rect, *, continuous: bool = True, bimonotone: bool = False,
                     jumps: bool = False, additive: bool = True) -> Separable:
    """Draw a separable surface on q.

    ``bimonotone`` makes every mixed increment nonnegative.  ``jumps`` puts a
    step into the product factor along a random axis.
    """
    if bimonotone:
        d1, d2 = int(rng.choice([-1, 1])), int(rng.choice([-1, 1]))
        A = float(rng.uniform(0.2, 2.0)) * d1 * d2
    else:
        d1 = d2 = 0
        A = float(rng.uniform(0.2, 2.0)) * float(rng.choice([-1, 1]))
    jump_axis = int(rng.integers(2)) if jumps else -1
    phi = random_fn1d(rng, q.a, q.b, continuous=continuous, monotone=d1, jumps=jump_axis == 0)
    psi = random_fn1d(rng, q.c, q.d, continuous=continuous, monotone=d2, jumps=jump_axis == 1)
    if additive:
        alpha = random_fn1d(rng, q.a, q.b, continuous=continuous)
        beta = random_fn1d(rng, q.c, q.d, continuous=continuous)
        C = float(rng.uniform(-1, 1))
    else:
        alpha, beta, C = _const_fn(0.0, q.a, q.b), _const_fn(0.0, q.c, q.d), 0.0
    return separable(A, phi, psi, alpha, beta, C, q)


# ---------------------------------------------------------------------------
# fixtures per bound kind


@dataclass(frozen=True)
class Fixture:
    kind: "object"
    variant: Optional[str]
    f: Separable
    u: Separable
    q: Rect
    certs: "object"
    x: Optional[float] = None
    y: Optional[float] = None


def _exponents(rng, low: float = 0.3) -> tuple[float, float]:
    if rng.random() < 0.4:
        return 1.0, 1.0
    return float(rng.uniform(low, 1.0)), float(rng.uniform(low, 1.0))


def make_fixture(kind, variant, rng: np.random.Generator) -> Fixture:
    """Draw f, u, q and the Declared certificates that ``kind``/``variant`` consume.

    Jumps are placed in at most one of f and u, so every Stieltjes integral in
    the fixture exists.
    """
    from .bounds import BoundKind as K, CertBundle, POINT_KINDS

    q = random_rect(rng)
    jumpy = rng.random() < 0.3
    jump_in_f = rng.random() < 0.5

    f_cont = u_cont = True
    f_bim = u_bim = False
    if kind in (K.OstrowskiBV, K.CompanionBV, K.TrapezoidBV, K.SimpsonBV, K.OmegaRange, K.ThetaQuadrant,
                K.BdpUpper, K.BdpLower, K.FunctionalBVBV, K.PsiCorners, K.EF_BV):
        f_cont = not (jumpy and jump_in_f)
        u_cont = not (jumpy and not jump_in_f)
    if kind in (K.OstrowskiHolderU, K.FunctionalHolderBV, K.PsiHolder, K.TrapFuncHolderBV, K.TrapFuncLipschitzBV,
                K.CornerGrowthBV):
        u_cont = not jumpy
    if kind is K.ThetaQuadrant:
        u_cont = True
        f_cont = not jumpy
    if kind in (K.FunctionalHolderBimono, K.TrapFuncHolderBimono):
        u_bim = True
        u_cont = not jumpy
    if kind in (K.RangeE, K.CornerGrowthBimono):
        if variant == "E":
            u_bim, u_cont = True, not jumpy
        else:
            f_bim, f_cont = True, not jumpy
    if kind is K.CornerGrowthBV and variant == "F":
        f_cont, u_cont = not jumpy, True
    if kind is K.EF_Bimono:
        f_bim = variant in ("F-f", "E-both", "F-both")
        u_bim = variant in ("E-u", "E-both", "F-both")
        f_cont = not (jumpy and jump_in_f)
        u_cont = not (jumpy and not jump_in_f)
    if kind in (K.OstrowskiBV, K.CompanionBV, K.TrapezoidBV, K.SimpsonBV):
        u_cont = True

    f = random_separable(rng, q, bimonotone=f_bim, jumps=not f_cont)
    u = random_separable(rng, q, bimonotone=u_bim, jumps=not u_cont)

    fc: list = []
    uc: list = []
    b1, b2 = _exponents(rng)
    if kind in (K.OstrowskiBV, K.CompanionBV, K.TrapezoidBV, K.SimpsonBV, K.FunctionalBVBV, K.EF_BV):
        fc.append(f.bivariation())
        uc.append(u.bivariation())
    if kind in (K.OstrowskiHolderU, K.FunctionalHolderBV, K.FunctionalHolderBimono, K.PsiHolder, K.TrapFuncHolderBV,
                K.TrapFuncHolderBimono):
        fc.append(f.holder(b1, b2))
        uc.append(u.bivariation())
    if kind is K.TrapFuncLipschitzBV:
        fc.append(f.lipschitz())
        uc.append(u.bivariation())
    if kind is K.OmegaRange:
        fc.append(f.range())
        uc.append(u.bivariation())
    if kind in (K.BdpUpper, K.BdpLower):
        fc += [f.bivariation(), f.range()]
        uc.append(u.increment_extremes())
    if kind is K.PsiCorners:
        uc.append(u.bivariation())
    if kind is K.RangeE:
        if variant == "E":
            fc.append(f.partial_range(rng))
        else:
            uc.append(u.partial_range(rng))
    if kind in (K.CornerGrowthBV, K.CornerGrowthBimono):
        e = [float(v) for v in rng.uniform(0.3, 1.0, size=4)] if rng.random() < 0.6 else [1.0] * 4
        grower, other = (f, u) if variant == "E" else (u, f)
        cg = grower.corner_growth(*e)
        if variant == "E":
            fc.append(cg)
            uc.append(other.bivariation())
        else:
            uc.append(cg)
            fc.append(other.bivariation())
    if kind is K.EF_Bimono:
        fc.append(f.bivariation())
        uc.append(u.bivariation())
    for s, lst in ((f, fc), (u, uc)):
        bm = s.bimonotone()
        if bm is not None:
            lst.append(bm)

    x = y = None
    if kind in POINT_KINDS:
        x = float(rng.uniform(q.a, q.b))
        y = float(rng.uniform(q.c, q.d))
        if kind is K.CompanionBV:
            mx, my = q.center
            x = float(rng.uniform(q.a, mx))
            y = float(rng.uniform(q.c, my))
        if rng.random() < 0.2:
            x, y = q.center
    if kind is K.ThetaQuadrant:
        fc.append(f.quadrants(x, y))
        uc.append(u.holder(b1, b2))
    certs = CertBundle(tuple(c for c in fc if c is not None), tuple(c for c in uc if c is not None))
    return Fixture(kind, variant, f, u, q, certs, x, y)


# ---------------------------------------------------------------------------
# soundness sweep


@dataclass
class SweepResult:
    kind: "object"
    trials: int = 0
    violations: int = 0
    worst_excess: float = 0.0
    worst: Optional[Fixture] = None
    by_variant: dict = field(default_factory=dict)


def _excess(cert) -> float:
    ex = getattr(cert, "excess", None)
    if ex is not None:
        return float(ex)
    return float(cert.residual - cert.bound - cert.slack)


def soundness_sweep(kind, trials: int, seed: int = 0, tol: float = 1e-7, max_cells: Optional[int] = 256,
                    ) -> SweepResult:
    """Certify ``trials`` random fixtures of ``kind`` (cycling over its variants) and count violations."""
    from .bounds import certify, variants

    rng = np.random.default_rng(seed)
    vs = variants(kind)
    out = SweepResult(kind)
    for i in range(trials):
        variant = vs[i % len(vs)]
        fx = make_fixture(kind, variant, rng)
        cert = certify(kind, fx.f.surface, fx.u.surface, fx.q, fx.certs, fx.x, fx.y, variant, tol, max_cells)
        out.trials += 1
        tally = out.by_variant.setdefault(variant, [0, 0])
        tally[0] += 1
        if not cert.satisfied:
            out.violations += 1
            tally[1] += 1
            ex = _excess(cert)
            if ex > out.worst_excess:
                out.worst_excess, out.worst = ex, fx
    return out
