"""A-priori error bounds and their certification against the oracle.

Each ``bound_*`` function evaluates one inequality from its certificates.
``certify`` pairs a bound with the functional it controls, evaluates that
functional numerically and returns an ErrorCertificate (or a
BracketCertificate for two-sided enclosures).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .core import (Bimonotone, BoundedBivariation, BracketCertificate, CertificateMismatch, CornerGrowth,
                   Direction, DomainError, ErrorCertificate, Holder, IncrementExtremes, Lipschitz, PartialRange,
                   QuadrantBivariation, Range, Rect, Surface, corners, delta11)
from . import functionals as fn


class BoundKind(enum.Enum):
    OstrowskiBV = "ostrowski-bv"
    OstrowskiHolderU = "ostrowski-holder-u"
    CompanionBV = "companion-bv"
    TrapezoidBV = "trapezoid-bv"
    SimpsonBV = "simpson-bv"
    OmegaRange = "omega-range"
    ThetaQuadrant = "theta-quadrant"
    BdpUpper = "bdp-upper"
    BdpLower = "bdp-lower"
    FunctionalHolderBV = "functional-holder-bv"
    FunctionalHolderBimono = "functional-holder-bimono"
    FunctionalBVBV = "functional-bv-bv"
    PsiCorners = "psi-corners"
    PsiHolder = "psi-holder"
    RangeE = "range-e"
    CornerGrowthBV = "corner-growth-bv"
    CornerGrowthBimono = "corner-growth-bimono"
    EF_BV = "ef-bv"
    EF_Bimono = "ef-bimono"
    TrapFuncHolderBV = "trapfunc-holder-bv"
    TrapFuncLipschitzBV = "trapfunc-lipschitz-bv"
    TrapFuncHolderBimono = "trapfunc-holder-bimono"

    @classmethod
    def parse(cls, text: str) -> "BoundKind":
        for k in cls:
            if text in (k.value, k.name):
                return k
        raise ValueError(f"unknown bound kind {text!r}")


# certificates consumed per kind and variant: (role, class) pairs
REQUIRES: dict = {
    BoundKind.OstrowskiBV: {None: [("f", BoundedBivariation)]},
    BoundKind.OstrowskiHolderU: {None: [("f", Holder), ("u", BoundedBivariation)]},
    BoundKind.CompanionBV: {None: [("f", BoundedBivariation)]},
    BoundKind.TrapezoidBV: {None: [("f", BoundedBivariation)]},
    BoundKind.SimpsonBV: {None: [("f", BoundedBivariation)]},
    BoundKind.OmegaRange: {None: [("f", Range), ("u", BoundedBivariation)]},
    BoundKind.ThetaQuadrant: {None: [("f", QuadrantBivariation), ("u", Holder)]},
    BoundKind.BdpUpper: {None: [("f", BoundedBivariation), ("f", Range), ("u", IncrementExtremes)]},
    BoundKind.BdpLower: {None: [("f", BoundedBivariation), ("f", Range), ("u", IncrementExtremes)]},
    BoundKind.FunctionalHolderBV: {None: [("f", Holder), ("u", BoundedBivariation)]},
    BoundKind.FunctionalHolderBimono: {None: [("f", Holder), ("u", Bimonotone)]},
    BoundKind.FunctionalBVBV: {None: [("f", BoundedBivariation), ("u", BoundedBivariation)]},
    BoundKind.PsiCorners: {None: [("u", BoundedBivariation)]},
    BoundKind.PsiHolder: {None: [("f", Holder), ("u", BoundedBivariation)]},
    BoundKind.RangeE: {"E": [("f", PartialRange), ("u", Bimonotone)],
                       "F": [("u", PartialRange), ("f", Bimonotone)]},
    BoundKind.CornerGrowthBV: {"E": [("f", CornerGrowth), ("u", BoundedBivariation)],
                               "F": [("u", CornerGrowth), ("f", BoundedBivariation)]},
    BoundKind.CornerGrowthBimono: {"E": [("f", CornerGrowth), ("u", Bimonotone)],
                                   "F": [("u", CornerGrowth), ("f", Bimonotone)]},
    BoundKind.EF_BV: {"E": [("f", BoundedBivariation), ("u", BoundedBivariation)],
                      "F": [("f", BoundedBivariation), ("u", BoundedBivariation)]},
    BoundKind.EF_Bimono: {"E-u": [("u", Bimonotone), ("f", BoundedBivariation)],
                          "F-f": [("f", Bimonotone), ("u", BoundedBivariation)],
                          "E-both": [("u", Bimonotone), ("f", Bimonotone)],
                          "F-both": [("u", Bimonotone), ("f", Bimonotone)]},
    BoundKind.TrapFuncHolderBV: {None: [("f", Holder), ("u", BoundedBivariation)]},
    BoundKind.TrapFuncLipschitzBV: {None: [("f", Lipschitz), ("u", BoundedBivariation)]},
    BoundKind.TrapFuncHolderBimono: {None: [("f", Holder), ("u", Bimonotone)]},
}

POINT_KINDS = {BoundKind.OstrowskiBV, BoundKind.OstrowskiHolderU, BoundKind.CompanionBV, BoundKind.ThetaQuadrant}


def variants(kind: BoundKind) -> list:
    return list(REQUIRES[kind])


@dataclass(frozen=True)
class CertBundle:
    """Regularity certificates for the integrand (``f``) and the integrator (``u``)."""

    f: tuple = ()
    u: tuple = ()
    notes: tuple = field(default_factory=tuple)

    def get(self, role: str, cls):
        for c in getattr(self, role):
            if isinstance(c, cls):
                return c
        raise CertificateMismatch(f"no {cls.__name__} certificate for {role}")

    def has(self, role: str, cls) -> bool:
        return any(isinstance(c, cls) for c in getattr(self, role))


def _require_increasing(cert: Bimonotone):
    if cert.direction is not Direction.INCREASING:
        raise CertificateMismatch("this bound needs a bimonotone nondecreasing function")


# ---------------------------------------------------------------------------
# single-panel rules against the plain double integral


def _in(q: Rect, x: float, y: float):
    if not q.contains(x, y):
        raise DomainError(f"point ({x},{y}) outside {q}")


def bound_ostrowski(q: Rect, x: float, y: float, cert: BoundedBivariation) -> float:
    _in(q, x, y)
    mx, my = q.center
    return (q.width / 2 + abs(x - mx)) * (q.height / 2 + abs(y - my)) * cert.V


def bound_ostrowski_holder(q: Rect, x: float, y: float, f_cert: Holder, u_cert: BoundedBivariation) -> float:
    """Hoelder integrand, bounded-bivariation integrator, one-point Stieltjes rule."""
    _in(q, x, y)
    mx, my = q.center
    hx = (q.width / 2 + abs(x - mx)) ** f_cert.beta1
    hy = (q.height / 2 + abs(y - my)) ** f_cert.beta2
    return (f_cert.H1 * hx + f_cert.H2 * hy) * u_cert.V


def bound_trapezoid(q: Rect, cert: BoundedBivariation) -> float:
    return q.area / 4 * cert.V


def bound_simpson(q: Rect, cert: BoundedBivariation) -> float:
    return q.area / 9 * cert.V


def bound_companion(q: Rect, x: float, y: float, cert: BoundedBivariation) -> float:
    mx, my = q.center
    if not (q.a <= x <= mx and q.c <= y <= my):
        raise DomainError(f"companion point ({x},{y}) must lie in the lower-left quarter of {q}")
    return (q.width / 4 + abs(x - (3 * q.a + q.b) / 4)) * (q.height / 4 + abs(y - (3 * q.c + q.d) / 4)) * cert.V


# ---------------------------------------------------------------------------
# Stieltjes functionals


def bound_omega(u_cert: BoundedBivariation, f_cert: Range) -> float:
    return 0.5 * (f_cert.M - f_cert.m) * u_cert.V


def bound_theta(q: Rect, x: float, y: float, u_cert: Holder, f_cert: QuadrantBivariation) -> float:
    if (f_cert.x, f_cert.y) != (x, y):
        raise CertificateMismatch("quadrant variations were computed for a different split point")
    _in(q, x, y)
    H1, H2, b1, b2 = u_cert.H1, u_cert.H2, u_cert.beta1, u_cert.beta2
    left, right = (x - q.a) ** b1, (q.b - x) ** b1
    low, high = (y - q.c) ** b2, (q.d - y) ** b2
    return ((H1 * left + H2 * low) * f_cert.V_sw + (H1 * right + H2 * low) * f_cert.V_se
            + (H1 * left + H2 * high) * f_cert.V_nw + (H1 * right + H2 * high) * f_cert.V_ne)


def bound_bdp(q: Rect, delta_u: float, f_V: BoundedBivariation, f_range: Range,
              extremes: IncrementExtremes) -> tuple[float, float]:
    """(lower, upper) enclosure of the integral of f du."""
    base = delta_u * f_range.m
    return base + extremes.s * f_V.V, base + extremes.S * f_V.V


def bound_functional_aleph(q: Rect, variant: str, f_cert, g_cert, delta_g: Optional[float] = None) -> float:
    """Three variants: 'holder-bv', 'holder-bimonotone', 'bv-bv'."""
    w, h = q.width, q.height
    if variant == "holder-bv":
        if not (isinstance(f_cert, Holder) and isinstance(g_cert, BoundedBivariation)):
            raise CertificateMismatch("holder-bv needs Holder f and BoundedBivariation g")
        b1, b2 = f_cert.beta1, f_cert.beta2
        return (f_cert.H1 * w ** b1 / (2 ** (b1 + 1) * (b1 + 1))
                + f_cert.H2 * h ** b2 / (2 ** (b2 + 1) * (b2 + 1))) * g_cert.V
    if variant == "holder-bimonotone":
        if not (isinstance(f_cert, Holder) and isinstance(g_cert, Bimonotone)):
            raise CertificateMismatch("holder-bimonotone needs Holder f and Bimonotone g")
        _require_increasing(g_cert)
        if delta_g is None:
            raise CertificateMismatch("holder-bimonotone needs the mixed increment of g")
        b1, b2 = f_cert.beta1, f_cert.beta2
        return (f_cert.H1 * w ** b1 / (b1 + 1) + f_cert.H2 * h ** b2 / (b2 + 1)) * delta_g
    if variant == "bv-bv":
        if not (isinstance(f_cert, BoundedBivariation) and isinstance(g_cert, BoundedBivariation)):
            raise CertificateMismatch("bv-bv needs two BoundedBivariation certificates")
        return f_cert.V * g_cert.V
    raise ValueError(f"unknown variant {variant!r}")


def bound_psi_error(q: Rect, u_cert: BoundedBivariation, f_corners: Optional[tuple] = None,
                    f_holder: Optional[Holder] = None) -> float:
    """Corner-spread bound when corner values are given, otherwise the Hoelder bound."""
    if f_corners is not None:
        fac, fad, fbc, fbd = f_corners
        spread = max(abs(fbd - fac), abs(fbc - fad), abs(fad - fbd), abs(fac - fbc))
        return spread * u_cert.V
    if f_holder is not None:
        b1, b2 = f_holder.beta1, f_holder.beta2
        return (f_holder.H1 * q.width ** b1 / (b1 + 1) + f_holder.H2 * q.height ** b2 / (b2 + 1)) * u_cert.V
    raise CertificateMismatch("psi bound needs corner values or a Holder certificate")


def bound_range_E(w_corners: tuple, v_corners: tuple, pr: PartialRange) -> tuple[float, float]:
    """(lower, upper) for E; pass (f, u) corners and f's slice bounds, or (u, f) and u's for F."""
    fac, fad, fbc, fbd = w_corners
    uac, uad, ubc, ubd = v_corners
    M = max(pr.M1, pr.M2)
    m = min(pr.m1, pr.m2)
    lower = (-(fbd - fac) * (ubd - uac)
             - (pr.M1 - fad + pr.M2 - m) * (ubd - ubc)
             - (pr.M2 - fbc + pr.M1 - m) * (ubd - uad))
    upper = ((fbd - fac) * (ubd - uac)
             + (pr.m1 - fad + pr.m2 - M) * (ubc - uac)
             + (pr.m2 - fbc + pr.m1 - M) * (uad - uac))
    return lower, upper


def bound_corner_growth_bv(q: Rect, cg: CornerGrowth, V: float) -> float:
    return 4 * max(cg.La * q.width ** cg.alpha1 + cg.Lb * q.width ** cg.beta1,
                   cg.Lc * q.height ** cg.alpha2 + cg.Ld * q.height ** cg.beta2) * V


def bound_corner_growth_bimono(q: Rect, cg: CornerGrowth, v_corners: tuple) -> float:
    """Max of the two corner-growth expressions; v_corners are the bimonotone partner's corner values."""
    vac, vad, vbc, vbd = v_corners
    top, bottom = vbd - vad, vbc - vac
    one = 2 * cg.La * q.width ** cg.alpha1 * top - 2 * cg.Lb * q.width ** cg.beta1 * bottom
    two = 2 * cg.Lc * q.height ** cg.alpha2 * top - 2 * cg.Ld * q.height ** cg.beta2 * bottom
    return max(one, two)


def bound_EF(q: Rect, variant: str, *, V_f: Optional[float] = None, V_u: Optional[float] = None,
             delta: Optional[float] = None, corner_sum: Optional[float] = None) -> float:
    """Bivariation and bimonotone bounds for E and F.

    'bv': V(u) V(f).  'bimono-single': delta * V where delta is the mixed
    increment of the bimonotone function and V the other's bivariation.
    'bimono-both': the signed corner sum against the mean.
    """
    if variant == "bv":
        return V_u * V_f
    if variant == "bimono-single":
        return delta * (V_f if V_f is not None else V_u)
    if variant == "bimono-both":
        return corner_sum
    raise ValueError(f"unknown variant {variant!r}")


def bound_trapezoid_functional(q: Rect, variant: str, f_cert, u_V: Optional[BoundedBivariation] = None,
                               u_corners: Optional[tuple] = None) -> float:
    """'holder-bv', 'lipschitz-bv' and 'holder-bimonotone'."""
    w, h = q.width, q.height
    if variant == "holder-bv":
        a1, a2 = f_cert.beta1, f_cert.beta2
        return (f_cert.H1 * (w / 2) ** a1 + f_cert.H2 * (h / 2) ** a2) * u_V.V
    if variant == "lipschitz-bv":
        return 0.5 * (f_cert.L1 * w + f_cert.L2 * h) * u_V.V
    if variant == "holder-bimonotone":
        uac, uad, ubc, ubd = u_corners
        a1, a2 = f_cert.beta1, f_cert.beta2
        d11 = uac - uad - ubc + ubd
        first = (f_cert.H1 / 2 * w ** a1 + f_cert.H2 / 2 * h ** a2) * d11
        second = (f_cert.H1 / 2 * w ** a1 * h + f_cert.H2 / 2 * w * h ** a2) * (ubd - uac)
        return first + second
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# certification


Certified = Union[ErrorCertificate, BracketCertificate]


def check_certificates(kind: BoundKind, certs: CertBundle, variant=None):
    table = REQUIRES[kind]
    if variant not in table:
        raise ValueError(f"{kind.name} has variants {list(table)}, got {variant!r}")
    for role, cls in table[variant]:
        c = certs.get(role, cls)
        if isinstance(c, Bimonotone):
            _require_increasing(c)


def certify(kind: BoundKind, f: Surface, u: Optional[Surface], q: Rect, certs: CertBundle,
            x: Optional[float] = None, y: Optional[float] = None, variant=None,
            tol: float = fn.ORACLE_TOL, max_cells: Optional[int] = None) -> Certified:
    """Evaluate the bound of ``kind`` and the functional it controls."""
    if variant is None and None not in REQUIRES[kind]:
        variant = variants(kind)[0]
    check_certificates(kind, certs, variant)
    if kind in POINT_KINDS:
        if x is None or y is None:
            x, y = q.center
    rid = kind.value if variant is None else f"{kind.value}:{variant}"
    K = BoundKind

    if kind is K.OstrowskiBV:
        sp = fn.ostrowski_split(f, q, x, y)
        return ErrorCertificate.build(rid, sp.estimate, bound_ostrowski(q, x, y, certs.get("f", BoundedBivariation)),
                                      sp.reference, sp.error)
    if kind is K.CompanionBV:
        from .cubature import companion_rule
        ref = fn.riemann_integral(f, q)
        b = bound_companion(q, x, y, certs.get("f", BoundedBivariation))
        return ErrorCertificate.build(rid, companion_rule(f, q, x, y), b, ref.value, ref.error)
    if kind is K.TrapezoidBV:
        from .cubature import trapezoid4_rule
        ref = fn.riemann_integral(f, q)
        return ErrorCertificate.build(rid, trapezoid4_rule(f, q), bound_trapezoid(q, certs.get("f", BoundedBivariation)),
                                      ref.value, ref.error)
    if kind is K.SimpsonBV:
        from .cubature import simpson_rule
        ref = fn.riemann_integral(f, q)
        return ErrorCertificate.build(rid, float(simpson_rule(f, q)), bound_simpson(q, certs.get("f", BoundedBivariation)),
                                      ref.value, ref.error)

    if kind is K.OstrowskiHolderU:
        sp = fn.theta_split(f, u, q, x, y, tol, max_cells)
        b = bound_ostrowski_holder(q, x, y, certs.get("f", Holder), certs.get("u", BoundedBivariation))
        return ErrorCertificate.build(rid, sp.estimate, b, sp.reference, sp.error)
    if kind is K.ThetaQuadrant:
        sp = fn.theta_split(f, u, q, x, y, tol, max_cells)
        b = bound_theta(q, x, y, certs.get("u", Holder), certs.get("f", QuadrantBivariation))
        return ErrorCertificate.build(rid, sp.estimate, b, sp.reference, sp.error)
    if kind is K.OmegaRange:
        rg = certs.get("f", Range)
        sp = fn.omega_split(f, u, q, rg.m, rg.M, tol, max_cells)
        return ErrorCertificate.build(rid, sp.estimate, bound_omega(certs.get("u", BoundedBivariation), rg),
                                      sp.reference, sp.error)
    if kind in (K.BdpUpper, K.BdpLower):
        ref = fn.rs_integral(f, u, q, tol, max_cells)
        lo, hi = bound_bdp(q, delta11(u, q), certs.get("f", BoundedBivariation), certs.get("f", Range),
                           certs.get("u", IncrementExtremes))
        if kind is K.BdpUpper:
            return BracketCertificate.build(rid, -math.inf, hi, ref.value, ref.error)
        return BracketCertificate.build(rid, lo, math.inf, ref.value, ref.error)

    if kind in (K.FunctionalHolderBV, K.FunctionalHolderBimono, K.FunctionalBVBV):
        sp = fn.aleph_split(f, u, q, tol, max_cells)
        if kind is K.FunctionalHolderBV:
            b = bound_functional_aleph(q, "holder-bv", certs.get("f", Holder), certs.get("u", BoundedBivariation))
        elif kind is K.FunctionalHolderBimono:
            b = bound_functional_aleph(q, "holder-bimonotone", certs.get("f", Holder), certs.get("u", Bimonotone),
                                       delta11(u, q))
        else:
            b = bound_functional_aleph(q, "bv-bv", certs.get("f", BoundedBivariation),
                                       certs.get("u", BoundedBivariation))
        return ErrorCertificate.build(rid, sp.estimate, b, sp.reference, sp.error)

    if kind in (K.PsiCorners, K.PsiHolder):
        sp = fn.psi_split(f, u, q, tol, max_cells)
        uV = certs.get("u", BoundedBivariation)
        if kind is K.PsiCorners:
            b = bound_psi_error(q, uV, f_corners=corners(f, q))
        else:
            b = bound_psi_error(q, uV, f_holder=certs.get("f", Holder))
        return ErrorCertificate.build(rid, sp.estimate, b, sp.reference, sp.error)

    if kind is K.RangeE:
        if variant == "E":
            val = fn.E_functional(f, u, q, tol, max_cells)
            lo, hi = bound_range_E(corners(f, q), corners(u, q), certs.get("f", PartialRange))
        else:
            val = fn.F_functional(f, u, q, tol, max_cells)
            lo, hi = bound_range_E(corners(u, q), corners(f, q), certs.get("u", PartialRange))
        return BracketCertificate.build(rid, lo, hi, val.value, val.error)

    if kind in (K.CornerGrowthBV, K.CornerGrowthBimono):
        if variant == "E":
            val = fn.E_functional(f, u, q, tol, max_cells)
            cg = certs.get("f", CornerGrowth)
            b = (bound_corner_growth_bv(q, cg, certs.get("u", BoundedBivariation).V) if kind is K.CornerGrowthBV
                 else bound_corner_growth_bimono(q, cg, corners(u, q)))
        else:
            val = fn.F_functional(f, u, q, tol, max_cells)
            cg = certs.get("u", CornerGrowth)
            b = (bound_corner_growth_bv(q, cg, certs.get("f", BoundedBivariation).V) if kind is K.CornerGrowthBV
                 else bound_corner_growth_bimono(q, cg, corners(f, q)))
        return ErrorCertificate.build(rid, 0.0, b, val.value, val.error)

    if kind is K.EF_BV:
        val = (fn.E_functional if variant == "E" else fn.F_functional)(f, u, q, tol, max_cells)
        b = bound_EF(q, "bv", V_f=certs.get("f", BoundedBivariation).V, V_u=certs.get("u", BoundedBivariation).V)
        return ErrorCertificate.build(rid, 0.0, b, val.value, val.error)
    if kind is K.EF_Bimono:
        if variant == "E-u":
            val = fn.E_functional(f, u, q, tol, max_cells)
            b = bound_EF(q, "bimono-single", delta=delta11(u, q), V_f=certs.get("f", BoundedBivariation).V)
        elif variant == "F-f":
            val = fn.F_functional(f, u, q, tol, max_cells)
            b = bound_EF(q, "bimono-single", delta=delta11(f, q), V_u=certs.get("u", BoundedBivariation).V)
        elif variant == "E-both":
            val = fn.E_functional(f, u, q, tol, max_cells)
            b = bound_EF(q, "bimono-both", corner_sum=fn.corner_mean_sum(u, f, q))
        else:
            val = fn.F_functional(f, u, q, tol, max_cells)
            b = bound_EF(q, "bimono-both", corner_sum=fn.corner_mean_sum(f, u, q))
        return ErrorCertificate.build(rid, 0.0, b, val.value, val.error)

    if kind in (K.TrapFuncHolderBV, K.TrapFuncLipschitzBV, K.TrapFuncHolderBimono):
        sp = fn.trapezoid_split(f, u, q, tol, max_cells)
        if kind is K.TrapFuncHolderBV:
            b = bound_trapezoid_functional(q, "holder-bv", certs.get("f", Holder), certs.get("u", BoundedBivariation))
        elif kind is K.TrapFuncLipschitzBV:
            b = bound_trapezoid_functional(q, "lipschitz-bv", certs.get("f", Lipschitz),
                                           certs.get("u", BoundedBivariation))
        else:
            b = bound_trapezoid_functional(q, "holder-bimonotone", certs.get("f", Holder), u_corners=corners(u, q))
        return ErrorCertificate.build(rid, sp.estimate, b, sp.reference, sp.error)
    raise ValueError(f"unhandled bound kind {kind}")


def is_satisfied(cert: Certified) -> bool:
    return bool(cert.satisfied)
