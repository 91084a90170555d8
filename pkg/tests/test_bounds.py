import math

import numpy as np
import pytest

from stieltjes2d import registry
from stieltjes2d.bounds import (REQUIRES, BoundKind, CertBundle, bound_bdp, bound_companion, bound_corner_growth_bv,
                                bound_functional_aleph, bound_omega, bound_ostrowski, bound_psi_error,
                                bound_simpson, bound_theta, bound_trapezoid, bound_trapezoid_functional, certify,
                                check_certificates, is_satisfied, variants)
from stieltjes2d.core import (Bimonotone, BoundedBivariation, BracketCertificate, CertificateMismatch, CornerGrowth,
                              Direction, DomainError, ErrorCertificate, Holder, IncrementExtremes, Lipschitz,
                              QuadrantBivariation, Range, Rect, corners)
from stieltjes2d.families import make_fixture

Q = Rect(0, 1, 0, 1)
V1 = BoundedBivariation(1.0)
ts = registry.get("prod_ts")


def test_kind_parse():
    assert BoundKind.parse("trapezoid-bv") is BoundKind.TrapezoidBV
    assert BoundKind.parse("TrapezoidBV") is BoundKind.TrapezoidBV
    with pytest.raises(ValueError):
        BoundKind.parse("nope")
    assert len(BoundKind) == 22 and set(REQUIRES) == set(BoundKind)


def test_ostrowski_examples():
    assert bound_ostrowski(Q, 0.5, 0.5, V1) == 0.25
    assert bound_ostrowski(Q, 0, 0, V1) == 1
    c = certify(BoundKind.OstrowskiBV, ts, None, Q, CertBundle(f=(V1,)), 0, 0)
    assert c.residual == pytest.approx(0.25) and c.satisfied


def test_trapezoid_and_simpson_examples():
    assert bound_trapezoid(Q, V1) == 0.25
    assert bound_simpson(Q, V1) == pytest.approx(1 / 9)
    assert bound_trapezoid(Q, BoundedBivariation(0)) == 0
    c = certify(BoundKind.TrapezoidBV, ts, None, Q, CertBundle(f=(V1,)))
    assert c.residual == pytest.approx(0, abs=1e-15) and c.bound == 0.25 and c.satisfied
    c = certify(BoundKind.SimpsonBV, ts, None, Q, CertBundle(f=(V1,)))
    assert isinstance(c.residual, float) and c.residual <= 1e-12


def test_companion_examples():
    assert bound_companion(Q, 0.25, 0.25, V1) == pytest.approx(1 / 16)
    assert bound_companion(Q, 0, 0, V1) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        bound_companion(Q, 0.6, 0.1, V1)
    c = certify(BoundKind.CompanionBV, ts, None, Q, CertBundle(f=(V1,)), 0.25, 0.25)
    assert c.residual == pytest.approx(0, abs=1e-15)


def test_omega_examples():
    assert bound_omega(V1, Range(0, 1)) == 0.5
    assert bound_omega(V1, Range(-1, 1)) == 1
    assert bound_omega(V1, Range(2, 2)) == 0
    c = certify(BoundKind.OmegaRange, ts, ts, Q, CertBundle(f=(Range(0, 1),), u=(V1,)))
    assert c.oracle == pytest.approx(0.25, abs=1e-8) and c.estimate == 0.5 and c.satisfied


def test_theta_examples():
    H = Holder(1.0, 2.0, 1.0, 0.5)
    q = Rect(0, 2, 0, 3)
    qb = QuadrantBivariation(0, 0, 0, 0, 0, 5.0)
    assert bound_theta(q, 0, 0, H, qb) == pytest.approx((1 * 2 + 2 * 3 ** 0.5) * 5.0)
    v = 0.7
    qc = QuadrantBivariation(1, 1.5, v, v, v, v)
    assert bound_theta(q, 1, 1.5, H, qc) == pytest.approx(4 * (1 * 1 + 2 * 1.5 ** 0.5) * v)
    with pytest.raises(CertificateMismatch):
        bound_theta(q, 1, 1, H, qc)
    c = certify(BoundKind.ThetaQuadrant, ts, ts, Q,
                CertBundle(f=(QuadrantBivariation(0.5, 0.5, .25, .25, .25, .25),), u=(Holder(1, 1),)))
    assert c.satisfied


def test_bdp_examples():
    lo, hi = bound_bdp(Q, 1.0, V1, Range(0, 1), IncrementExtremes(1, 0))
    assert hi == 1 and lo == 0
    lo, hi = bound_bdp(Q, -1.0, V1, Range(0, 1), IncrementExtremes(0, -1))
    assert lo == -1
    c = certify(BoundKind.BdpLower, ts, registry.get("neg_prod"), Q,
                CertBundle(f=(V1, Range(0, 1)), u=(IncrementExtremes(0, -1),)))
    assert isinstance(c, BracketCertificate) and c.lower == -1 and c.satisfied
    assert c.value == pytest.approx(-0.25, abs=1e-8)
    # constant f: both ends collapse to c * delta11 u
    lo, hi = bound_bdp(Q, 1.0, BoundedBivariation(0), Range(3, 3), IncrementExtremes(1, 0))
    assert lo == hi == 3


def test_aleph_examples():
    assert bound_functional_aleph(Q, "holder-bv", Holder(1, 1), V1) == pytest.approx(0.25)
    assert bound_functional_aleph(Q, "bv-bv", V1, V1) == 1
    with pytest.raises(CertificateMismatch):
        bound_functional_aleph(Q, "holder-bv", V1, V1)
    with pytest.raises(CertificateMismatch):
        bound_functional_aleph(Q, "holder-bimonotone", Holder(1, 1), Bimonotone(Direction.DECREASING), 1.0)
    c = certify(BoundKind.FunctionalHolderBV, ts, ts, Q, CertBundle(f=(Holder(1, 1),), u=(V1,)))
    assert c.residual == pytest.approx(0, abs=1e-8) and c.bound == pytest.approx(0.25)


def test_psi_examples():
    assert bound_psi_error(Q, V1, f_corners=(2, 2, 2, 2)) == 0
    assert bound_psi_error(Q, BoundedBivariation(3.0), f_corners=corners(ts, Q)) == 3.0
    c = certify(BoundKind.PsiCorners, registry.get("sum_ts"), ts, Q, CertBundle(u=(V1,)))
    assert c.bound == 2.0 and c.satisfied


def test_corner_growth_bv_arithmetic():
    cg = CornerGrowth(1, 1, 1, 1, 1, 1, 1, 1)
    assert bound_corner_growth_bv(Q, cg, 1.0) == 8


def test_trapezoid_functional_variants():
    assert bound_trapezoid_functional(Q, "lipschitz-bv", Lipschitz(1, 1), V1) == 1
    assert bound_trapezoid_functional(Q, "holder-bv", Holder(1, 1), V1) == 1
    c = certify(BoundKind.TrapFuncLipschitzBV, registry.get("sum_ts"), ts, Q, CertBundle(f=(Lipschitz(1, 1),), u=(V1,)))
    assert c.residual == pytest.approx(0, abs=1e-8) and c.satisfied


def test_ef_bv_value():
    c = certify(BoundKind.EF_BV, ts, ts, Q, CertBundle(f=(V1,), u=(V1,)), variant="E")
    assert c.bound == 1 and c.satisfied


def test_missing_certificate_is_mismatch():
    with pytest.raises(CertificateMismatch):
        check_certificates(BoundKind.OmegaRange, CertBundle(f=(V1,), u=(V1,)))
    with pytest.raises(ValueError):
        check_certificates(BoundKind.RangeE, CertBundle(), variant="nope")


def test_variants_listed():
    assert variants(BoundKind.EF_Bimono) == ["E-u", "F-f", "E-both", "F-both"]
    assert variants(BoundKind.TrapezoidBV) == [None]


def test_scaling_under_dilation():
    # the bounds are products of two lengths: dilating q, x, y by k scales them by k^2
    q, k = Rect(0.5, 1.5, -1, 2), 2.5
    qk = Rect(q.a * k, q.b * k, q.c * k, q.d * k)
    assert bound_ostrowski(qk, 0.7 * k, 0.2 * k, V1) == pytest.approx(k * k * bound_ostrowski(q, 0.7, 0.2, V1))
    assert bound_companion(qk, 0.6 * k, -0.5 * k, V1) == pytest.approx(k * k * bound_companion(q, 0.6, -0.5, V1))


@pytest.mark.parametrize("kind", [BoundKind.OstrowskiHolderU, BoundKind.OmegaRange, BoundKind.FunctionalHolderBV,
                                  BoundKind.FunctionalHolderBimono, BoundKind.PsiCorners, BoundKind.PsiHolder,
                                  BoundKind.CornerGrowthBV, BoundKind.CornerGrowthBimono, BoundKind.EF_BV,
                                  BoundKind.TrapFuncHolderBV, BoundKind.TrapFuncLipschitzBV])
def test_random_fixtures_sound(kind):
    rng = np.random.default_rng(7)
    for i in range(12):
        vs = variants(kind)
        fx = make_fixture(kind, vs[i % len(vs)], rng)
        c = certify(kind, fx.f.surface, fx.u.surface, fx.q, fx.certs, fx.x, fx.y, fx.variant, 1e-7, 256)
        assert is_satisfied(c), (kind, c)


# Fixtures outside the reach of the bivariation bounds: the separable part is invisible to them.

def test_ostrowski_bound_ignores_separable_part():
    f = registry.get("t")  # zero bivariation, nonzero one-point error at a corner
    c = certify(BoundKind.OstrowskiBV, f, None, Q, CertBundle(f=(BoundedBivariation(0.0),)), 0.0, 0.0)
    assert c.bound == 0 and c.residual == pytest.approx(0.5)
    assert not c.satisfied


def test_trapezoid_bound_ignores_separable_part():
    f = registry.get("sum_ts")
    c = certify(BoundKind.TrapezoidBV, f, None, Q, CertBundle(f=(BoundedBivariation(0.0),)))
    assert c.residual == pytest.approx(1.0) and not c.satisfied
