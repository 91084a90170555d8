import numpy as np
import pytest

from stieltjes2d import registry
from stieltjes2d.core import GridPartition, Rect, Surface, delta11
from stieltjes2d.registry import unit_step
from stieltjes2d.rs_sum import ENV_MAX_CELLS, integration_by_parts, max_cells, rs_double_sum, rs_oracle
from stieltjes2d.variation import vitali_sum

Q = Rect(0, 1, 0, 1)


def test_constant_integrand_gives_increment(rng):
    xs = np.sort(np.concatenate([[0, 1], rng.uniform(0, 1, 6)]))
    p = GridPartition.from_nodes(xs, xs, tags="random", rng=rng)
    u = registry.get("exp_sum")
    assert rs_double_sum(registry.get("one"), u, p) == pytest.approx(delta11(u, Q), rel=1e-13)
    c = Surface(lambda t, s: 3.5 + 0 * t, "3.5")
    assert rs_double_sum(c, u, p) == pytest.approx(3.5 * delta11(u, Q), rel=1e-13)


def test_sum_ts_against_ts_fine_grid():
    p = GridPartition.uniform(Q, 256)
    assert rs_double_sum(registry.get("sum_ts"), registry.get("prod_ts"), p) == pytest.approx(1.0, abs=1e-4)


def test_oracle_smooth_integrator():
    rep = rs_oracle(registry.get("prod_ts"), registry.get("t2s2"), Q, tol=1e-6)
    assert rep.converged
    assert rep.value == pytest.approx(4 / 9, abs=1e-6)
    assert len(rep.deltas) == len(rep.levels) - 1
    assert abs(rep.deltas[-1]) < 1e-6


def test_oracle_constant_integrand_exact_every_level():
    u = registry.get("sin_prod")
    rep = rs_oracle(registry.get("one"), u, Rect(0.2, 1.1, -0.4, 0.9), tol=1e-10)
    assert all(lv == pytest.approx(delta11(u, Rect(0.2, 1.1, -0.4, 0.9)), rel=1e-12) for lv in rep.levels)


@pytest.mark.parametrize("t0, s0", [(0.3, 0.7), (0.5, 0.5), (0.123, 0.871), (0.01, 0.2), (1.0, 0.4), (1.0, 1.0)])
def test_unit_step_samples_point(t0, s0):
    f = registry.get("exp_sum")
    rep = rs_oracle(f, unit_step(t0, s0), Q, tol=1e-9)
    assert rep.value == pytest.approx(f.at(t0, s0), abs=1e-6)


def test_max_cells_env(monkeypatch):
    monkeypatch.setenv(ENV_MAX_CELLS, "64")
    assert max_cells() == 64
    rep = rs_oracle(registry.get("sin_prod"), registry.get("exp_sum"), Q, tol=1e-15)
    assert not rep.converged and rep.cells <= 64 and rep.error_estimate > 0
    assert max_cells(8) == 8


def test_linearity_and_integrator_additivity(rng):
    p = GridPartition.uniform(Q, 16, tags="random")
    f1, f2 = registry.get("t2s"), registry.get("sin_prod")
    u1, u2 = registry.get("exp_sum"), registry.get("t2s2")
    lhs = rs_double_sum(2 * f1 + (-3) * f2, u1, p)
    assert lhs == pytest.approx(2 * rs_double_sum(f1, u1, p) - 3 * rs_double_sum(f2, u1, p), rel=1e-12)
    both = rs_double_sum(f1, u1 + u2, p)
    assert both == pytest.approx(rs_double_sum(f1, u1, p) + rs_double_sum(f1, u2, p), rel=1e-12)


def test_ts_integrator_collapses_to_riemann_sum():
    from stieltjes2d.cubature import composite_riemann
    p = GridPartition.uniform(Q, 8, tags="random")
    f = registry.get("exp_sum")
    assert rs_double_sum(f, registry.get("prod_ts"), p) == pytest.approx(composite_riemann(f, p), rel=1e-13)


def test_sup_times_vitali_bound(rng):
    for _ in range(10):
        p = GridPartition.uniform(Q, 12, tags="random", )
        g = registry.get("sin_prod")
        alpha = registry.get("t2s") + registry.get("neg_prod")
        sup = float(np.max(np.abs(g(p.tag_x, p.tag_y))))
        assert abs(rs_double_sum(g, alpha, p)) <= sup * vitali_sum(alpha, p) + 1e-14


def test_parts_constants_both_zero():
    c1 = Surface(lambda t, s: 2.0 + 0 * t, "2")
    c2 = Surface(lambda t, s: -1.0 + 0 * t, "-1")
    r = integration_by_parts(c1, c2, Q)
    assert r.lhs == 0 and r.rhs == 0


def test_parts_pins_corner_order():
    # f = t and u = s have zero mixed increments, so both RS integrals vanish;
    # the corner combination f u(b,d) - f u(b,c) - f u(a,d) + f u(a,c) is 1.
    r = integration_by_parts(registry.get("t"), registry.get("s"), Q)
    assert r.lhs == 0.0
    assert r.rhs == 1.0
    # the discrepancy is exactly the cross term of first partials
    assert r.mixed == pytest.approx(1.0, abs=1e-12)
    assert r.corrected_residual <= 1e-12


def test_parts_sum_ts_against_ts():
    r = integration_by_parts(registry.get("sum_ts"), registry.get("prod_ts"), Q, tol=1e-10)
    assert r.reports[0].value == pytest.approx(1.0, abs=1e-9)
    assert r.reports[1].value == pytest.approx(0.0, abs=1e-12)
    assert r.rhs == 2.0
    assert r.corrected_residual <= 1e-8
