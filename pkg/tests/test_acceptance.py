"""Acceptance criteria, one test per criterion.

Each test prints a single ``C<k> PASS|FAIL`` line (straight to the terminal,
bypassing capture) before asserting, so a full run shows every verdict.
"""

import math
import time

import numpy as np
import pytest

from stieltjes2d import registry
from stieltjes2d.bounds import BoundKind, CertBundle, certify
from stieltjes2d.cli import run
from stieltjes2d.core import BoundedBivariation, NodeOutOfDomain, Range, Rect, Surface
from stieltjes2d.cubature import mercer_bracket, refinement_table, rs_midpoint_rule, rs_trapezoid_rule
from stieltjes2d.families import random_rect, random_separable, soundness_sweep
from stieltjes2d.gridio import read_grid, write_grid
from stieltjes2d.gruss import cheby_kernel_psi, chebyshev, korkine_residual
from stieltjes2d.quad import integrate_2d
from stieltjes2d.registry import expo, poly, separable_sum, sine, step, sign
from stieltjes2d.rs_sum import integration_by_parts, rs_oracle
from stieltjes2d.taylor import (DnField, quadrant_certificates, representation, taylor_bounds,
                                taylor_midpoint)

UNIT = Rect(0.0, 1.0, 0.0, 1.0)


@pytest.fixture
def verdict(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\nC{k} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def random_poly_surface(rng, deg=3):
    terms = [(float(rng.normal()), poly(*rng.normal(size=int(rng.integers(1, deg + 2)))),
              poly(*rng.normal(size=int(rng.integers(1, deg + 2))))) for _ in range(int(rng.integers(1, 4)))]
    return separable_sum("poly", terms)


def sup_on(f, q, n=17):
    x, y = np.meshgrid(np.linspace(q.a, q.b, n), np.linspace(q.c, q.d, n))
    return float(np.max(np.abs(f(x, y))))


def test_c1_integration_by_parts(verdict):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst, worst_corr, fails = 0.0, 0.0, 0
    for _ in range(20):
        q = Rect(*sorted(rng.uniform(-1, 1, 2)), *sorted(rng.uniform(-1, 1, 2)))
        f, u = random_poly_surface(rng), random_poly_surface(rng)
        r = integration_by_parts(f, u, q, tol=1e-9, max_cells_per_axis=256)
        scale = 1.0 + abs(r.lhs) + abs(r.rhs)
        worst = max(worst, r.residual / scale)
        worst_corr = max(worst_corr, r.corrected_residual / scale)
        fails += r.residual > 1e-8 * scale
    dt = time.perf_counter() - t0
    verdict(1, fails == 0 and dt < 10,
            f"{fails}/20 pairs exceed 1e-8*scale (worst {worst:.3g}); with the cross term added worst "
            f"{worst_corr:.3g}; {dt:.1f}s")


def test_c2_moment_exactness(verdict):
    t0 = time.perf_counter()
    rects = [UNIT, Rect(0.5, 2.0, -1.0, 0.5)]
    worst, oracle_ok, n = 0.0, True, 0
    for q in rects:
        for gname in ("prod_ts", "t2s2", "exp_sum"):
            g = registry.get(gname)
            dens = g.partial(1, 1)
            for rule, fnames in ((rs_trapezoid_rule, ("one", "t", "s", "prod_ts")), (rs_midpoint_rule, ("one", "t", "s"))):
                for fname in fnames:
                    f = registry.get(fname)
                    ref = integrate_2d(Surface(lambda x, y: f(x, y) * dens(x, y), "f*g_ts"), q, 1e-15).value
                    got = rule(f, g, q)
                    got = got.value if hasattr(got, "value") else got
                    worst = max(worst, abs(got - ref) / max(1.0, abs(ref)))
                    orc = rs_oracle(f, g, q, 1e-10, 512)
                    oracle_ok &= abs(orc.value - got) <= orc.error_estimate + 1e-10 * max(1.0, abs(ref))
                    n += 1
    dt = time.perf_counter() - t0
    verdict(2, worst <= 1e-10 and oracle_ok and dt < 5,
            f"{n} rule/f/g/rect cases, worst rel error {worst:.2g} vs closed-form means; oracle agrees within its "
            f"error estimate: {oracle_ok}; {dt:.1f}s")


def test_c3_oracle_sanity(verdict):
    r = rs_oracle(registry.get("prod_ts"), registry.get("t2s2"), UNIT, 1e-10, 512)
    err1 = abs(r.value - 4 / 9)
    f = registry.get("exp_sum")
    err2 = 0.0
    for t0, s0 in ((0.3, 0.7), (0.5, 0.5), (0.123, 0.9)):
        p = rs_oracle(f, registry.unit_step(t0, s0), UNIT, 1e-10, 512)
        err2 = max(err2, abs(p.value - math.exp(t0 + s0)))
    verdict(3, err1 <= 1e-6 and err2 <= 1e-6 and r.cells <= 512,
            f"|oracle(ts, t^2 s^2) - 4/9| = {err1:.2g} at {r.cells}^2 cells; unit-step sampling error {err2:.2g}")


def test_c4_soundness_sweep(verdict):
    t0 = time.perf_counter()
    bad = []
    for kind in BoundKind:
        r = soundness_sweep(kind, 500, seed=2024, tol=1e-7, max_cells=256)
        if r.violations:
            bad.append(f"{kind.value}={r.violations}")
    dt = time.perf_counter() - t0
    verdict(4, not bad and dt < 120,
            f"{len(BoundKind)} kinds x 500 fixtures in {dt:.0f}s; violations: {', '.join(bad) or 'none'}")


def test_c5_sharpness(verdict):
    best, best_any = 0.0, 0.0
    for k in range(1, 16):
        for j in range(1, 16):
            x0, y0 = k / 16, j / 16
            for fac, V in ((step, 1.0), (sign, 4.0)):
                f = separable_sum("aligned", [(1.0, fac(x0), fac(y0))])
                c = certify(BoundKind.TrapezoidBV, f, None, UNIT, CertBundle(f=(BoundedBivariation(V),)))
                ratio = c.residual / c.bound
                best_any = max(best_any, ratio)
                if c.satisfied:
                    best = max(best, ratio)
    sg = registry.get("sgn_prod")
    rep = chebyshev(sg, sg, UNIT, f_range=Range(-1, 1), g_range=Range(-1, 1))
    gr = abs(rep.T_value) / rep.bound
    verdict(5, best >= 0.5 and abs(gr - 1) <= 1e-9,
            f"trapezoid-BV best residual/bound {best:.4f} among fixtures where the bound holds (max over all "
            f"aligned steps {best_any:.4f}); Gruss ratio {gr!r}")


def test_c6_korkine_and_kernel(verdict):
    rng = np.random.default_rng(606)
    worst = 0.0
    for _ in range(10):
        q = random_rect(rng)
        f, g = random_poly_surface(rng), random_poly_surface(rng)
        scale = q.area ** 2 * (1 + sup_on(f, q)) * (1 + sup_on(g, q))
        worst = max(worst, korkine_residual(f, g, q) / scale)
    pairs = [("t", "t"), ("prod_ts", "prod_ts"), ("t2s2", "prod_ts"), ("exp_sum", "sin_prod"), ("sq_sum", "t2s")]
    kern = {}
    for a, b in pairs:
        r = cheby_kernel_psi(registry.get(a), registry.get(b), UNIT, 1e-9, 512)
        kern[f"{a}/{b}"] = r.residual_vs_direct
    kworst = max(kern.values())
    verdict(6, worst <= 1e-9 and kworst <= 1e-6,
            f"Korkine worst residual/scale {worst:.2g} on 10 polynomial pairs; kernel-vs-direct worst "
            f"{kworst:.3g} ({', '.join(f'{k}:{v:.3g}' for k, v in kern.items())})")


def smooth_fixtures():
    names = ["prod_ts", "sum_ts", "neg_prod", "t2s", "t2s2", "sq_sum", "exp_sum", "sin_prod"]
    out = [(n, registry.get(n)) for n in names]
    out.append(("mix1", separable_sum("mix1", [(1.0, sine(2.0, 0.3), expo(-0.5)), (0.5, poly(0, 0, 0, 1), poly(1))])))
    out.append(("mix2", separable_sum("mix2", [(2.0, poly(1, 2, 0, -1), poly(0, 1, 1)), (-1.0, expo(0.7), sine(1.5))])))
    return out


def test_c7_taylor(verdict):
    rng = np.random.default_rng(707)
    pts = [(float(x), float(y)) for x, y in rng.uniform(0, 1, (5, 2))]
    worst, fails, mid_viol, total = 0.0, [], 0, 0
    for name, f in smooth_fixtures():
        for n in (0, 1, 2):
            dn = DnField.from_surface(f, n, UNIT)
            for x, y in pts:
                r = representation(f, dn, UNIT, x, y, tol=1e-9, max_cells=512)
                total += 1
                worst = max(worst, r.residual)
                if r.residual > 1e-6:
                    fails.append(f"{name}/n={n}")
            m = taylor_midpoint(f, dn, UNIT, tol=1e-9, max_cells=512)
            V = quadrant_certificates(dn, UNIT, 0.5, 0.5)["total"]
            if abs(m.F_M) > taylor_bounds("midpoint", UNIT, 0.5, 0.5, n, V) + m.F_error + 1e-9:
                mid_viol += 1
    failed = sorted(set(fails))
    verdict(7, not failed and mid_viol == 0,
            f"representation: {len(fails)}/{total} point checks above 1e-6 (worst {worst:.3g}; "
            f"{', '.join(failed) or 'none'}); midpoint bound violations {mid_viol}/30")


def test_c8_composite_convergence(verdict):
    names = ["prod_ts", "t2s2", "exp_sum", "sin_prod", "sq_sum", "sum_ts"]
    broken, not_decreasing = [], []
    for tags in ("lower", "mid"):
        for name in names:
            rows = refinement_table("riemann", registry.get(name), UNIT, 6, tags=tags)
            over = [r.level for r in rows if r.error > r.bound + 1e-12]
            if over:
                broken.append(f"{name}[{tags}]@{over}")
            if rows[5].error > rows[1].error:
                not_decreasing.append(f"{name}[{tags}]")
    verdict(8, not broken and not not_decreasing,
            f"error above per-cell bound: {'; '.join(broken) or 'none'}; level 6 worse than level 2: "
            f"{', '.join(not_decreasing) or 'none'}")


def test_c9_mercer(verdict):
    rng = np.random.default_rng(909)
    viol, done, skipped, worst = 0, 0, 0, 0.0
    while done < 100:
        q = random_rect(rng)
        f = random_separable(rng, q, bimonotone=True).surface
        g = random_separable(rng, q, bimonotone=True).surface
        try:
            br = mercer_bracket(f, g, q)
        except NodeOutOfDomain:
            skipped += 1
            continue
        ref = rs_oracle(f, g, q, 1e-9, 512)
        slack = ref.error_estimate + 1e-9
        ex = max(br.lower - ref.value, ref.value - br.upper)
        if ex > slack:
            viol += 1
            worst = max(worst, ex)
        done += 1
    verdict(9, viol == 0, f"{viol}/100 brackets miss the oracle (worst excess {worst:.3g}); {skipped} draws with "
                          f"unsolvable node equations redrawn")


def test_c10_cli(verdict, tmp_path):
    unit = ["--rect", "0", "1", "0", "1"]
    r1, c1 = run(["integrate", "--rule", "midpoint", "--f", "reg:sum_ts", "--u", "reg:prod_ts", *unit])
    ok1 = c1 == 0 and r1.results["value"] == 1 and (r1.results["node_t"], r1.results["node_s"]) == (0.5, 0.5)
    r2, c2 = run(["certify", "--rule", "trapezoid4", "--bound", "trapezoid-bv", "--f", "reg:prod_ts", *unit, "--V", "1"])
    ok2 = c2 == 0 and r2.results["bound"] == 0.25 and r2.results["residual"] == 0 and r2.results["satisfied"] is True
    r3, c3 = run(["converge", "--rule", "riemann", "--f", "reg:prod_ts", *unit, "--levels", "6"])
    err = [row[4] for row in r3.table]
    ok3 = c3 == 0 and all(b < a for a, b in zip(err[1:], err[2:]))
    rng = np.random.default_rng(1010)
    xs, ys = np.cumsum(rng.uniform(0.1, 1, 6)), np.cumsum(rng.uniform(0.1, 1, 4))
    vals = rng.normal(size=(4, 6)) * 10.0 ** rng.integers(-20, 20, size=(4, 6))
    write_grid(tmp_path / "g.csv", xs, ys, vals)
    g = read_grid(tmp_path / "g.csv")
    ok4 = np.array_equal(g.values, vals) and np.array_equal(g.xs, xs) and np.array_equal(g.ys, ys)
    _, c5 = run(["certify", "--rule", "trapezoid4", "--bound", "trapezoid-bv", "--f", "reg:t2s2", *unit, "--V", "0.01"])
    ok5 = c5 == 2
    verdict(10, ok1 and ok2 and ok3 and ok4 and ok5,
            f"integrate {ok1}, certify {ok2}, converge {ok3}, grid round-trip {ok4}, undersized certificate exit 2 {ok5}")
