import numpy as np
import pytest

from stieltjes2d import registry
from stieltjes2d.core import Box, DataError, DomainError
from stieltjes2d.gridio import (GridFile, format_grid, grid_surface, load_grid, parse_grid, read_grid, sample_grid,
                                write_grid)
from stieltjes2d.quad import integrate_2d_fn


def test_registry_catalogue():
    names = registry.names()
    assert len(names) >= 12
    assert registry.describe("prod_ts") == "t*s"
    with pytest.raises(KeyError, match="known"):
        registry.get("nope")


@pytest.mark.parametrize("name", ["prod_ts", "t2s2", "exp_sum", "sin_prod", "sq_sum", "sqrt_sum"])
def test_registry_cell_integral_matches_quadrature(name):
    f = registry.get(name)
    box = Box(0.1, 0.9, 0.2, 0.7)
    ref = integrate_2d_fn(f, box, 1e-13).value
    assert f.integral(box) == pytest.approx(ref, rel=1e-11, abs=1e-14)


def test_registry_partials():
    f = registry.get("t2s2")
    assert f.partials[(1, 1)](0.5, 0.5) == pytest.approx(1.0)
    assert f.partials[(2, 2)](0.3, 0.9) == pytest.approx(4.0)
    e = registry.get("exp_sum")
    assert e.partials[(2, 1)](0.2, 0.3) == pytest.approx(np.exp(0.5))


def test_step_surfaces_declare_jumps():
    f = registry.get("step_half")
    assert tuple(f.jumps_x) == (0.5,) and tuple(f.jumps_y) == (0.5,)
    assert f(0.5, 0.5) == 1 and f(0.49, 0.9) == 0
    u = registry.unit_step(0.3, 0.6)
    assert u(0.3, 0.6) == 1 and u(0.29, 0.6) == 0


def test_bilinear_of_product_is_exact():
    g = sample_grid(registry.get("prod_ts"), [0.0, 1.0], [0.0, 1.0])
    s = grid_surface(g)
    assert s(0.5, 0.5) == 0.25


def test_nodes_bit_exact_and_hull():
    xs, ys = [0.0, 0.1, 0.35, 1.0], [-1.0, 0.3, 2.0]
    vals = np.random.default_rng(3).normal(size=(3, 4))
    s = grid_surface(GridFile(np.array(xs), np.array(ys), vals))
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            assert s(x, y) == vals[i, j]
    with pytest.raises(DomainError):
        s(1.01, 0.0)
    with pytest.raises(DomainError):
        s(0.5, -1.5)


def test_round_trip_through_file(tmp_path):
    rng = np.random.default_rng(11)
    xs = np.cumsum(rng.uniform(0.01, 1, 7))
    ys = np.cumsum(rng.uniform(0.01, 1, 5))
    vals = rng.normal(size=(5, 7)) * 10.0 ** rng.integers(-12, 12, size=(5, 7))
    p = tmp_path / "g.csv"
    write_grid(p, xs, ys, vals)
    g = read_grid(p)
    assert np.array_equal(g.xs, xs) and np.array_equal(g.ys, ys) and np.array_equal(g.values, vals)
    s = load_grid(p)
    assert str(p) in s.descriptor and g.digest[:12] in s.descriptor


def test_crlf_and_scientific_literals():
    g = parse_grid(",0,1e0\r\n0,1.5E-3,2\r\n1,3,4\r\n")
    assert g.values[0, 0] == 1.5e-3 and g.xs[1] == 1.0


@pytest.mark.parametrize("text, where", [
    (",0,1\n0,1\n1,3,4\n", "row 2"),
    (",0,1\n0,1,x\n1,3,4\n", "row 2, column 3"),
    (",1,0\n0,1,2\n1,3,4\n", "column 3"),
    (",0,1\n1,1,2\n0,3,4\n", "row 3"),
    ("z,0,1\n0,1,2\n1,3,4\n", "row 1, column 1"),
    (",0,1\n0,1,nan\n1,3,4\n", "row 2, column 3"),
])
def test_parse_errors_carry_position(text, where):
    with pytest.raises(DataError, match=where):
        parse_grid(text)


def test_too_small_grid():
    with pytest.raises(DataError):
        parse_grid(",0\n0,1\n")
