import math

import numpy as np
import pytest

from stieltjes2d import registry
from stieltjes2d.core import (Bimonotone, BoundedBivariation, BracketCertificate, CornerGrowth, DomainError,
                              ErrorCertificate, GridPartition, Holder, Range, Rect, Surface, TagScheme, corners,
                              delta11, rect_split)
from stieltjes2d.registry import separable_sum, poly, ONE


def test_rect_rejects_degenerate():
    with pytest.raises(Exception):
        Rect(0, 0, 0, 1)
    with pytest.raises(Exception):
        Rect(0, 1, 2, 1)


def test_rect_measures():
    q = Rect(0, 2, 1, 4)
    assert (q.width, q.height, q.area) == (2, 3, 6)
    assert q.center == (1, 2.5)


@pytest.mark.parametrize("x, y, areas", [
    (0.5, 0.5, [0.25] * 4),
    (0.0, 0.0, [0, 0, 0, 1]),
])
def test_rect_split_unit(x, y, areas):
    parts = rect_split(Rect(0, 1, 0, 1), x, y)
    assert sorted(p.area for p in parts) == sorted(areas)


def test_rect_split_arithmetic():
    parts = rect_split(Rect(0, 2, 0, 4), 0.5, 1)
    assert sorted(p.area for p in parts) == [0.5, 1.5, 1.5, 4.5]
    assert sum(p.area for p in parts) == 8


def test_rect_split_outside():
    with pytest.raises(DomainError):
        rect_split(Rect(0, 1, 0, 1), 1.5, 0.5)


def test_delta11_examples():
    assert delta11(registry.get("prod_ts"), Rect(0, 1, 0, 1)) == 1
    assert delta11(registry.get("sq_sum"), Rect(-0.3, 1.7, 0.2, 5.0)) == 0
    assert delta11(registry.get("t2s2"), Rect(1, 2, 1, 2)) == 9


def test_delta11_corner_order():
    # u(a,c) - u(a,d) - u(b,c) + u(b,d)
    u = Surface(lambda t, s: 1000 * t + 100 * s + t * s * 10 + 1, "probe")
    q = Rect(0, 1, 0, 1)
    ac, ad, bc, bd = corners(u, q)
    assert delta11(u, q) == pytest.approx(ac - ad - bc + bd)


def test_partition_tags_must_lie_in_cells():
    with pytest.raises(DomainError):
        GridPartition(np.array([0, 1.0]), np.array([0, 1.0]), np.array([[1.5]]), np.array([[0.5]]))


def test_partition_restricted_shares_tags():
    p = GridPartition.uniform(Rect(0, 1, 0, 1), 4, tags="random")
    assert p.scheme is TagScheme.RESTRICTED
    assert np.all(p.tag_x == p.tag_x[:, :1])
    with pytest.raises(DomainError):
        GridPartition(p.xs, p.ys, p.tag_x + np.eye(4) * 1e-3, p.tag_y, TagScheme.RESTRICTED)


def test_certificate_constraints():
    with pytest.raises(ValueError):
        BoundedBivariation(-1.0)
    with pytest.raises(ValueError):
        Holder(1, 1, 1.5, 1)
    with pytest.raises(ValueError):
        Range(2, 1)
    with pytest.raises(ValueError):
        CornerGrowth(1, 1, 1, 1, 0, 1, 1, 1)
    with pytest.raises(ValueError):
        BoundedBivariation(1.0, source="estimated")
    assert BoundedBivariation(1.0, source="estimated", resolution=64).resolution == 64
    CornerGrowth(1, 1, 1, 1, 2.5, 1, 1, 3)  # exponents above one are fine


def test_error_certificate_satisfied_iff_oracle():
    c = ErrorCertificate.build("r", 1.0, 0.5)
    assert c.oracle is None and c.satisfied is None
    c = ErrorCertificate.build("r", 1.0, 0.5, oracle=0.6, oracle_error=0.0)
    assert c.satisfied and c.residual == pytest.approx(0.4)
    c = ErrorCertificate.build("r", 1.0, 0.1, oracle=0.6)
    assert c.satisfied is False


def test_error_certificate_negative_bound_noted():
    c = ErrorCertificate.build("r", 0.0, -0.5, oracle=0.0)
    assert c.bound == 0.0 and c.notes and c.satisfied is False


def test_bracket_certificate():
    b = BracketCertificate.build("b", 0.0, 1.0, 0.5)
    assert b.satisfied and b.excess == 0
    b = BracketCertificate.build("b", 0.0, 1.0, 1.5)
    assert not b.satisfied and b.excess == pytest.approx(0.5)
    b = BracketCertificate.build("b", -math.inf, 1.0, -1e9)
    assert b.satisfied


def test_surface_broadcasts_scalars():
    one = registry.get("one")
    out = one(np.zeros((3, 1)), np.zeros((1, 4)))
    assert out.shape == (3, 4) and np.all(out == 1)


def test_surface_linear_combination_keeps_integral():
    f = registry.get("prod_ts") + registry.get("sum_ts")
    assert f.integral(Rect(0, 1, 0, 1)) == pytest.approx(1.25)


def test_separable_partials_match_fd():
    f = separable_sum("cubic", [(2.0, poly(0, 1, 0, 1), poly(1, 2)), (1.0, ONE, poly(0, 0, 3))])
    h = 1e-5
    for (i, j) in [(1, 0), (0, 1), (1, 1)]:
        p = f.partial(i, j)
        t, s = 0.37, -0.21
        if (i, j) == (1, 0):
            fd = (f.at(t + h, s) - f.at(t - h, s)) / (2 * h)
        elif (i, j) == (0, 1):
            fd = (f.at(t, s + h) - f.at(t, s - h)) / (2 * h)
        else:
            fd = (f.at(t + h, s + h) - f.at(t + h, s - h) - f.at(t - h, s + h) + f.at(t - h, s - h)) / (4 * h * h)
        assert p.at(t, s) == pytest.approx(fd, rel=1e-5)


def test_bimonotone_default_direction():
    assert Bimonotone().direction.value == "increasing"
