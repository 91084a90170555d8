"""Named analytic surfaces with exact partials, cell integrals and jump lines.

Each entry is a finite sum of products p(t) q(s) of one-dimensional factors
whose derivatives and antiderivatives are known in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import Polynomial

from .core import Box, Surface

MAX_PARTIAL = 4


@dataclass(frozen=True)
class Factor:
    """A 1D function with its derivatives (None where not smooth) and antiderivative."""

    fn: Callable[[np.ndarray], np.ndarray]
    derivs: tuple
    antider: Callable[[np.ndarray], np.ndarray]
    jumps: tuple = ()

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def deriv(self, k: int) -> Optional["Factor"]:
        if k == 0:
            return self
        if k > len(self.derivs) or self.derivs[k - 1] is None:
            return None
        return Factor(self.derivs[k - 1], (), lambda x: np.full(np.shape(x), np.nan))


def poly(*coef) -> Factor:
    p = Polynomial(coef)
    return Factor(p, tuple(p.deriv(k) for k in range(1, MAX_PARTIAL + 2)), p.integ())


def expo(k: float = 1.0) -> Factor:
    return Factor(lambda x: np.exp(k * x), tuple((lambda x, m=m: k ** m * np.exp(k * x))
                                               for m in range(1, MAX_PARTIAL + 2)), lambda x: np.exp(k * x) / k)


def sine(w: float = 1.0, phase: float = 0.0) -> Factor:
    def d(m):
        return lambda x: w ** m * np.sin(w * x + phase + m * math.pi / 2)

    return Factor(d(0), tuple(d(m) for m in range(1, MAX_PARTIAL + 2)), lambda x: -np.cos(w * x + phase) / w)


def root() -> Factor:
    """sqrt on [0, inf); derivatives blow up at 0 and are left to finite differences."""
    return Factor(lambda x: np.sqrt(x), (), lambda x: 2.0 / 3.0 * x ** 1.5)


def step(x0: float) -> Factor:
    return Factor(lambda x: (x >= x0).astype(float), (), lambda x: np.maximum(x - x0, 0.0), (x0,))


def sign(x0: float) -> Factor:
    return Factor(lambda x: np.where(x >= x0, 1.0, -1.0), (), lambda x: np.abs(x - x0), (x0,))


ONE = poly(1.0)


def separable_sum(name: str, terms: list[tuple[float, Factor, Factor]], order: int = MAX_PARTIAL + 1) -> Surface:
    """Surface for the sum of k * p(t) * q(s) with partials up to total order ``order``."""

    def build(i: int, j: int) -> Optional[Surface]:
        parts = []
        for k, p, q in terms:
            pi, qj = p.deriv(i), q.deriv(j)
            if pi is None or qj is None:
                return None
            parts.append((k, pi, qj))

        def fn(t, s):
            out = 0.0
            for k, a, b in parts:
                out = out + k * a(t) * b(s)
            return out

        return Surface(fn, f"D{i},{j}[{name}]")

    partials = {}
    for i in range(order + 1):
        for j in range(order + 1 - i):
            if (i, j) != (0, 0):
                got = build(i, j)
                if got is not None:
                    partials[(i, j)] = got

    def cell_integral(box: Box) -> float:
        return float(sum(k * (p.antider(box.b) - p.antider(box.a)) * (q.antider(box.d) - q.antider(box.c))
                         for k, p, q in terms))

    jx = sorted({x for _, p, _ in terms for x in p.jumps})
    jy = sorted({y for _, _, q in terms for y in q.jumps})
    base = build(0, 0)
    return Surface(base.fn, name, partials=partials, cell_integral=cell_integral, jumps_x=jx, jumps_y=jy)


T1 = poly(0.0, 1.0)
T2 = poly(0.0, 0.0, 1.0)

_TABLE: dict[str, tuple[str, Callable[[], Surface]]] = {
    "one": ("1", lambda: separable_sum("one", [(1.0, ONE, ONE)])),
    "t": ("t", lambda: separable_sum("t", [(1.0, T1, ONE)])),
    "s": ("s", lambda: separable_sum("s", [(1.0, ONE, T1)])),
    "prod_ts": ("t*s", lambda: separable_sum("prod_ts", [(1.0, T1, T1)])),
    "sum_ts": ("t+s", lambda: separable_sum("sum_ts", [(1.0, T1, ONE), (1.0, ONE, T1)])),
    "t_minus_s": ("t-s", lambda: separable_sum("t_minus_s", [(1.0, T1, ONE), (-1.0, ONE, T1)])),
    "neg_prod": ("-t*s", lambda: separable_sum("neg_prod", [(-1.0, T1, T1)])),
    "t2s": ("t^2*s", lambda: separable_sum("t2s", [(1.0, T2, T1)])),
    "t2s2": ("t^2*s^2", lambda: separable_sum("t2s2", [(1.0, T2, T2)])),
    "sq_sum": ("t^2+s^2", lambda: separable_sum("sq_sum", [(1.0, T2, ONE), (1.0, ONE, T2)])),
    "exp_sum": ("exp(t+s)", lambda: separable_sum("exp_sum", [(1.0, expo(), expo())])),
    "sin_prod": ("sin(t)*sin(s)", lambda: separable_sum("sin_prod", [(1.0, sine(), sine())])),
    "sqrt_sum": ("sqrt(t)+sqrt(s), t,s >= 0", lambda: separable_sum("sqrt_sum", [(1.0, root(), ONE),
                                                                                 (1.0, ONE, root())])),
    "step_half": ("H(t-1/2)*H(s-1/2)", lambda: separable_sum("step_half", [(1.0, step(0.5), step(0.5))])),
    "sgn_prod": ("sgn(t-1/2)*sgn(s-1/2)", lambda: separable_sum("sgn_prod", [(1.0, sign(0.5), sign(0.5))])),
}


def names() -> list[str]:
    return list(_TABLE)


def describe(name: str) -> str:
    return _TABLE[name][0]


def get(name: str) -> Surface:
    try:
        return _TABLE[name][1]()
    except KeyError:
        raise KeyError(f"unknown registry surface {name!r}; known: {', '.join(_TABLE)}") from None


def unit_step(t0: float, s0: float) -> Surface:
    """Integrator whose only mixed mass is a unit atom at (t0, s0) (right-continuous)."""
    return separable_sum(f"step@({t0},{s0})", [(1.0, step(t0), step(s0))])
