"""Surfaces from symbolic expressions in t and s, with exact partial derivatives.

Requires the optional ``sympy`` dependency.
"""

from __future__ import annotations

import numpy as np


def from_expr(expr, max_order: int = 6, descriptor: str | None = None):
    """Build a Surface from a sympy expression (or string) in ``t`` and ``s``.

    Every mixed partial of total order up to ``max_order`` is attached as
    metadata, so Taylor machinery never falls back to finite differences.
    """
    import sympy as sp

    from .core import Surface

    t, s = sp.symbols("t s", real=True)
    if isinstance(expr, str):
        expr = sp.sympify(expr, locals={"t": t, "s": s})

    def lam(e):
        f = sp.lambdify((t, s), e, modules="numpy")
        if e.free_symbols:
            return f
        k = float(e)
        return lambda x, y: np.full(np.broadcast_shapes(np.shape(x), np.shape(y)), k)

    name = descriptor or str(expr)
    partials = {}
    for i in range(max_order + 1):
        for j in range(max_order + 1 - i):
            if i == j == 0:
                continue
            e = sp.diff(expr, t, i, s, j) if i and j else (sp.diff(expr, t, i) if i else sp.diff(expr, s, j))
            partials[(i, j)] = Surface(lam(e), f"D{i},{j}[{name}]")
    return Surface(lam(expr), name, partials=partials)
