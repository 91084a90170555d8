#!/usr/bin/env python3
"""Small explicit fixtures where a stated identity or bound does not hold.

Each line shows the two quantities that should agree (or the value and the
bound it should respect), computed with the library.
"""

from stieltjes2d import registry
from stieltjes2d.bounds import BoundKind, CertBundle, certify
from stieltjes2d.core import BoundedBivariation, Rect
from stieltjes2d.cubature import mercer_bracket
from stieltjes2d.gruss import cheby_kernel_psi, chebyshev
from stieltjes2d.registry import poly, root, separable_sum
from stieltjes2d.rs_sum import integration_by_parts, rs_oracle
from stieltjes2d.taylor import DnField, representation, taylor_midpoint

Q = Rect(0.0, 1.0, 0.0, 1.0)
reg = registry.get


def show(title, **vals):
    print(f"{title}\n    " + ", ".join(f"{k}={v:.6g}" for k, v in vals.items()))


def main():
    r = integration_by_parts(reg("t"), reg("s"), Q, max_cells_per_axis=256)
    show("parts identity, f=t, u=s", lhs=r.lhs, corners=r.rhs, lhs_plus_cross=r.lhs + r.mixed)

    c = certify(BoundKind.OstrowskiBV, reg("t"), None, Q, CertBundle(f=(BoundedBivariation(0.0),)), 0.0, 0.0)
    show("one-point rule at a corner, f=t (zero bivariation)", residual=c.residual, bound=c.bound)

    c = certify(BoundKind.TrapezoidBV, reg("sum_ts"), None, Q, CertBundle(f=(BoundedBivariation(0.0),)))
    show("trapezoid rule, f=t+s", residual=c.residual, bound=c.bound)

    k = cheby_kernel_psi(reg("prod_ts"), reg("prod_ts"), Q, max_cells=512)
    show("Chebyshev functional via the kernel, f=g=ts", kernel=k.T_via_kernel, direct=k.T_direct)
    k = cheby_kernel_psi(reg("t"), reg("t"), Q, max_cells=64)
    show("Chebyshev functional via the kernel, f=g=t", kernel=k.T_via_kernel, direct=k.T_direct)

    for name, n, x, y in (("sq_sum", 0, 0.3, 0.6), ("exp_sum", 2, 0.5, 0.5)):
        f = reg(name)
        rep = representation(f, DnField.from_surface(f, n, Q), Q, x, y, max_cells=512)
        show(f"Taylor representation, f={registry.describe(name)}, n={n}, ({x},{y})", A_plus_B=rep.A + rep.B,
             f=rep.value)
    f = reg("sq_sum")
    m = taylor_midpoint(f, DnField.from_surface(f, 1, Q), Q, max_cells=512)
    show("midpoint split, f=t^2+s^2, n=1", E_plus_F=m.E_M + m.F_M, f=m.value)

    for name, f in (("sqrt(t)sqrt(s)", separable_sum("rr", [(1.0, root(), root())])),
                    ("-t^2", separable_sum("-t2", [(-1.0, poly(0, 0, 1), poly(1.0))]))):
        b = mercer_bracket(f, reg("prod_ts"), Q)
        show(f"Mercer bracket, f={name}, g=ts", lower=b.lower, oracle=rs_oracle(f, reg("prod_ts"), Q, 1e-9, 512).value,
             upper=b.upper)

    t = chebyshev(reg("prod_ts"), reg("prod_ts"), Q).T_value
    show("product-increment Gruss constant, f=g=ts", T=t, constant_bound=1 / 36)


if __name__ == "__main__":
    main()
