"""Command-line front end: ``stieltjes2d <command> --rect a b c d ...``.

Exit codes: 0 success, 2 a certificate was violated, 1 any error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import registry
from .bounds import BoundKind, CertBundle, REQUIRES, certify, variants
from .core import (Bimonotone, BoundedBivariation, BracketCertificate, CertificateMismatch,
                   Direction, ErrorCertificate, Holder, IncrementExtremes, Lipschitz, QuadrantBivariation, Range, Rect,
                   Surface)
from .cubature import (RuleId, companion_rule, mercer_bracket, ostrowski_point_rule, refinement_table,
                       rs_midpoint_rule, rs_trapezoid_rule, simpson_rule, trapezoid4_rule, trapezoid_functional)
from .gridio import load_grid
from .rs_sum import rs_oracle

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2
COMMANDS = ("integrate", "certify", "converge", "variation", "gruss", "taylor")

# single-panel rules a plain-integral bound kind can certify
_RULE_FOR_KIND = {
    BoundKind.OstrowskiBV: {"ostrowski"},
    BoundKind.CompanionBV: {"companion"},
    BoundKind.TrapezoidBV: {"trapezoid4"},
    BoundKind.SimpsonBV: {"simpson"},
    BoundKind.TrapFuncHolderBV: {"trapezoid-functional"},
    BoundKind.TrapFuncLipschitzBV: {"trapezoid-functional"},
    BoundKind.TrapFuncHolderBimono: {"trapezoid-functional"},
}


class UsageError(ValueError):
    pass


@dataclass
class Report:
    command: str
    digest: str
    results: dict = field(default_factory=dict)
    timing: float = 0.0
    table: Optional[list] = None
    columns: tuple = ()

    def __post_init__(self):
        for k, v in self.results.items():
            if isinstance(v, float) and not math.isfinite(v):
                raise ValueError(f"report field {k} is not finite")

    def to_kv(self) -> str:
        lines = [f"command={self.command}", f"digest={self.digest}"]
        lines += [f"{k}={_fmt(v)}" for k, v in self.results.items()]
        if self.table is not None:
            buf = self.to_csv().rstrip("\n").split("\n")
            lines += [f"table.{i}={row}" for i, row in enumerate(buf)]
        lines.append(f"timing={self.timing:.6f}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if self.table is not None:
            w.writerow(self.columns)
            for row in self.table:
                w.writerow([_fmt(v) for v in row])
        else:
            w.writerow(list(self.results))
            w.writerow([_fmt(v) for v in self.results.values()])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_csv() if fmt == "csv" else self.to_kv()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stieltjes2d", description="Certified Riemann-Stieltjes double integrals on rectangles.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--rect", nargs=4, type=float, metavar=("A", "B", "C", "D"), required=True)
    p.add_argument("--f", help="integrand: reg:NAME or a grid file")
    p.add_argument("--u", help="integrator: reg:NAME or a grid file")
    p.add_argument("--g", help="second function (gruss) or integrator alias")
    p.add_argument("--rule")
    p.add_argument("--bound")
    p.add_argument("--variant")
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--levels", type=int, default=6)
    p.add_argument("--tags", default="lower", choices=("lower", "upper", "mid", "random"))
    # integrand certificates
    p.add_argument("--V", type=float)
    p.add_argument("--H1", type=float)
    p.add_argument("--H2", type=float)
    p.add_argument("--beta1", type=float, default=1.0)
    p.add_argument("--beta2", type=float, default=1.0)
    p.add_argument("--L1", type=float)
    p.add_argument("--L2", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--M", type=float)
    p.add_argument("--f-bimonotone", choices=("increasing", "decreasing"))
    # integrator (or second function) certificates
    p.add_argument("--uV", type=float)
    p.add_argument("--uH1", type=float)
    p.add_argument("--uH2", type=float)
    p.add_argument("--ubeta1", type=float, default=1.0)
    p.add_argument("--ubeta2", type=float, default=1.0)
    p.add_argument("--uS", type=float)
    p.add_argument("--us", type=float)
    p.add_argument("--u-bimonotone", choices=("increasing", "decreasing"))
    p.add_argument("--gm", type=float)
    p.add_argument("--gM", type=float)
    p.add_argument("--estimate", action="store_true", help="estimate missing certificates by sampling")
    p.add_argument("--out")
    p.add_argument("--format", choices=("kv", "csv"), default="kv")
    return p


def resolve(name: Optional[str], role: str) -> Surface:
    if name is None:
        raise UsageError(f"--{role} is required for this command")
    if name.startswith("reg:"):
        try:
            return registry.get(name[4:])
        except KeyError as e:
            raise UsageError(str(e.args[0])) from None
    path = Path(name)
    if not path.is_file():
        raise UsageError(f"--{role} {name!r} is neither reg:NAME nor an existing grid file")
    return load_grid(path)


def _rect(vals) -> Rect:
    try:
        return Rect(*vals)
    except Exception as e:
        raise UsageError(f"malformed rect: {e}") from None


def _digest(args: argparse.Namespace, surfaces: dict) -> str:
    payload = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format")}
    payload["surfaces"] = {k: s.descriptor for k, s in surfaces.items()}
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# certificates from flags


def _declared(args, role: str) -> list:
    pre = "" if role == "f" else "u"
    get = lambda name: getattr(args, pre + name, None)
    out = []
    if get("V") is not None:
        out.append(BoundedBivariation(get("V")))
    if get("H1") is not None or get("H2") is not None:
        if get("H1") is None or get("H2") is None:
            raise UsageError(f"--{pre}H1 and --{pre}H2 go together")
        out.append(Holder(get("H1"), get("H2"), get("beta1"), get("beta2")))
    if role == "f":
        if (args.L1 is None) != (args.L2 is None):
            raise UsageError("--L1 and --L2 go together")
        if args.L1 is not None:
            out.append(Lipschitz(args.L1, args.L2))
        if (args.m is None) != (args.M is None):
            raise UsageError("--m and --M go together")
        if args.m is not None:
            out.append(Range(args.m, args.M))
        if args.f_bimonotone:
            out.append(Bimonotone(Direction(args.f_bimonotone)))
    else:
        if (args.uS is None) != (args.us is None):
            raise UsageError("--uS and --us go together")
        if args.uS is not None:
            out.append(IncrementExtremes(args.uS, args.us))
        if args.u_bimonotone:
            out.append(Bimonotone(Direction(args.u_bimonotone)))
    return out


def _estimate(cls, s: Surface, q: Rect, args, x, y):
    from . import variation as var

    if cls is BoundedBivariation:
        est = var.vitali_bivariation(s, q)
        return BoundedBivariation(est.value, "estimated", est.resolution)
    if cls is Range:
        return var.estimate_constants(s, q, "range", 1024)
    if cls is Lipschitz:
        return var.estimate_constants(s, q, "lipschitz", 1024)
    if cls is Holder:
        return var.estimate_constants(s, q, "holder", 1024, args.beta1, args.beta2)
    if cls is IncrementExtremes:
        si = var.bdp_sup_inf(s, q)
        return IncrementExtremes(si.S, si.s, "estimated", si.resolution)
    if cls is Bimonotone:
        r = var.bimonotone_check(s, q)
        if r.kind is var.Bimonotonicity.NEITHER:
            raise CertificateMismatch(f"{s.descriptor} is not bimonotone on the sampled grid")
        return Bimonotone(Direction(r.kind.value), "estimated", 64)
    if cls is QuadrantBivariation:
        from .core import rect_split
        vals = [var.vitali_bivariation(s, b).value for b in rect_split(q, x, y)]
        return QuadrantBivariation(x, y, *vals, source="estimated", resolution=2 ** var.MAX_LEVEL)
    raise CertificateMismatch(f"cannot estimate a {cls.__name__} certificate; declare it")


def bundle_for(kind: BoundKind, variant, f: Surface, u: Optional[Surface], q: Rect, args, x, y) -> CertBundle:
    roles = {"f": _declared(args, "f"), "u": _declared(args, "u")}
    notes = []
    for role, cls in REQUIRES[kind][variant]:
        have = any(isinstance(c, cls) for c in roles[role])
        if have:
            continue
        if cls is QuadrantBivariation and role == "f" and args.V is not None and not args.estimate:
            raise UsageError("theta-quadrant needs quadrant variations; pass --estimate")
        if not args.estimate:
            raise UsageError(f"{kind.value} needs a {cls.__name__} certificate for {role}; declare it or pass --estimate")
        s = f if role == "f" else u
        roles[role].append(_estimate(cls, s, q, args, x, y))
        notes.append(f"{role}:{cls.__name__} estimated")
    return CertBundle(tuple(roles["f"]), tuple(roles["u"]), tuple(notes))


# ---------------------------------------------------------------------------
# commands


def _integrate(args, q, S) -> tuple[dict, int]:
    rule = RuleId(args.rule) if args.rule else None
    if rule is None:
        raise UsageError("--rule is required")
    f = S["f"]
    x = args.x if args.x is not None else q.center[0]
    y = args.y if args.y is not None else q.center[1]
    res: dict = {"rule": rule.value}
    if rule is RuleId.OSTROWSKI_POINT:
        res["value"] = ostrowski_point_rule(f, q, x, y)
        res.update(node_t=x, node_s=y)
    elif rule is RuleId.TRAPEZOID4:
        res["value"] = float(trapezoid4_rule(f, q))
    elif rule is RuleId.SIMPSON9:
        res["value"] = float(simpson_rule(f, q))
    elif rule is RuleId.COMPANION4:
        res["value"] = float(companion_rule(f, q, x, y))
    elif rule is RuleId.MIDPOINT_RS:
        r = rs_midpoint_rule(f, S["u"], q)
        res.update(value=r.value, node_t=r.node[0], node_s=r.node[1], weight=r.weight)
    elif rule is RuleId.TRAPEZOID_RS:
        res["value"] = rs_trapezoid_rule(f, S["u"], q)
    elif rule is RuleId.TRAPEZOID_FUNCTIONAL:
        m = trapezoid_functional(f, S["u"], q, args.tol)
        res.update(value=m.value, oracle_error=m.error, converged=m.converged)
    elif rule is RuleId.MERCER_BRACKET:
        br = mercer_bracket(f, S["u"], q)
        res.update(lower=br.lower, upper=br.upper, node_t=br.nodes[0], node_s=br.nodes[1])
    elif rule in (RuleId.RIEMANN_COMPOSITE, RuleId.RS_COMPOSITE):
        row = refinement_table(rule.value, f, q, args.levels, S.get("u"), args.tags)[-1]
        res.update(value=row.estimate, cells=row.cells)
    if args.u is not None and rule not in (RuleId.MERCER_BRACKET, RuleId.TRAPEZOID_FUNCTIONAL):
        rep = rs_oracle(f, S["u"], q, args.tol)
        res.update(oracle=rep.value, oracle_error=rep.error_estimate, converged=rep.converged)
    return res, EXIT_OK


def _certify(args, q, S) -> tuple[dict, int]:
    if not args.bound:
        raise UsageError("--bound is required")
    try:
        kind = BoundKind.parse(args.bound)
    except ValueError as e:
        raise UsageError(str(e)) from None
    variant = args.variant
    if variant is None and None not in REQUIRES[kind]:
        variant = variants(kind)[0]
    if variant not in REQUIRES[kind]:
        raise UsageError(f"{kind.value} has variants {variants(kind)}")
    if args.rule and kind in _RULE_FOR_KIND and args.rule not in _RULE_FOR_KIND[kind]:
        raise UsageError(f"rule {args.rule!r} is not the rule certified by {kind.value}")
    f = S["f"]
    u = S.get("u")
    x = args.x if args.x is not None else q.center[0]
    y = args.y if args.y is not None else q.center[1]
    needs_u = any(role == "u" for role, _ in REQUIRES[kind][variant]) or kind not in _RULE_FOR_KIND
    if needs_u and u is None and kind not in (BoundKind.OstrowskiBV, BoundKind.CompanionBV, BoundKind.TrapezoidBV,
                                              BoundKind.SimpsonBV):
        raise UsageError(f"{kind.value} needs --u")
    certs = bundle_for(kind, variant, f, u, q, args, x, y)
    c = certify(kind, f, u, q, certs, x, y, variant, args.tol)
    res: dict = {"rule": args.rule or "", "bound_kind": c.rule_id}
    if isinstance(c, ErrorCertificate):
        res.update(estimate=c.estimate, bound=c.bound, oracle=c.oracle, residual=c.residual, slack=c.slack,
                   satisfied=c.satisfied)
    elif isinstance(c, BracketCertificate):
        res.update(lower=_finite_or_none(c.lower), upper=_finite_or_none(c.upper), oracle=c.value, slack=c.slack,
                   satisfied=c.satisfied)
    for i, note in enumerate(tuple(certs.notes) + tuple(c.notes)):
        res[f"note.{i}"] = note
    return res, EXIT_OK if c.satisfied else EXIT_VIOLATION


def _finite_or_none(v: float):
    return v if math.isfinite(v) else None


def _converge(args, q, S):
    rule = args.rule or "riemann"
    try:
        rows = refinement_table(rule, S["f"], q, args.levels, S.get("u"), args.tags)
    except ValueError as e:
        raise UsageError(str(e)) from None
    table = [(r.level, r.cells, r.estimate, r.reference, r.error, r.bound) for r in rows]
    violated = any(r.bound is not None and r.error > r.bound + 1e-12 for r in rows)
    res = {"rule": rule, "levels": len(rows), "final_error": rows[-1].error,
           "bound_holds": not violated if rows[0].bound is not None else None}
    cols = ("level", "cells", "estimate", "reference", "error", "bound")
    return res, EXIT_OK, table, cols


def _variation(args, q, S):
    from . import variation as var
    f = S["f"]
    v = var.vitali_bivariation(f, q)
    a = var.arzela_variation(f, q)
    b = var.bimonotone_check(f, q)
    return {"vitali": v.value, "vitali_converged": v.converged, "vitali_resolution": v.resolution,
            "arzela": a.value, "arzela_converged": a.converged, "bimonotone": b.kind.value}, EXIT_OK


def _gruss(args, q, S):
    from .gruss import chebyshev
    from .variation import estimate_constants
    f, g = S["f"], S["g"]
    fr = Range(args.m, args.M) if args.m is not None and args.M is not None else None
    gr = Range(args.gm, args.gM) if args.gm is not None and args.gM is not None else None
    if args.estimate:
        fr = fr or estimate_constants(f, q, "range", 4096)
        gr = gr or estimate_constants(g, q, "range", 4096)
    rep = chebyshev(f, g, q, f_range=fr, g_range=gr)
    res = {"T": rep.T_value, "T_korkine": rep.T_korkine, "mean_f": rep.mean_f, "mean_g": rep.mean_g}
    code = EXIT_OK
    if fr is not None and gr is not None:
        ok = abs(rep.T_value) <= rep.bound + 1e-9
        res.update(bound=rep.bound, satisfied=ok)
        code = EXIT_OK if ok else EXIT_VIOLATION
    return res, code


def _taylor(args, q, S):
    from . import taylor as T
    f = S["f"]
    n = args.n
    x = args.x if args.x is not None else q.center[0]
    y = args.y if args.y is not None else q.center[1]
    dn = T.DnField.from_surface(f, n, q)
    rep = T.representation(f, dn, q, x, y, args.tol)
    mid = T.taylor_midpoint(f, dn, q, args.tol)
    res = {"n": n, "x": x, "y": y, "value": rep.value, "A_n": rep.A, "B_n": rep.B, "representation_residual":
           rep.residual, "E_M": mid.E_M, "F_M": mid.F_M, "midpoint_residual": mid.residual}
    code = EXIT_OK
    certs = T.quadrant_certificates(dn, q, x, y)
    if args.V is not None:
        bound = T.taylor_bounds("midpoint", q, x, y, n, BoundedBivariation(args.V))
        ok = abs(mid.F_M) <= bound + mid.F_error + 1e-9
        res.update(midpoint_bound=bound, satisfied=ok)
        code = EXIT_OK if ok else EXIT_VIOLATION
    for fam in T.FAMILIES:
        if n == 0 and fam in T.BV_FAMILIES and fam != "bv-quadrant":
            continue
        res[f"bound.{fam}"] = T.taylor_bounds(fam, q, x, y, n, T.family_certificate(fam, certs))
    return res, code


def run(argv) -> tuple[Report, int]:
    argv = list(argv)
    t0 = time.perf_counter()
    args = None
    try:
        args = build_parser().parse_args(argv)
        q = _rect(args.rect)
        S = {}
        for role in ("f", "u", "g"):
            src = getattr(args, role)
            if src is not None:
                S[role] = resolve(src, role)
        if "f" not in S:
            raise UsageError("--f is required")
        if args.command == "gruss" and "g" not in S:
            raise UsageError("gruss needs --g")
        if "u" not in S and "g" in S and args.command != "gruss":
            S["u"] = S["g"]
        table, cols = None, ()
        if args.command == "converge":
            res, code, table, cols = _converge(args, q, S)
        else:
            handler = {"integrate": _integrate, "certify": _certify, "variation": _variation, "gruss": _gruss,
                       "taylor": _taylor}[args.command]
            res, code = handler(args, q, S)
        rep = Report(args.command, _digest(args, S), res, time.perf_counter() - t0, table, cols)
    except Exception as e:  # every failure becomes an exit-1 report
        cmd = args.command if args is not None else (argv[0] if argv else "")
        rep = Report(cmd, "", {"error": f"{type(e).__name__}: {e}"}, time.perf_counter() - t0)
        code = EXIT_ERROR
    if args is not None and args.out:
        Path(args.out).write_text(rep.render(args.format), encoding="utf-8")
    return rep, code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    rep, code = run(argv)
    fmt = "kv"
    if "--format" in argv:
        i = argv.index("--format")
        fmt = argv[i + 1] if i + 1 < len(argv) else "kv"
    out = rep.render(fmt)
    (sys.stderr if code == EXIT_ERROR else sys.stdout).write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
