"""Command-line interface: ``quasicheese <group> <command> [options]``.

Exit codes: 0 pass, 1 I/O error, 2 verification failure, 64 usage error,
65 malformed input.
"""
from __future__ import annotations

import argparse
import math
import sys
from datetime import datetime, timezone
from pathlib import Path as FsPath

from . import __version__
from . import serialization as ser
from .cohen_engine import (FOUR_E, InsufficientDivergence, b_table, easycase_bound,
                           propagate_vanishing_bound, verify_cohen_bounds)
from .construction import (ConstructionResult, build_construction, circle_certificate)
from .geometry import is_classical, rho
from .paths import QuadratureError, contour_integral, length
from .rational_jets import PoleError, sup_jet_on_circle
from .render import cheese_svg
from .sequences import (PositiveSequence, classify_divergence, dales_davie_norm, dc_partial_sums,
                        f_analytic_statistic, is_algebra_sequence, log_convex_minorant,
                        named_family)

EXIT_OK, EXIT_IO, EXIT_FAIL, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- output helpers ---------------------------------------------------------

def _stamp(doc: dict, args) -> dict:
    if not args.reproducible:
        doc = {**doc, "generated": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    return doc


def _table(rows, header) -> str:
    cells = [[str(h) for h in header]] + [[_cell(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, complex):
        return f"{v.real:.6g}{v.imag:+.6g}j"
    return str(v)


def _emit(args, doc: dict, rows=None, header=None) -> None:
    """Write ``doc`` as JSON (or ``rows`` as a table) to ``--out`` or stdout."""
    if args.format == "table" and rows is not None:
        text = _table(rows, header) + "\n"
    else:
        text = ser.dumps(_stamp(doc, args)) + "\n"
    if getattr(args, "out", None):
        FsPath(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise UsageError(f"{name} must be positive")
    return value


# --- sequences --------------------------------------------------------------

def _sequence(args) -> PositiveSequence:
    if getattr(args, "values", None):
        try:
            vals = [float(v) for v in args.values.split(",")]
        except ValueError as exc:
            raise UsageError(f"--values: {exc}") from exc
        return PositiveSequence.from_values(vals)
    if getattr(args, "input", None):
        return ser.sequence_from_dict(ser.read_json(args.input))
    if args.family:
        try:
            return named_family(args.family, args.N)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    raise UsageError("give --family, --values or --input")


def _sup_norms(args) -> list[float]:
    if args.sup:
        try:
            return [float(v) for v in args.sup.split(",")]
        except ValueError as exc:
            raise UsageError(f"--sup: {exc}") from exc
    if args.rational:
        f = ser.rational_from_dict(ser.read_json(args.rational))
        return sup_jet_on_circle(f, 0j, _positive("--r", args.r), args.K)
    raise UsageError("give --sup or --rational")


def cmd_seq(args) -> int:
    op = args.op
    if op == "minorant":
        M = _sequence(args)
        mr = log_convex_minorant(M)
        doc = {"principal_indices": list(mr.principal_indices), "vertices": list(mr.vertices),
               "minorant": mr.minorant.values.tolist(), "input": M.values.tolist()}
        rows = [(n, float(M.values[n]), float(mr.minorant.values[n]), n in mr.principal_indices)
                for n in range(len(M))]
        _emit(args, doc, rows, ("n", "M_n", "minorant", "principal"))
        return EXIT_OK
    if op == "dc":
        M = _sequence(args)
        dc = dc_partial_sums(M, args.up_to)
        cls = classify_divergence(M) if M.N >= 32 else None
        doc = {"N": int(len(dc.root_sums)), "root_sum": float(dc.root_sums[-1]),
               "ratio_sum": float(dc.ratio_sums[-1]) if dc.ratio_sums is not None else None,
               "classification": cls.label.value if cls else "INCONCLUSIVE",
               "slope": cls.slope if cls else None}
        step = max(1, len(dc.root_sums) // 20)
        idx = list(range(step - 1, len(dc.root_sums), step))
        if idx[-1] != len(dc.root_sums) - 1:
            idx.append(len(dc.root_sums) - 1)
        rows = [(i + 1, float(dc.root_sums[i]),
                 float(dc.ratio_sums[i]) if dc.ratio_sums is not None else math.inf)
                for i in idx]
        _emit(args, doc, rows, ("n", "sum_{j<=n} M_j^(-1/j)", "sum_{j<n} M^c_j/M^c_{j+1}"))
        return EXIT_OK
    if op == "algebra":
        M = _sequence(args)
        ok, where = is_algebra_sequence(M)
        doc = {"verdict": "PASS" if ok else "FAIL", "first_violation": where}
        _emit(args, doc, [("PASS" if ok else "FAIL", where)], ("verdict", "first (j,k)"))
        return EXIT_OK if ok else EXIT_FAIL
    if op == "ddnorm":
        sups = _sup_norms(args)
        M = _sequence(args) if (args.family or args.values or args.input) else None
        if M is None:
            raise UsageError("ddnorm needs a weight sequence (--family/--values/--input)")
        if len(M) < len(sups):
            raise UsageError("weight sequence shorter than the sup norms")
        M = PositiveSequence(M.log_values[:len(sups)])
        dd = dales_davie_norm(sups, M)
        doc = {"partial_sum": dd.partial_sum, "infinite": dd.infinite, "terms": dd.terms.tolist()}
        rows = [(k, float(t)) for k, t in enumerate(dd.terms)]
        _emit(args, doc, rows, ("k", "|f^(k)| / M_k"))
        return EXIT_OK
    if op == "analytic":
        st = f_analytic_statistic(_sup_norms(args))
        doc = {"stat": st.stat.tolist(), "tail_sup": st.tail_sup.tolist(), "unbounded": st.unbounded}
        rows = [(k + 1, float(a), float(b)) for k, (a, b) in enumerate(zip(st.stat, st.tail_sup))]
        _emit(args, doc, rows, ("k", "(|f^(k)|/k!)^(1/k)", "tail sup"))
        return EXIT_OK
    raise UsageError(f"unknown seq operation {op}")


# --- cohen ------------------------------------------------------------------

def cmd_cohen(args) -> int:
    if args.op == "table":
        alpha = _positive("--alpha", args.alpha)
        if not alpha < 1:
            raise UsageError("--alpha must lie in (0, 1)")
        tab = b_table(alpha, args.K)
        entries = {f"{j},{k}": tab[j, k] for k in range(1, args.K + 1) for j in range(1, k + 1)}
        rows = [(j, k, tab[j, k]) for k in range(1, args.K + 1) for j in range(1, k + 1)]
        _emit(args, {"alpha": alpha, "K": args.K, "B": entries}, rows, ("j", "k", "B[j,k]"))
        return EXIT_OK
    if args.op == "verify":
        alpha = _positive("--alpha", args.alpha)
        if not alpha < 1 / FOUR_E:
            raise UsageError(f"--alpha must lie in (0, 1/(4e)) = (0, {1 / FOUR_E:.6f})")
        rep = verify_cohen_bounds(alpha, args.K)
        doc = {"verdict": "PASS" if rep.ok else "FAIL", "alpha": alpha, "K": args.K,
               "K_est": rep.K_est, "max_B": rep.max_B, "max_sum": rep.max_sum,
               "b_bound_ok": rep.b_bound_ok, "sum_check_ok": rep.sum_check_ok}
        _emit(args, doc, [("PASS" if rep.ok else "FAIL", rep.max_B, rep.max_sum, rep.K_est)],
              ("verdict", "max B", "max sum", "K_est"))
        return EXIT_OK if rep.ok else EXIT_FAIL
    if args.op == "certify":
        s = args.s
        if not (s >= 0 and math.isfinite(s)):
            raise UsageError("--s must be nonnegative")
        M = _sequence(args)
        n = args.n if args.n is not None else M.N - 1
        if not 0 <= n <= M.N - 1:
            raise UsageError(f"--n must lie in [0, {M.N - 1}]")
        try:
            cert = propagate_vanishing_bound(M, s, n, replay_limit=args.replay_limit)
        except InsufficientDivergence as exc:
            print(f"FAIL: {exc}", file=sys.stderr)
            return EXIT_FAIL
        easy = easycase_bound(M, s)
        doc = {"certificate": cert.as_dict(include_grid=args.grid),
               "easy_case": {"best_n": easy.best_n, "bound": easy.bound}}
        rows = [(cert.n, cert.alpha, cert.final_bound, cert.covered_length, cert.replay_ok)]
        _emit(args, doc, rows, ("n", "alpha", "final bound", "covered", "replay ok"))
        return EXIT_OK if cert.replay_ok is not False else EXIT_FAIL
    raise UsageError(f"unknown cohen operation {args.op}")


# --- cheese -----------------------------------------------------------------

def _report_path(out: str) -> FsPath:
    p = FsPath(out)
    return p.with_name(p.stem + ".report.json")


def cmd_cheese_build(args) -> int:
    r, eps, delta = args.r, args.eps, args.delta
    if not 0 < r < 1:
        raise UsageError("--r must lie in (0, 1)")
    _positive("--eps", eps)
    _positive("--delta", delta)
    if args.K < 1:
        raise UsageError("--K must be positive")
    res = build_construction(r, eps, delta, K_probe=args.K, witness=args.witness, check=False)
    doc = ser.cheese_to_dict(res.cheese)
    doc["construction"] = _construction_meta(res)
    report = _stamp(_construction_report(res), args)
    if args.out:
        ser.write_json(doc, args.out, indent=None)
        ser.write_json(report, _report_path(args.out))
    _print_clauses(res.verification)
    return EXIT_OK if res.passed else EXIT_FAIL


def _construction_meta(res: ConstructionResult) -> dict:
    return {"r": res.r, "eps": res.eps, "delta": res.delta, "n0": res.n0,
            "levels_built": res.levels_built, "tail_d_min": res.tail_d_min,
            "K_probe": res.K_probe}


def _construction_report(res: ConstructionResult) -> dict:
    return {
        "verdict": "PASS" if res.passed else "FAIL",
        **_construction_meta(res),
        "holes": len(res.cheese.holes),
        "rho": rho(res.cheese),
        "gamma": res.gamma[:res.levels_built + 8],
        "annuli": [{"label": f"{a.label}_{a.level}", "inner": a.spec.inner_radius,
                    "outer": a.spec.outer_radius, "budget": a.spec.eps,
                    "holes": [a.first_hole, a.stop_hole - 1]} for a in res.annuli],
        "boundary_set": [{"center": [c.real, c.imag], "radius": rad}
                         for c, rad in res.boundary_circles],
        "verification": res.verification,
    }


def _print_clauses(ver: dict) -> None:
    for name, v in ver.items():
        extra = ", ".join(f"{k}={_cell(x)}" for k, x in v.items() if k != "ok")
        print(f"{'PASS' if v['ok'] else 'FAIL'}  {name}  ({extra})")


def cmd_cheese_check(args) -> int:
    cheese = ser.cheese_from_dict(ser.read_json(args.file))
    rep = is_classical(cheese, args.tol)
    doc = {"verdict": "PASS" if rep.is_classical else "FAIL", **rep.as_dict(),
           "rho": rho(cheese), "holes": len(cheese.holes)}
    rows = [(doc["verdict"], rep.worst_containment_margin, rep.worst_separation_margin,
             len(rep.violating_indices))]
    _emit(args, doc, rows, ("verdict", "containment margin", "separation margin", "violations"))
    if not rep.is_classical:
        shown = ", ".join(str(v) for v in rep.violating_indices[:20])
        print(f"violating holes: {shown}", file=sys.stderr)
    return EXIT_OK if rep.is_classical else EXIT_FAIL


def cmd_cheese_render(args) -> int:
    doc = ser.read_json(args.file)
    cheese = ser.cheese_from_dict(doc)
    overlay = []
    r = args.r if args.r is not None else doc.get("construction", {}).get("r")
    if r is not None:
        overlay.append((0j, float(r)))
    svg = cheese_svg(cheese, args.width, overlay, title=FsPath(args.file).name)
    if args.out:
        FsPath(args.out).write_text(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


# --- certify ----------------------------------------------------------------

def cmd_certify(args) -> int:
    doc = ser.read_json(args.cheese)
    cheese = ser.cheese_from_dict(doc)
    meta = doc.get("construction", {})
    r = args.r if args.r is not None else meta.get("r")
    delta = args.delta if args.delta is not None else meta.get("delta", 0.01)
    if r is None:
        raise UsageError("cheese file has no construction block; pass --r")
    f = ser.rational_from_dict(ser.read_json(args.rational))
    try:
        rep = circle_certificate(cheese, float(r), float(delta), f, args.K, args.J)
    except PoleError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = rep.as_dict()
    rows = [(k, e, b, b - e) for k, e, b in rep.display_rows]
    _emit(args, out, rows, ("k", "|f^(k)|_C", "bound", "slack"))
    status = "PASS" if rep.ok else "FAIL"
    flag = " (+inf convention)" if rep.infinite else ""
    print(f"{status}: display bound {'ok' if rep.display_ok else 'violated'}, "
          f"domination {'ok' if rep.domination_ok else 'violated'}, {rep.divergence}{flag}",
          file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_FAIL


# --- paths ------------------------------------------------------------------

def cmd_path(args) -> int:
    path = ser.path_from_dict(ser.read_json(args.file))
    if args.op == "length":
        _emit(args, {"length": length(path)}, [(length(path),)], ("length",))
        return EXIT_OK
    f = ser.rational_from_dict(ser.read_json(args.rational))
    try:
        res = contour_integral(f, path, _positive("--tol", args.tol))
    except QuadratureError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    doc = {"value": [res.value.real, res.value.imag], "error_estimate": res.error_estimate,
           "subdivisions": res.subdivisions}
    _emit(args, doc, [(res.value, res.error_estimate, res.subdivisions)],
          ("value", "error", "subdivisions"))
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("doc", "table", "svg"), default="doc")
    common.add_argument("--reproducible", action="store_true",
                        help="omit timestamps so repeated runs are byte-identical")

    seqopts = _Parser(add_help=False)
    seqopts.add_argument("--family", help="factorial, factorial2, factorial:p, geometric:c, "
                                          "power:nn or constant")
    seqopts.add_argument("--N", type=int, default=100)
    seqopts.add_argument("--values", help="comma-separated M_0,M_1,...")
    seqopts.add_argument("--input", help="sequence document")

    p = _Parser(prog="quasicheese", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    top = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    cheese = top.add_parser("cheese", help="build, check and render cheeses")
    csub = cheese.add_subparsers(dest="op", required=True, parser_class=_Parser)
    b = csub.add_parser("build", parents=[common])
    b.add_argument("--r", type=float, default=0.5)
    b.add_argument("--eps", type=float, default=1.0)
    b.add_argument("--delta", type=float, default=0.01)
    b.add_argument("--K", type=int, default=20, help="largest k probed in the gamma display")
    b.add_argument("--witness", choices=("sampled", "full"), default="sampled")
    b.set_defaults(func=cmd_cheese_build)
    c = csub.add_parser("check", parents=[common])
    c.add_argument("file")
    c.add_argument("--tol", type=float, default=0.0)
    c.set_defaults(func=cmd_cheese_check)
    rnd = csub.add_parser("render", parents=[common])
    rnd.add_argument("file")
    rnd.add_argument("--width", type=int, default=800)
    rnd.add_argument("--r", type=float, help="overlay circle radius")
    rnd.set_defaults(func=cmd_cheese_render)

    seq = top.add_parser("seq", help="sequence diagnostics")
    ssub = seq.add_subparsers(dest="op", required=True, parser_class=_Parser)
    for name in ("minorant", "dc", "algebra", "ddnorm", "analytic"):
        sp = ssub.add_parser(name, parents=[common, seqopts])
        sp.set_defaults(func=cmd_seq)
        if name == "dc":
            sp.add_argument("--up-to", dest="up_to", type=int)
        if name in ("ddnorm", "analytic"):
            sp.add_argument("--sup", help="comma-separated sup norms |f^(k)|")
            sp.add_argument("--rational", help="rational function document")
            sp.add_argument("--r", type=float, default=0.5, help="circle radius for --rational")
            sp.add_argument("--K", type=int, default=40)

    co = top.add_parser("cohen", help="Cohen constants and certificates")
    cosub = co.add_subparsers(dest="op", required=True, parser_class=_Parser)
    for name in ("table", "verify", "certify"):
        sp = cosub.add_parser(name, parents=[common] + ([seqopts] if name == "certify" else []))
        sp.set_defaults(func=cmd_cohen)
        if name != "certify":
            sp.add_argument("--alpha", type=float, required=True)
            sp.add_argument("--K", type=int, default=200 if name == "verify" else 5)
        else:
            sp.add_argument("--s", type=float, default=1.0, help="path length")
            sp.add_argument("--n", type=int, help="order (snapped to a principal index)")
            sp.add_argument("--replay-limit", dest="replay_limit", type=int, default=400)
            sp.add_argument("--grid", action="store_true", help="include the grid points")

    cert = top.add_parser("certify", parents=[common], help="end-to-end circle certificate")
    cert.add_argument("cheese")
    cert.add_argument("rational")
    cert.add_argument("--K", type=int, default=20)
    cert.add_argument("--J", type=int, default=60)
    cert.add_argument("--r", type=float)
    cert.add_argument("--delta", type=float)
    cert.set_defaults(func=cmd_certify)

    pa = top.add_parser("path", help="path length and contour integrals")
    psub = pa.add_subparsers(dest="op", required=True, parser_class=_Parser)
    pl = psub.add_parser("length", parents=[common])
    pl.add_argument("file")
    pl.set_defaults(func=cmd_path)
    pi = psub.add_parser("integrate", parents=[common])
    pi.add_argument("file")
    pi.add_argument("rational")
    pi.add_argument("--tol", type=float, default=1e-10)
    pi.set_defaults(func=cmd_path)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "K", 1) is not None and getattr(args, "K", 1) < 1:
        parser.error("--K must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"quasicheese: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ser.MalformedDocument as exc:
        print(f"quasicheese: malformed input: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"quasicheese: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
