"""Command-line interface.

Results go to stdout as JSON (default) or CSV; errors go to stderr.  Exit
status is 0 on success, 1 for domain errors and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import analysis, density, dynamics, extensions, random_graphs
from .errors import PercolabError, ValidationError
from .graph import Graph, edge, format_rational, parse_rational, to_edge_list
from .patterns import BUILTIN_HELP, load_graph


def _q(x: Fraction) -> dict:
    return {"value": format_rational(x), "float": float(x)}


def _num(x) -> str | float | None:
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _pattern(args) -> Graph:
    if getattr(args, "pattern_file", None):
        return load_graph(args.pattern_file, args.graph_format)
    return load_graph(args.H)


def _graph(spec: str, fmt: str | None) -> Graph:
    return load_graph(spec, fmt)


def _edge_arg(text: str) -> tuple[int, int]:
    try:
        u, v = (int(x) for x in text.replace(" ", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"edge must look like u,v (got {text!r})")
    return edge(u, v)


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except PercolabError as exc:
        raise argparse.ArgumentTypeError(str(exc))


# ---------------------------------------------------------------------------
# commands


def cmd_density(args) -> dict:
    H = density.strip_isolated(_pattern(args), "density")
    out: dict = {"pattern": args.H, "v": H.n, "e": H.m}
    if H.n >= 3:
        lm = density.lam(H)
        ls = density.lambda_star(H)
        m2 = density.two_density(H)
        out.update(
            {
                "lambda": format_rational(lm),
                "lambda_float": float(lm),
                "lambda_star": format_rational(ls),
                "lambda_star_float": float(ls),
                "m2": format_rational(m2),
                "m2_float": float(m2),
            }
        )
    if H.n >= 4:
        out["balanced"] = density.is_balanced(H).value
    if any(H.degree(v) == 1 for v in H.vertices):
        b, fam = density.beta(H)
        out["beta"] = format_rational(b)
        out["beta_float"] = float(b)
        out["beta_family"] = [[list(x) for x in F.edges()] for F in fam]
    return out


def _cert_json(H: Graph, cert: analysis.RhoCertificate) -> dict:
    return {**cert.to_json(), "H": [list(x) for x in H.edges()], "H_vertices": list(H.vertices)}


def cmd_rho(args) -> dict:
    H = _pattern(args)
    out: dict = {"pattern": args.H}
    ex = analysis.rho_exact_special(H)
    if ex is not None and not args.certificate:
        val, reason = ex
        out["exact"] = {"value": _num(val), "float": float(val), "reason": reason}
        return out
    out["exact"] = None if ex is None else {"value": _num(ex[0]), "float": float(ex[0]), "reason": ex[1]}
    cert = analysis.rho_upper_bound(H, args.budget, args.max_vertices)
    out["certificate"] = _cert_json(H, cert)
    return out


def cmd_close(args) -> dict:
    H = _pattern(args)
    G = _graph(args.G, args.graph_format)
    tr = dynamics.closure(H, G)
    out = {"pattern": args.H, **tr.to_json()}
    if args.final_edges:
        out["final"] = [list(x) for x in tr.final.edges()]
    return out


def cmd_witness(args) -> dict:
    H = _pattern(args)
    G = _graph(args.G, args.graph_format)
    wga = dynamics.WGA(H, G)
    rec = wga.record(args.edge)
    if args.rho is not None and not wga.is_black(rec.e):
        rec.F = dynamics.dense_part(H, G, rec.e, args.rho, wga=wga).F
    return {"pattern": args.H, **rec.to_json()}


def _load_certificate(path: str) -> tuple[Graph, analysis.RhoCertificate]:
    with open(path) as fh:
        data = json.load(fh)
    if "certificate" in data:
        data = data["certificate"]
    if "H" not in data:
        raise ValidationError("certificate file must carry the pattern edges under 'H'")
    H = Graph(data.get("H_vertices") or {x for ed in data["H"] for x in ed}, [tuple(x) for x in data["H"]])
    return H, analysis.RhoCertificate.from_json(data)


def cmd_core(args) -> dict:
    H, cert = _load_certificate(args.certificate)
    wga = dynamics.WGA(H, cert.A.with_edges([], cert.e))
    red = sorted(wga.R(cert.e), key=lambda f: (wga.round[f], f))
    rows = []
    for f in red:
        res = analysis.alpha_core(f, wga.W(f), args.alpha)
        sparse, _ = analysis.is_alpha_sparse(res.core, wga.W(f).with_edges([], res.core.vertices), args.alpha)
        rows.append({**res.to_json(), "round": wga.round[f], "v_W": wga.W(f).n, "core_sparse_in_W": sparse})
    M = analysis.modified_core(cert.e, wga, args.alpha)
    return {
        "e": list(cert.e),
        "alpha": format_rational(args.alpha),
        "bound": format_rational(cert.bound),
        "cores": rows,
        "modified_core": {"vertices": list(M.vertices), "edges": [list(x) for x in M.edges()], "v": M.n},
        "max_core_vertices": max(r["v_core"] for r in rows) if rows else 2,
    }


def cmd_ladder(args) -> dict:
    H = _pattern(args)
    shared = args.shared or H.edges()[0]
    cert = analysis.ladder(H, shared, args.height)
    return {"pattern": args.H, "certificate": _cert_json(H, cert), "v": cert.A.n, "e_L": cert.A.m}


def cmd_pc(args) -> dict | list:
    H = _pattern(args)
    rows = []
    for n in args.n:
        est = random_graphs.estimate_pc(H, n, args.trials, args.tol, args.seed, not args.no_coupling, args.threads)
        row = {"pattern": args.H, **est.to_json()}
        if args.rho is not None:
            row["scaled"] = est.p_hat * n ** (1 / float(args.rho))
        rows.append(row)
    return {"rows": rows, "seed": args.seed}


def cmd_peps(args) -> dict:
    H = _pattern(args)
    rows = []
    for n in args.n:
        est = random_graphs.estimate_p_eps(H, n, args.eps, args.trials, args.seed, args.tol, not args.no_coupling, args.threads)
        rows.append({"pattern": args.H, **est.to_json()})
    return {"rows": rows, "seed": args.seed}


def cmd_sharpness(args) -> dict:
    H = _pattern(args)
    rows = random_graphs.sharpness_report(H, args.n, args.eps, args.trials, args.seed, args.tol, args.threads)
    return {"pattern": args.H, "rows": rows, "seed": args.seed}


def cmd_lower_bound(args) -> dict:
    H = _pattern(args)
    rows = [random_graphs.lower_bound_experiment(H, args.rho, n, args.eps_param, args.trials, args.seed, args.threads) for n in args.n]
    return {"pattern": args.H, "rows": rows, "seed": args.seed, "log": "natural"}


def cmd_hitting(args) -> dict:
    H = _pattern(args)
    rows = [random_graphs.hitting_coincidence(H, n, args.trials, args.mode, args.seed, args.threads) for n in args.n]
    return {"pattern": args.H, "rows": rows, "seed": args.seed}


def cmd_fold(args) -> dict:
    if args.certificate:
        H, cert = _load_certificate(args.certificate)
    else:
        H = _pattern(args)
        cert = analysis.ladder(H, H.edges()[0], args.height)
    rho = args.rho
    if rho is None:
        ex = analysis.rho_exact_special(H)
        rho = ex[0] if ex is not None and isinstance(ex[0], Fraction) else cert.bound
    alpha = args.alpha if args.alpha is not None else extensions.default_alpha(rho, args.n)
    plan = extensions.prepare_fold(H, cert, alpha)
    out = {"rho": format_rational(Fraction(rho)), "slack": format_rational(cert.bound - Fraction(rho)), **plan.summary()}
    if args.complete_host:
        host = Graph(range(args.n), [(u, v) for u in range(args.n) for v in range(u + 1, args.n) if (u, v) != (0, 1)])
        rep = extensions.fold_activate(plan, (0, 1), host, args.max_copies)
        out["rows"] = [{**rep.to_json(), "verified": rep.verified}]
        out["success_rate"] = 1.0 if rep.success else 0.0
        return out
    p = args.p
    if p is None:
        p = extensions.fold_regime_p(Fraction(rho), args.n, args.A)
    clipped = p > 1
    p = min(p, 1.0)
    res = extensions.fold_experiment(H, plan, args.n, p, args.trials, args.seed, args.max_copies)
    out.update({"A": args.A, "clipped": clipped, **res})
    return out


def cmd_wsat(args) -> dict:
    G = dynamics.wsat_bollobas(args.n, args.r)
    out = {"r": args.r, "n": args.n, "edges": G.m, "formula": dynamics.wsat_formula(args.n, args.r)}
    if args.verify:
        from .graph import complete_graph

        out["percolates"] = dynamics.percolates(complete_graph(args.r), G)
    if args.emit:
        out["edge_list"] = to_edge_list(G)
    return out


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="percolab", description="H-bootstrap percolation toolkit")
    ap.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    ap.add_argument("--threads", type=int, default=None, help="worker processes (default: $PERCOLAB_THREADS or all cores)")
    sub = ap.add_subparsers(dest="command", required=True)

    def pattern_cmd(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("H", nargs="?", default=None, help=f"pattern: {BUILTIN_HELP}, a file, or graph6")
        p.add_argument("--pattern-file", default=None, help="read the pattern from a file (overrides H)")
        p.add_argument("--graph-format", choices=("graph6", "edge-list"), default=None)
        p.set_defaults(fn=fn)
        return p

    def stochastic(p, trials=100):
        p.add_argument("-n", type=int, nargs="+", required=True)
        p.add_argument("--trials", type=int, default=trials)
        p.add_argument("--seed", type=int, default=0)

    pattern_cmd("density", cmd_density, "lambda, lambda_*, m2, balance class, beta")
    p = pattern_cmd("rho", cmd_rho, "exact rho(H) for special classes, else a certified upper bound")
    p.add_argument("--budget", type=int, default=4, help="max copies / gadget scale")
    p.add_argument("--max-vertices", type=int, default=density.MAX_FREE_VERTICES + 2)
    p.add_argument("--certificate", action="store_true", help="always search for a certificate")
    p = pattern_cmd("close", cmd_close, "closure <G>_H with per-round edges")
    p.add_argument("G")
    p.add_argument("--final-edges", action="store_true")
    p = pattern_cmd("witness", cmd_witness, "witness graph and red edges for one edge")
    p.add_argument("G")
    p.add_argument("--edge", type=_edge_arg, required=True)
    p.add_argument("--rho", type=_rational_arg, default=None, help="also compute the dense part at this density")
    p = sub.add_parser("core", help="alpha-cores along a certificate's witness structure")
    p.add_argument("certificate", help="certificate JSON (from rho/ladder)")
    p.add_argument("--alpha", type=_rational_arg, required=True)
    p.set_defaults(fn=cmd_core)
    p = pattern_cmd("ladder", cmd_ladder, "H-ladder certificate")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--shared", type=_edge_arg, default=None)
    p = pattern_cmd("pc", cmd_pc, "estimate p_c by bisection")
    stochastic(p)
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--no-coupling", action="store_true")
    p.add_argument("--rho", type=_rational_arg, default=None, help="add p_hat * n^(1/rho)")
    p = pattern_cmd("peps", cmd_peps, "estimate p_eps by bisection")
    stochastic(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--no-coupling", action="store_true")
    p = pattern_cmd("sharpness", cmd_sharpness, "(p_{1-eps} - p_eps) / p_c over n")
    stochastic(p)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--tol", type=float, default=0.02)
    p = pattern_cmd("lower-bound", cmd_lower_bound, "non-percolation frequency at the lower-bound p")
    stochastic(p, 20)
    p.add_argument("--rho", type=_rational_arg, required=True)
    p.add_argument("--eps-param", type=float, default=0.01)
    p = pattern_cmd("hitting", cmd_hitting, "hitting-time coincidence on random graph processes")
    stochastic(p, 50)
    p.add_argument("--mode", choices=("leaf-family", "connectivity"), required=True)
    p = pattern_cmd("fold", cmd_fold, "fold embedding of a certificate into random hosts")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--certificate", default=None, help="certificate JSON (default: ladder of --height)")
    p.add_argument("--height", type=int, default=3)
    p.add_argument("--rho", type=_rational_arg, default=None)
    p.add_argument("--alpha", type=_rational_arg, default=None)
    p.add_argument("--A", type=float, default=0.5, help="constant in n p^rho = A log^(2+2/b) n")
    p.add_argument("--p", type=float, default=None, help="override the host edge probability")
    p.add_argument("--max-copies", type=int, default=100_000)
    p.add_argument("--complete-host", action="store_true", help="run once on K_n minus the edge 01")
    p = sub.add_parser("wsat", help="r-Bollobas weakly saturated graph")
    p.add_argument("-r", type=int, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--verify", action="store_true")
    p.add_argument("--emit", action="store_true", help="include the edge list")
    p.set_defaults(fn=cmd_wsat)
    return ap


def _csv(result) -> str:
    rows = result.get("rows") if isinstance(result, dict) else None
    if rows is None:
        rows = [result]
    keys: list[str] = []
    for r in rows:
        for k, v in r.items():
            if k not in keys and not isinstance(v, (list, dict)):
                keys.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k) for k in keys})
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    has_cert = isinstance(getattr(args, "certificate", None), str)
    if getattr(args, "H", "x") is None and not getattr(args, "pattern_file", None) and not has_cert:
        parser.error(f"{args.command}: a pattern H or --pattern-file is required")
    if getattr(args, "pattern_file", None) and args.H is None:
        args.H = args.pattern_file
    try:
        result = args.fn(args)
    except PercolabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.format == "csv":
        sys.stdout.write(_csv(result))
    else:
        sys.stdout.write(json.dumps(result, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
