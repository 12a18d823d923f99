"""hodisc command line: genmat / points / tvalue / haar / norm / study.

Reports are JSON, bulk tables CSV; every command that writes an output file
drops a `<out>.manifest.json` sidecar recording the parameter set and
input/output digests.  Floats serialize with 17 significant digits so all
outputs round-trip bit-exactly.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .genmat import build, format_set, parse_set
from .haar import EXACT_COUNT_LIMIT, build_table, format_table_csv, parse_table_csv
from .netquality import is_order_alpha_sequence_prefix, minimal_t
from .norms import l2_parseval, l2_warnock, triebel_bracket
from .points import format_points_csv, parse_points_csv, prefix, write_points_binary
from .studies import evaluate_norm, format_study_csv, scaling_study


def _json(obj, indent: int = 0) -> str:
    """Deterministic JSON with '.17g' floats (stdlib json hides float control)."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  "{k}": {_json(v, indent + 2).lstrip()}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + "  " + _json(v, indent + 2).lstrip() for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, float):
        return format(obj, ".17g")
    if isinstance(obj, int):
        return str(obj)
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    tool_version: str
    subcommand: str
    params: dict
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    wall_time_s: float = 0.0


def _finish(manifest: RunManifest, started: float, out_path: str | None):
    if out_path is None:
        return
    manifest.outputs[out_path] = _digest(out_path)
    manifest.wall_time_s = time.monotonic() - started
    with open(out_path + ".manifest.json", "w") as fh:
        fh.write(_json(asdict(manifest)) + "\n")


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _report_dict(rep) -> dict:
    d = asdict(rep)
    sq = d.pop("value_sq", None)
    if sq is not None:
        d["value_sq"] = f"{sq.numerator}/{sq.denominator}"
    return {k: v for k, v in d.items() if v is not None}


def cmd_genmat(args) -> int:
    started = time.monotonic()
    g = build(args.kind, args.dim, args.cols, args.rows)
    _write(args.out, format_set(g))
    _finish(RunManifest(__version__, "genmat", {
        "kind": args.kind, "dim": args.dim, "cols": args.cols, "rows": g.q_rows,
    }), started, args.out)
    return 0


def cmd_points(args) -> int:
    started = time.monotonic()
    manifest = RunManifest(__version__, "points", {
        "count": args.count, "start": args.start, "format": args.format})
    manifest.inputs[args.genmat] = _digest(args.genmat)
    with open(args.genmat) as fh:
        g = parse_set(fh.read())
    p = prefix(g, args.count, args.start)
    if args.format == "csv":
        _write(args.out, format_points_csv(p))
    else:
        if args.out is None:
            raise ValueError("binary format requires --out")
        with open(args.out, "wb") as fh:
            fh.write(write_points_binary(p))
    _finish(manifest, started, args.out)
    return 0


def cmd_tvalue(args) -> int:
    with open(args.genmat) as fh:
        g = parse_set(fh.read())
    rep = minimal_t(g, args.n, args.alpha)
    out = {"alpha": rep.alpha, "n": rep.n, "d": rep.dim, "t": rep.t,
           "witness": None}
    if rep.witness is not None:
        out["witness"] = {
            "rows_per_coordinate": [list(r) for r in rep.witness.rows_per_coordinate],
            "n_rows": rep.witness.n_rows, "rank": rep.witness.rank,
            "rank_deficit": rep.witness.deficit}
    if args.sequence:
        nmax = args.nmax if args.nmax is not None else args.n
        ok, first_bad = is_order_alpha_sequence_prefix(g, nmax, args.alpha, rep.t)
        out["sequence"] = {"t": rep.t, "n_max": nmax, "ok": ok,
                           "first_failing_n": first_bad}
    sys.stdout.write(_json(out) + "\n")
    return 0


def cmd_haar(args) -> int:
    started = time.monotonic()
    manifest = RunManifest(__version__, "haar", {"box_limit": args.box_limit})
    manifest.inputs[args.points] = _digest(args.points)
    with open(args.points) as fh:
        p = parse_points_csv(fh.read())
    if p.count > 4 * EXACT_COUNT_LIMIT:
        raise ValueError(
            f"haar CSV export is exact-rational; {p.count} points exceeds the "
            f"{4 * EXACT_COUNT_LIMIT} cap (use the library float track for studies)")
    t = build_table(p.trimmed(), box_limit=args.box_limit, exact=True)
    _write(args.out, format_table_csv(t))
    _finish(manifest, started, args.out)
    return 0


def cmd_norm(args) -> int:
    started = time.monotonic()
    manifest = RunManifest(__version__, "norm", {
        "kind": args.kind, "method": args.method, "p": args.p, "q": args.q,
        "s": args.s, "beta": args.beta, "depth": args.depth,
        "resolution": args.resolution})
    manifest.inputs[args.points] = _digest(args.points)
    with open(args.points) as fh:
        p = parse_points_csv(fh.read()).trimmed()
    table = None
    if args.haar is not None:
        manifest.inputs[args.haar] = _digest(args.haar)
        with open(args.haar) as fh:
            table = parse_table_csv(fh.read())
    if args.kind == "l2" and args.method == "parseval":
        rep = l2_parseval(table if table is not None else build_table(p))
    elif args.kind == "l2":
        rep = l2_warnock(p)
    elif args.kind == "triebel":
        if args.p is None or args.q is None or args.s is None:
            raise ValueError("triebel needs --p, --q and --s")
        lo, hi = triebel_bracket(table if table is not None else build_table(p, exact=False),
                                 args.p, args.q, args.s)
        sys.stdout.write(_json({"lower": _report_dict(lo), "upper": _report_dict(hi)}) + "\n")
        _append_norm_csv(args, lo)
        _append_norm_csv(args, hi)
        return 0
    else:
        rep = evaluate_norm(p, args.kind, pp=args.p, q=args.q, s=args.s,
                            beta=args.beta, depth=args.depth,
                            resolution=args.resolution, table=table)
    out_text = _json(_report_dict(rep)) + "\n"
    _write(args.out, out_text)
    _append_norm_csv(args, rep)
    _finish(manifest, started, args.out)
    return 0


def _append_norm_csv(args, rep) -> None:
    if args.emit_csv is None:
        return
    fresh = not os.path.exists(args.emit_csv)
    with open(args.emit_csv, "a") as fh:
        if fresh:
            fh.write("N,d,kind,p,q,s,beta,value,tail,method\n")
        row = [rep.n_points, rep.dim, rep.kind,
               rep.p if rep.p is not None else "",
               rep.q if rep.q is not None else "",
               rep.s if rep.s is not None else "",
               rep.beta if rep.beta is not None else "",
               format(rep.value, ".17g"),
               format(rep.tail_value, ".17g") if rep.tail_value is not None else "",
               rep.method]
        fh.write(",".join(str(v) for v in row) + "\n")


def cmd_study(args) -> int:
    started = time.monotonic()
    manifest = RunManifest(__version__, "study", {
        "norm": args.norm, "nmin": args.nmin, "nmax": args.nmax, "p": args.p,
        "q": args.q, "s": args.s, "beta": args.beta, "depth": args.depth,
        "resolution": args.resolution, "threads": args.threads})
    manifest.inputs[args.genmat] = _digest(args.genmat)
    with open(args.genmat) as fh:
        g = parse_set(fh.read())
    n_list = [1 << e for e in range(args.nmin, args.nmax + 1)]
    if args.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        def one(n):
            return scaling_study(g, args.norm, [n], pp=args.p, q=args.q, s=args.s,
                                 beta=args.beta, depth=args.depth,
                                 resolution=args.resolution)[0]

        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(one, n_list))  # submit order keeps N ordering
    else:
        rows = scaling_study(g, args.norm, n_list, pp=args.p, q=args.q, s=args.s,
                             beta=args.beta, depth=args.depth,
                             resolution=args.resolution)
    _write(args.out, format_study_csv(rows))
    _finish(manifest, started, args.out)
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hodisc",
                                 description="digital sequences over GF(2) and "
                                             "Haar-based discrepancy norms")
    default_threads = int(os.environ.get("HODISC_THREADS", "1"))
    ap.add_argument("--threads", type=int, default=default_threads,
                    help="worker thread cap (env HODISC_THREADS)")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    g = sub.add_parser("genmat", help="construct generating matrices")
    g.add_argument("--kind", required=True,
                   choices=["identity", "tezuka", "tezuka-interlaced"])
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--cols", type=int, required=True)
    g.add_argument("--rows", type=int, default=None)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_genmat)

    p = sub.add_parser("points", help="generate sequence points")
    p.add_argument("--genmat", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--format", choices=["csv", "binary"], default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_points)

    t = sub.add_parser("tvalue", help="minimal quality parameter")
    t.add_argument("--genmat", required=True)
    t.add_argument("--alpha", type=int, choices=[1, 2], required=True)
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--sequence", action="store_true")
    t.add_argument("--nmax", type=int, default=None)
    t.set_defaults(fn=cmd_tvalue)

    h = sub.add_parser("haar", help="exact coefficient table CSV")
    h.add_argument("--points", required=True)
    h.add_argument("--box-limit", dest="box_limit", type=int, default=None)
    h.add_argument("--out", required=True)
    h.set_defaults(fn=cmd_haar)

    n = sub.add_parser("norm", help="evaluate a discrepancy norm")
    n.add_argument("--points", required=True)
    n.add_argument("--haar", default=None)
    n.add_argument("--kind", required=True,
                   choices=["l2", "lp", "star", "bmo", "d0", "besov", "triebel", "orlicz"])
    n.add_argument("--method", choices=["warnock", "parseval"], default="warnock")
    n.add_argument("--p", type=float, default=None)
    n.add_argument("--q", type=float, default=None)
    n.add_argument("--s", type=float, default=None)
    n.add_argument("--beta", type=float, default=None)
    n.add_argument("--depth", type=int, default=4)
    n.add_argument("--resolution", type=int, default=128)
    n.add_argument("--out", default=None)
    n.add_argument("--emit-csv", dest="emit_csv", default=None)
    n.set_defaults(fn=cmd_norm)

    s = sub.add_parser("study", help="rate table over prefix sizes 2^nmin..2^nmax")
    s.add_argument("--genmat", required=True)
    s.add_argument("--norm", required=True,
                   choices=["l2", "lp", "star", "bmo", "d0", "besov", "orlicz"])
    s.add_argument("--nmin", type=int, default=4)
    s.add_argument("--nmax", type=int, default=12)
    s.add_argument("--p", type=float, default=None)
    s.add_argument("--q", type=float, default=None)
    s.add_argument("--s", type=float, default=None)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--resolution", type=int, default=64)
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_study)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"hodisc: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"hodisc: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
