"""Command line surface: generate | color | verify | bench.

Exit codes: 0 success, 2 not 3-colorable, 3 verification rejection,
4 I/O or parse failure.  All randomness flows from explicit seeds and
every output except timing fields is byte-reproducible.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from .baselines import (
    greedy_color,
    neighborhood_extraction_color,
    pipeline_color,
    seek_only_color,
)
from .dimacs import ParseError, emit_coloring, emit_dimacs, parse_coloring, parse_dimacs
from .generate import GenParams, MinDegreeUnreachable, generate_planted
from .graph import Graph, is_proper_coloring
from .oracle import verify_claim_dict
from .params import Params, parse_param_overrides
from .search import seek_progress
from .structure import Not3Colorable

EXIT_OK = 0
EXIT_NOT3COLORABLE = 2
EXIT_REJECTED = 3
EXIT_IO = 4


def _load_graph(path: str) -> Graph:
    return parse_dimacs(Path(path).read_text())


def _load_params(args, graph: Graph) -> Params:
    overrides = {}
    if getattr(args, "params", None):
        overrides = parse_param_overrides(Path(args.params).read_text())
    if getattr(args, "no_side_cuts", False):
        overrides["side_cuts"] = False
    if getattr(args, "oracle_cap", None) is not None:
        overrides["oracle_cap"] = args.oracle_cap
    k = overrides.pop("k", None)
    nhat = overrides.pop("nhat", None)
    p = Params.for_graph(graph.n, max(graph.min_degree(), 1), k=k, **overrides)
    if nhat is not None:
        p = p.with_overrides(nhat=nhat)
    return p


def _write_trace(path: str, events: list) -> None:
    with open(path, "w") as fh:
        for entry in events:
            fh.write(json.dumps(entry, sort_keys=True))
            fh.write("\n")


def cmd_generate(args) -> int:
    balance = tuple(float(x) for x in args.balance.split(","))
    total = sum(balance)
    if total <= 0:
        print("error: class balance must have positive total", file=sys.stderr)
        return EXIT_IO
    balance = tuple(w / total for w in balance)
    try:
        params = GenParams(
            n=args.n,
            class_balance=balance,  # normalized weights
            edge_prob=args.p,
            min_degree_target=args.min_degree_target,
            seed=args.seed,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        graph, coloring = generate_planted(params)
    except MinDegreeUnreachable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    col_path = prefix.with_suffix(".col")
    sol_path = prefix.with_suffix(".sol")
    meta_path = prefix.with_suffix(".json")
    col_path.write_text(emit_dimacs(graph))
    sol_path.write_text(emit_coloring(coloring))
    meta = {
        "n": graph.n,
        "m": graph.m,
        "edge_prob": args.p,
        "class_balance": list(balance),
        "seed": args.seed,
        "min_degree": graph.min_degree(),
        "max_degree": graph.max_degree(),
        "min_degree_target": args.min_degree_target,
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {col_path} {sol_path} {meta_path}")
    return EXIT_OK


def _run_method(method: str, graph: Graph, p: Params, trace, claim_log):
    if method == "greedy":
        coloring = greedy_color(graph)
        return coloring, {"method": "greedy", "colors": coloring.palette_size}
    if method == "extract":
        coloring, rep = neighborhood_extraction_color(graph)
        return coloring, {
            "method": "extract",
            "colors": rep.colors_used,
            "extractions": rep.extractions,
            "threshold": rep.threshold,
        }
    if method == "seek":
        coloring, rep = seek_only_color(graph, p, trace=trace, claim_log=claim_log)
    elif method == "pipeline":
        coloring, rep = pipeline_color(graph, p, trace=trace, claim_log=claim_log)
    else:
        raise ValueError(f"unknown method {method!r}")
    info = {
        "method": rep.method,
        "colors": rep.colors_used,
        "seek_calls": rep.seek_calls,
        "seek_progress_found": rep.seek_progress_found,
        "seek_failures": rep.seek_failures,
        "mechanisms": {
            "contractions": rep.stats.contractions,
            "type1_batches": rep.stats.type1_batches,
            "type2_batches": rep.stats.type2_batches,
            "deferred": rep.stats.deferred,
            "phases": rep.stats.phases,
        },
        "rounds_audited": len(rep.audits),
        "audits": [a.to_dict() for a in rep.audits],
    }
    return coloring, info


def cmd_color(args) -> int:
    try:
        graph = _load_graph(args.input)
        p = _load_params(args, graph)
    except (OSError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    trace: list | None = [] if args.trace else None
    started = time.perf_counter()
    try:
        coloring, info = _run_method(args.method, graph, p, trace, None)
    except Not3Colorable as exc:
        elapsed = time.perf_counter() - started
        report = {
            "method": args.method,
            "n": graph.n,
            "m": graph.m,
            "not3colorable": True,
            "witness": {"hub": exc.hub, "cycle": list(exc.cycle)},
            "runtime_s": elapsed,
        }
        if args.report:
            Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        if args.trace and trace is not None:
            _write_trace(args.trace, trace)
        print(f"not 3-colorable: odd cycle of length {len(exc.cycle)} in N({exc.hub})")
        return EXIT_NOT3COLORABLE
    elapsed = time.perf_counter() - started
    ok, edge = is_proper_coloring(graph, coloring)
    if not ok:
        print(f"internal error: improper coloring at edge {edge}", file=sys.stderr)
        return 1
    if args.output:
        Path(args.output).write_text(emit_coloring(coloring))
    if args.trace and trace is not None:
        _write_trace(args.trace, trace)
    report = {
        "n": graph.n,
        "m": graph.m,
        "proper": True,
        "not3colorable": False,
        "runtime_s": elapsed,
    }
    report.update(info)
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"colored with {coloring.palette_size} colors ({args.method})")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        graph = _load_graph(args.input)
        payload = json.loads(Path(args.claims).read_text())
    except (OSError, ParseError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if isinstance(payload, list):
        claims = payload
        k = args.k
    else:
        claims = payload.get("claims", [])
        k = payload.get("k", args.k)
    cap = args.oracle_cap if args.oracle_cap is not None else 25
    verdicts = []
    all_ok = True
    for idx, entry in enumerate(claims):
        verdict = verify_claim_dict(graph, entry, k, cap=cap)
        verdicts.append({
            "index": idx,
            "type": entry.get("type"),
            "verified": verdict.verified,
            "reasons": verdict.reasons,
        })
        all_ok = all_ok and verdict.verified
    out = json.dumps(verdicts, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(out)
    else:
        print(out, end="")
    return EXIT_OK if all_ok else EXIT_REJECTED


BENCH_COLUMNS = [
    "method",
    "family",
    "n",
    "edge_prob",
    "seed",
    "colors",
    "proper",
    "outcome",
    "rounds",
    "seek_calls",
    "pass_rate_y_floor",
    "pass_rate_y_sqrt_cap",
    "pass_rate_y_round_cap",
    "y1_ratio_side",
    "y1_ratio_noside",
]


def _flag_rate(audit_dicts, flag: str) -> str:
    if not audit_dicts:
        return ""
    hits = sum(1 for a in audit_dicts if a[f"flag_{flag}"])
    return f"{hits / len(audit_dicts):.6f}"


# configurations tried in order until one completes a first round;
# raising both scales blocks the early large-set exit so cuts get exercised
ABLATION_LADDER = [(None, 1.0), (3.0, 2.0), (2.3, 1.5), (2.6, 2.0), (2.0, 2.0)]


def _ablation_ratios(graph: Graph) -> tuple[str, str]:
    """Round-1 |Y|/|T| with and without side cuts, same configuration."""
    for k, scale in ABLATION_LADDER:
        ratios = []
        for side_cuts in (True, False):
            p = Params.for_graph(graph.n, max(graph.min_degree(), 1),
                                 k=k, c1=scale, c2=scale, side_cuts=side_cuts)
            try:
                outcome = seek_progress(graph, p=p)
            except Not3Colorable:
                return "", ""
            first = [a for a in outcome.audits if a.j == 1]
            if not first or not first[0].size_T:
                break
            ratios.append(f"{first[0].size_Y / first[0].size_T:.6f}")
        if len(ratios) == 2:
            return ratios[0], ratios[1]
    return "", ""


def cmd_bench(args) -> int:
    sizes = [int(x) for x in args.sizes.split(",")]
    densities = [float(x) for x in args.densities.split(",")]
    methods = args.methods.split(",")
    seeds = list(range(args.seeds))
    rows = []
    timings = []
    ablation_pairs = []
    for n in sizes:
        for prob in densities:
            family = f"planted-n{n}-p{prob}"
            for seed in seeds:
                graph, _ = generate_planted(
                    GenParams(n=n, edge_prob=prob, seed=seed)
                )
                ratio_side, ratio_noside = (
                    _ablation_ratios(graph) if args.ablation else ("", "")
                )
                if ratio_side and ratio_noside:
                    ablation_pairs.append((float(ratio_side), float(ratio_noside)))
                for method in methods:
                    row = {c: "" for c in BENCH_COLUMNS}
                    row.update({
                        "method": method,
                        "family": family,
                        "n": n,
                        "edge_prob": prob,
                        "seed": seed,
                        "y1_ratio_side": ratio_side,
                        "y1_ratio_noside": ratio_noside,
                    })
                    started = time.perf_counter()
                    try:
                        p = Params.for_graph(graph.n, max(graph.min_degree(), 1))
                        coloring, info = _run_method(method, graph, p, None, None)
                        ok, _ = is_proper_coloring(graph, coloring)
                        row["colors"] = coloring.palette_size
                        row["proper"] = ok
                        row["outcome"] = "colored"
                        row["seek_calls"] = info.get("seek_calls", "")
                        audits = info.get("audits")
                        if audits is not None:
                            row["rounds"] = len(audits)
                            row["pass_rate_y_floor"] = _flag_rate(audits, "y_size_floor")
                            row["pass_rate_y_sqrt_cap"] = _flag_rate(audits, "y_sqrt_cap")
                            row["pass_rate_y_round_cap"] = _flag_rate(audits, "y_round_cap")
                    except Not3Colorable:
                        row["outcome"] = "not3colorable"
                    except Exception as exc:  # partial results still flush
                        row["outcome"] = f"error:{type(exc).__name__}"
                    timings.append({
                        "method": method,
                        "family": family,
                        "seed": seed,
                        "runtime_s": time.perf_counter() - started,
                    })
                    rows.append(row)
    rows.sort(key=lambda r: (r["method"], r["family"], r["seed"]))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    Path(args.out_csv).write_text(buf.getvalue())
    summary = {
        "rows": len(rows),
        "methods": methods,
        "sizes": sizes,
        "densities": densities,
        "seeds": args.seeds,
        "ablation": {
            "instances": len(ablation_pairs),
            "mean_y1_ratio_side": (
                sum(a for a, _ in ablation_pairs) / len(ablation_pairs)
                if ablation_pairs else None
            ),
            "mean_y1_ratio_noside": (
                sum(b for _, b in ablation_pairs) / len(ablation_pairs)
                if ablation_pairs else None
            ),
        },
        "timings": timings,
    }
    Path(args.out_json).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(rows)} rows to {args.out_csv}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="threecolor",
        description="Combinatorial coloring of 3-colorable graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a planted instance")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, default=0.5)
    gen.add_argument("--balance", default="1,1,1",
                     help="three class weights, normalized")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--min-degree-target", type=int, default=None)
    gen.add_argument("--out", required=True, help="output path prefix")
    gen.set_defaults(func=cmd_generate)

    col = sub.add_parser("color", help="color a DIMACS graph")
    col.add_argument("--in", dest="input", required=True)
    col.add_argument("--out", dest="output", default=None)
    col.add_argument("--report", default=None)
    col.add_argument("--method", default="pipeline",
                     choices=["pipeline", "greedy", "extract", "seek"])
    col.add_argument("--params", default=None, help="JSON parameter overrides")
    col.add_argument("--no-side-cuts", action="store_true")
    col.add_argument("--trace", default=None, help="JSONL trace output path")
    col.add_argument("--oracle-cap", type=int, default=None)
    col.add_argument("--seed", type=int, default=0)
    col.set_defaults(func=cmd_color)

    ver = sub.add_parser("verify", help="verify a claims file")
    ver.add_argument("--in", dest="input", required=True)
    ver.add_argument("--claims", required=True)
    ver.add_argument("--out", dest="output", default=None)
    ver.add_argument("--k", type=float, default=None)
    ver.add_argument("--oracle-cap", type=int, default=None)
    ver.set_defaults(func=cmd_verify)

    ben = sub.add_parser("bench", help="run a method/instance/seed matrix")
    ben.add_argument("--sizes", default="500,1000,2000")
    ben.add_argument("--densities", default="0.5")
    ben.add_argument("--seeds", type=int, default=3)
    ben.add_argument("--methods", default="greedy,extract,pipeline")
    ben.add_argument("--ablation", action="store_true",
                     help="also record round-1 cut ratios with and without side cuts")
    ben.add_argument("--out-csv", required=True)
    ben.add_argument("--out-json", required=True)
    ben.add_argument("--seed", type=int, default=0)
    ben.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
