"""Command-line front end.

Commands: analyze, schur, semigroup, rota, grothendieck, zoo, selftest.
Exit codes: 0 success, 1 requested verdict absent, 2 input error,
3 internal or search failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


from . import __version__, acceptance, zoo
from .analyze import (
    DEFAULT_SCAN_TIMES,
    analyze_channel,
    analyze_frame,
    analyze_generator,
    analyze_schur,
)
from .grothendieck import cb_lower_bound, frame_l4, frame_m3
from .numerics import (
    DimensionError,
    ResourceLimitError,
    SearchFailureError,
    Tolerances,
)
from .rota import build_counterexample
from .semigroup import cnd_check
from .serialize import (
    channel_from_json,
    channel_to_json,
    frame_from_json,
    generator_from_json,
    jsonable,
    schur_from_json,
)

EXIT_OK = 0
EXIT_VERDICT_ABSENT = 1
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL = 3

FRAME_ALIASES = {
    "m3": frame_m3,
    "l4": frame_l4,
    "t1": frame_m3,
    "t2": frame_l4,
}


def _common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--tol-rank", type=float, default=1e-9,
                        help="relative Gram-eigenvalue rank cutoff")
    parser.add_argument("--tol-abs", type=float, default=1e-10,
                        help="absolute verification tolerance")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    parser.add_argument("--json", metavar="PATH", default=None,
                        help="write the full JSON report to PATH ('-' for stdout)")


def _tolerances(args) -> Tolerances:
    return Tolerances(rank_rel=args.tol_rank, verify_abs=args.tol_abs)


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(args, report: dict):
    payload = json.dumps(jsonable(report), indent=2)
    if args.json == "-":
        print(payload)
    elif args.json:
        Path(args.json).write_text(payload + "\n", encoding="utf-8")
    for line in report.get("summary", []):
        print(line)


def _resolve_input(ref: str, tol: Tolerances, force_schur: bool):
    """Turn a zoo reference or a JSON path into (kind, object)."""
    if ref.startswith("zoo:"):
        entry, obj = zoo.build(ref)
        return entry.kind, obj
    obj = _load_json(ref)
    if force_schur or ("b" in obj and "n" in obj):
        return "schur", schur_from_json(obj)
    if "L" in obj:
        return "generator", generator_from_json(obj, tol)
    if "frame" in obj:
        return "frame", frame_from_json(obj, tol)
    return "channel", channel_from_json(obj, tol)


def _analyze_any(kind: str, obj, args, tol: Tolerances) -> dict:
    if kind == "channel":
        return analyze_channel(obj, tol, include_witness=bool(args.json))
    if kind == "schur":
        return analyze_schur(obj, tol, include_witness=bool(args.json))
    if kind == "generator":
        return analyze_generator(obj, tol)
    if kind == "frame":
        return analyze_frame(obj, tol, seed=args.seed)
    raise ValueError(f"cannot analyze object of kind {kind!r}")


def cmd_analyze(args) -> int:
    tol = _tolerances(args)
    kind, obj = _resolve_input(args.input, tol, force_schur=args.schur)
    report = _analyze_any(kind, obj, args, tol)
    report["input"] = args.input
    _emit(args, report)
    if args.expect:
        got = {c["verdict"] for c in report.get("certificates", [])}
        if args.expect not in got:
            print(f"expected verdict {args.expect} absent (found: {sorted(got) or 'none'})")
            return EXIT_VERDICT_ABSENT
    return EXIT_OK


def cmd_schur(args) -> int:
    args.schur = True
    return cmd_analyze(args)


def cmd_semigroup(args) -> int:
    tol = _tolerances(args)
    if args.generator.startswith("zoo:"):
        entry, G = zoo.build(args.generator)
        if entry.kind != "generator":
            raise ValueError(f"{args.generator} is not a generator entry")
    else:
        G = generator_from_json(_load_json(args.generator), tol)
    times = (
        [float(t) for t in args.scan.split(",")] if args.scan else list(DEFAULT_SCAN_TIMES)
    )
    report = analyze_generator(G, tol, times=times)
    report["input"] = args.generator
    if args.csv and "scan" in report:
        print("t,g,h,k,margin")
        for row in report["scan"]:
            print(f"{row['t']},{row['g']},{row['h']},{row['k']},{row['margin']}")
    _emit(args, report)
    if not cnd_check(G, tol):
        return EXIT_VERDICT_ABSENT
    return EXIT_OK


def cmd_rota(args) -> int:
    tol = _tolerances(args)
    if args.action != "build":
        raise ValueError(f"unknown rota action {args.action!r}")
    result = build_counterexample(args.d, args.seed, tol)
    report = {
        "tool": "qmarkov",
        "version": __version__,
        "kind": "square-obstruction",
        "tolerances": {
            "rank_rel": tol.rank_rel,
            "psd_floor": tol.psd_floor,
            "verify_abs": tol.verify_abs,
        },
        "d": args.d,
        "seed": args.seed,
        "m": result.m,
        "r": result.r,
        "n": result.channel.dim,
        "flags": {
            "squares_central": result.report.squares_central,
            "pairs_independent": result.report.pairs_independent,
            "words_independent": result.report.words_independent,
            "enough_terms": result.report.enough_terms,
        },
        "pair_rank": result.report.pair_rank,
        "word_rank": result.report.word_rank,
        "word_count": result.report.word_count,
        "certificates": [jsonable(result.certificate())],
        "summary": [
            f"assembled d={args.d} family on dimension {result.channel.dim} "
            f"(m={result.m}, r={result.r}); "
            f"word rank {result.report.word_rank}/{result.report.word_count}; "
            f"the squared channel is {result.certificate().verdict.value}"
        ],
    }
    if args.out:
        payload = channel_to_json(result.channel)
        Path(args.out).write_text(json.dumps(payload) + "\n", encoding="utf-8")
        report["summary"].append(f"channel written to {args.out}")
    _emit(args, report)
    return EXIT_OK


def cmd_grothendieck(args) -> int:
    tol = _tolerances(args)
    key = args.map.lower()
    if key in FRAME_ALIASES:
        T = FRAME_ALIASES[key]()
    else:
        T = frame_from_json(_load_json(args.map), tol)
    result = cb_lower_bound(T, k=args.k, restarts=args.restarts, seed=args.seed)
    report = analyze_frame(T, tol, seed=args.seed, samples=args.samples,
                           k=args.k, restarts=args.restarts)
    report["input"] = args.map
    report["cb_lower_bound"] = jsonable(
        {
            "k": result.k,
            "best_value": result.best_value,
            "iterations": result.iterations,
            "per_restart": result.per_restart,
        }
    )
    _emit(args, report)
    print(f"best_value = {result.best_value:.9f} (k={result.k}, "
          f"restarts={args.restarts})")
    return EXIT_OK


def cmd_zoo(args) -> int:
    rows = []
    for entry in zoo.ENTRIES.values():
        expected = ", ".join(entry.expected_verdicts + entry.expected_flags) or "-"
        rows.append((entry.name, entry.kind, expected, entry.description))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    for name, kind, expected, desc in rows:
        print(f"{name:<{widths[0]}}  {kind:<{widths[1]}}  {expected:<{widths[2]}}  {desc}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = acceptance.run_all(echo=print)
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    if args.json:
        payload = [
            {
                "index": r.index,
                "name": r.name,
                "ok": r.ok,
                "elapsed": r.elapsed,
                "limit": r.limit,
                "detail": r.detail,
            }
            for r in results
        ]
        if args.json == "-":
            print(json.dumps(payload, indent=2))
        else:
            Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK if not failed else EXIT_VERDICT_ABSENT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmarkov",
        description="verification and construction toolkit for quantum Markov maps",
    )
    parser.add_argument("--version", action="version", version=f"qmarkov {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a channel / Schur / generator / frame input")
    p.add_argument("input", help="JSON path or zoo:NAME[?k=v&...]")
    p.add_argument("--schur", action="store_true", help="force Schur-matrix interpretation")
    p.add_argument("--expect", default=None,
                   help="exit 1 unless this verdict appears (e.g. NOT_FACTORIZABLE)")
    _common_flags(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("schur", help="analyze a Schur matrix file or zoo entry")
    p.add_argument("input", help="JSON path with fields n, b, or zoo:NAME")
    p.add_argument("--expect", default=None)
    _common_flags(p)
    p.set_defaults(fn=cmd_schur)

    p = sub.add_parser("semigroup", help="generator admissibility and obstruction scan")
    p.add_argument("--generator", required=True, help="JSON path or zoo:cyclic4")
    p.add_argument("--scan", default=None, help="comma-separated times, e.g. 1e-4,1e-3")
    p.add_argument("--csv", action="store_true", help="print the scan table as CSV")
    _common_flags(p)
    p.set_defaults(fn=cmd_semigroup)

    p = sub.add_parser("rota", help="build the square-obstruction counterexample")
    p.add_argument("action", choices=["build"])
    p.add_argument("--d", type=int, default=5, help="number of Kraus terms (>= 5)")
    p.add_argument("--out", default=None, help="write the channel JSON here")
    _common_flags(p)
    p.set_defaults(fn=cmd_rota)

    p = sub.add_parser("grothendieck", help="cb-norm lower bound for a frame map")
    p.add_argument("--map", required=True, help="m3 | l4 | frame JSON path")
    p.add_argument("--k", type=int, default=3, help="ancilla dimension")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--samples", type=int, default=500,
                   help="random samples for the pointwise-bound check")
    _common_flags(p)
    p.set_defaults(fn=cmd_grothendieck)

    p = sub.add_parser("zoo", help="list the built-in examples")
    p.set_defaults(fn=cmd_zoo)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--json", metavar="PATH", default=None)
    p.set_defaults(fn=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (SearchFailureError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, KeyError, DimensionError, OSError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
