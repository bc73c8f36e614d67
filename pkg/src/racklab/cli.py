"""Command line front end.

Subcommands: check, enumerate, encode, decode, stats, audit, analyze.
Exit codes: 0 success, 1 domain failure (axiom/audit/check), 2 I/O or
parse error, 3 resource cap.  JSON output is canonical (sorted keys) and
independent of the thread count; timing appears only in witness summary
files, never on stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import analysis, codec, enumeration
from .codec import AuditFail, CodecParams, CorruptStream, InconsistentDecode
from .core import (AxiomReport, NotARackError, Rack, RackParseError,
                   conjugation_quandle, dihedral_quandle, format_rack,
                   parse_rack_table, rack_from_table, symmetric_group_table,
                   trivial_rack)
from .graph import component_out_degree_constant, rack_graph, to_dot

EXIT_OK, EXIT_DOMAIN, EXIT_IO, EXIT_RESOURCE = 0, 1, 2, 3


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("RACKLAB_THREADS", "1")))
    except ValueError:
        return 1


def _emit(payload: dict, args, text_lines=None) -> None:
    if args.format == "json":
        out = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = text_lines if text_lines is not None else _render_text(payload)
        out = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _render_text(payload, prefix="") -> list:
    lines = []
    for key in sorted(payload):
        value = payload[key]
        if isinstance(value, dict):
            lines.append(f"{prefix}{key}:")
            lines.extend(_render_text(value, prefix + "  "))
        else:
            lines.append(f"{prefix}{key}: {value}")
    return lines


def _read_text(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_rack_arg(path) -> Rack:
    table = parse_rack_table(_read_text(path))
    result = rack_from_table(table)
    if isinstance(result, AxiomReport):
        raise NotARackError(result)
    return result


def _params(args, n: int) -> CodecParams:
    default = CodecParams.default(n)
    delta = args.delta if args.delta is not None else default.delta
    cap_l = args.cap_l if args.cap_l is not None else default.cap_l
    return CodecParams(delta=delta, cap_l=cap_l)


def _report_dict(report: AxiomReport) -> dict:
    return {
        "n": report.n,
        "is_rack": report.is_rack,
        "is_quandle": report.is_quandle,
        "violations": [{"kind": v.kind, "witness": list(v.witness)}
                       for v in report.violations],
    }


def cmd_check(args) -> int:
    try:
        table = parse_rack_table(_read_text(args.path))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except RackParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    result = rack_from_table(table)
    if isinstance(result, Rack):
        payload = _report_dict(AxiomReport(result.n, True, result.is_quandle, ()))
        if args.dot:
            payload["dot"] = to_dot(rack_graph(result))
        _emit(payload, args)
        return EXIT_OK
    _emit(_report_dict(result), args)
    return EXIT_DOMAIN


def cmd_enumerate(args) -> int:
    try:
        report = enumeration.enumerate_classes(args.n, jobs=args.threads)
    except enumeration.OrderTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    payload = {
        "n": args.n,
        "labeled": report.labeled_count,
        "classes": report.class_count,
        "quandle_classes": report.quandle_class_count,
        "reference_unverified": {
            "classes": enumeration.REFERENCE_RACK_CLASSES.get(args.n),
            "quandle_classes": enumeration.REFERENCE_QUANDLE_CLASSES.get(args.n),
        },
    }
    status = EXIT_OK
    if args.oracle:
        try:
            oracle = enumeration.oracle_enumerate(args.n)
        except enumeration.OrderTooLarge as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RESOURCE
        agree = (oracle.labeled_count == report.labeled_count
                 and oracle.class_count == report.class_count
                 and oracle.quandle_class_count == report.quandle_class_count
                 and oracle.witnesses == report.witnesses)
        payload["oracle_agrees"] = agree
        if not agree:
            status = EXIT_DOMAIN
    if args.witness_dir:
        enumeration.write_witnesses(report, args.witness_dir)
        payload["witness_dir"] = args.witness_dir
    _emit(payload, args)
    return status


def cmd_encode(args) -> int:
    try:
        rack = _load_rack_arg(args.path)
    except (OSError, RackParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NotARackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    data = codec.encode(rack, _params(args, rack.n))
    out = args.out or (os.path.splitext(args.path)[0] + ".rke")
    with open(out, "wb") as fh:
        fh.write(data)
    print(f"wrote {len(data)} bytes to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_decode(args) -> int:
    try:
        with open(args.path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        rack = codec.decode(data)
    except CorruptStream as exc:
        print(f"error: corrupt stream: {exc}", file=sys.stderr)
        return EXIT_IO
    except InconsistentDecode as exc:
        print(f"error: inconsistent stream: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = format_rack(rack)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_stats(args) -> int:
    try:
        rack = _load_rack_arg(args.path)
    except (OSError, RackParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NotARackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    params = _params(args, rack.n)
    stats = codec.encoding_stats(rack, params)
    payload = {
        "n": stats.n,
        "delta": stats.delta,
        "cap_l": stats.cap_l,
        "eta": list(stats.eta),
        "cp": stats.cp,
        "zeta": stats.zeta,
        "residual_bits": stats.residual_bits,
        "header_bits": stats.header_bits,
        "bound_n2_over_4": stats.bound,
        "total_bytes": stats.total_bytes,
    }
    if args.dot:
        t = codec.greedy_T(rack, params.delta, params.cap_l)
        payload["dot"] = to_dot(rack_graph(rack, t))
    _emit(payload, args)
    return EXIT_OK


def cmd_audit(args) -> int:
    try:
        rack = _load_rack_arg(args.path)
    except (OSError, RackParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NotARackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    params = _params(args, rack.n)
    try:
        report = codec.merge_bound_audit(rack, params)
        codec.build_info(rack, params)  # runs the invariance checks
    except AuditFail as exc:
        print(f"error: audit failed: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    regular = component_out_degree_constant(rack, range(rack.n))
    payload = {
        "n": report.n,
        "delta": report.delta,
        "cap_l": report.cap_l,
        "greedy_order": list(report.order),
        "drops": list(report.x_seq),
        "sum_drops": report.sum_x,
        "cp_t": report.cp_t,
        "x_after_t": report.x_after_t,
        "post_t_drops": [list(t) for t in report.post_t_drops],
        "invariance": "ok",
        "out_regular_components": regular,
    }
    _emit(payload, args)
    return EXIT_OK if regular else EXIT_DOMAIN


def _analysis_rack(args) -> Rack:
    if args.rack:
        return _load_rack_arg(args.rack)
    family = args.family or "dihedral"
    if family == "trivial":
        return trivial_rack(args.n)
    if family == "dihedral":
        return dihedral_quandle(args.n)
    if family == "conj-s3":
        return conjugation_quandle(symmetric_group_table(3))
    raise ValueError(f"unknown family {family!r}")


def cmd_analyze(args) -> int:
    try:
        if args.kind == "zeta-sweep":
            report = analysis.zeta_bound_sweep(args.n, trials=args.trials, seed=args.seed)
        elif args.kind == "chernoff":
            report = analysis.chernoff_check(args.n, args.p, args.eps,
                                             trials=args.trials, seed=args.seed,
                                             threads=args.threads)
        elif args.kind == "claim-calc":
            grid = [i / 2 for i in range(11)]
            worst_gap = min(analysis.claim_calc_gap(x, y) for x in grid for y in grid)
            worst_err = max(abs(analysis.claim_calc_gap(x, y) - (x - 3 * y) ** 2 / 72)
                            for x in grid for y in grid)
            report = {
                "check": "claim-calc",
                "params": {"grid": "0..5 step 0.5"},
                "seed": args.seed,
                "statistic": {"min_gap": worst_gap, "max_identity_error": worst_err},
                "bound": 0.0,
                "pass": worst_gap >= 0 and worst_err <= 1e-12,
            }
        elif args.kind == "random-subset":
            rack = _analysis_rack(args)
            report = analysis.random_subset_check(rack, args.p, args.eps,
                                                  trials=args.trials, seed=args.seed,
                                                  threads=args.threads)
        elif args.kind == "find-w":
            rack = _analysis_rack(args)
            result = analysis.find_W(rack, args.delta or 1, args.p,
                                     bad_threshold=args.threshold,
                                     max_attempts=args.attempts, seed=args.seed)
            report = result.to_report()
            report["seed"] = args.seed
            _emit(report, args)
            return EXIT_OK  # non-certification is reported, not fatal
        else:
            print(f"error: unknown check {args.kind!r}", file=sys.stderr)
            return EXIT_IO
    except (OSError, RackParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NotARackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    _emit(report, args)
    return EXIT_OK if report.get("pass") else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="racklab",
                                     description="finite rack toolbox")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "text"), default="text")
        p.add_argument("--out", default=None, help="write output to this path")

    p = sub.add_parser("check", help="validate a .rack file")
    p.add_argument("path")
    p.add_argument("--dot", action="store_true", help="include a DOT dump of the graph")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", help="enumerate racks up to isomorphism")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against the naive oracle (n <= 3)")
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--witness-dir", default=None,
                   help="write one .rack per class plus summary.json")
    common(p)
    p.set_defaults(func=cmd_enumerate)

    for name, func in (("encode", cmd_encode), ("decode", cmd_decode)):
        p = sub.add_parser(name, help=f"{name} between .rack and .rke")
        p.add_argument("path")
        p.add_argument("--delta", type=int, default=None)
        p.add_argument("--cap-l", dest="cap_l", type=int, default=None)
        p.add_argument("--out", default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("stats", help="encoding statistics of a .rack file")
    p.add_argument("path")
    p.add_argument("--delta", type=int, default=None)
    p.add_argument("--cap-l", dest="cap_l", type=int, default=None)
    p.add_argument("--dot", action="store_true")
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("audit", help="greedy merge audit and invariance checks")
    p.add_argument("path")
    p.add_argument("--delta", type=int, default=None)
    p.add_argument("--cap-l", dest="cap_l", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("analyze", help="numeric verification checks")
    p.add_argument("kind", choices=("zeta-sweep", "chernoff", "claim-calc",
                                    "random-subset", "find-w"))
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--attempts", type=int, default=100)
    p.add_argument("--threads", type=int, default=_default_threads())
    p.add_argument("--rack", default=None, help="path to a .rack input")
    p.add_argument("--family", default=None,
                   choices=("trivial", "dihedral", "conj-s3"))
    common(p)
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
