"""Command-line interface.

Exit codes: 0 valid, 1 violation, 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from .checkers import check
from .commgraph import stats as comm_stats
from .errors import BudgetError, InputError, InstanceTooLarge, TxnCheckError
from .generate import GenParams, canned, gen_from_cnf, gen_random, parse_dimacs_cnf
from .history import History, parse_history, serialize, width
from .oracle import brute_check
from .reduce import reduce_pc_to_ser, reduce_si_to_ser
from .satenc import emit_dimacs, encode
from .verdict import Criterion

log = logging.getLogger("txncheck")

EXIT_VALID = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

CRITERIA = [c.value for c in Criterion]


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as f:
        return f.read()


def _load(path: str) -> History:
    try:
        return parse_history(_read(path))
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text if text.endswith("\n") else text + "\n")


def _format_evidence(ev) -> str:
    if isinstance(ev, list) and ev and isinstance(ev[0], tuple):
        parts = [ev[0][0]]
        for a, b, label in ev:
            parts.append(f"-{label}->")
            parts.append(b)
        return "cycle: " + " ".join(parts)
    return json.dumps(ev, ensure_ascii=False)


def cmd_check(args) -> int:
    criterion = Criterion.parse(args.criterion)
    worst = EXIT_VALID
    for path in args.files:
        h = _load(path)
        start = time.perf_counter()
        v = check(
            h, criterion, budget=args.budget, decompose=args.decompose, via_sat=args.via_sat
        )
        elapsed = (time.perf_counter() - start) * 1000
        if args.json:
            out = v.to_json()
            if not args.witness:
                out.pop("witness", None)
            out["elapsed_ms"] = round(elapsed, 3)
            if len(args.files) > 1:
                out["file"] = path
            print(json.dumps(out, ensure_ascii=False))
        else:
            prefix = f"{path}: " if len(args.files) > 1 else ""
            line = f"{prefix}{criterion} {v.status}"
            if v.explored_states is not None:
                line += f" (explored {v.explored_states} states)"
            print(line)
            if v.valid and args.witness and v.witness is not None:
                print("witness: " + " ".join(v.witness))
            if not v.valid and v.evidence is not None:
                print(_format_evidence(v.evidence))
        if not v.valid:
            worst = EXIT_VIOLATION
    return worst


def cmd_generate(args) -> int:
    if args.kind == "random":
        p = GenParams(
            sessions=args.sessions,
            txns_per_session=args.txns,
            ops_per_txn=args.ops,
            vars=args.vars,
            seed=args.seed,
            disjoint_writes=args.disjoint_writes,
            mode=args.mode or ("stale_read" if args.stale_reads else "serial"),
            stale_reads=args.stale_reads,
            general=args.general,
            edge_prob=args.edge_prob,
        )
        h = gen_random(p)
    elif args.kind == "canned":
        if not args.source:
            raise InputError("generate canned needs a NAME")
        h = canned(args.source)
    else:
        if not args.source:
            raise InputError("generate from-cnf needs a FILE")
        h = gen_from_cnf(parse_dimacs_cnf(_read(args.source).decode("utf-8")))
    _write(args.output, serialize(h, indent=args.indent))
    return EXIT_VALID


def cmd_reduce(args) -> int:
    h = _load(args.file)
    reduced, _ = reduce_pc_to_ser(h) if args.target == "pc" else reduce_si_to_ser(h)
    _write(args.output, serialize(reduced, indent=args.indent))
    return EXIT_VALID


def cmd_encode(args) -> int:
    h = _load(args.file)
    _write(args.output, emit_dimacs(encode(h, args.criterion)))
    return EXIT_VALID


def cmd_oracle(args) -> int:
    h = _load(args.file)
    ok = brute_check(h, args.criterion, max_txns=args.max_txns)
    print("true" if ok else "false")
    return EXIT_VALID if ok else EXIT_VIOLATION


def cmd_stats(args) -> int:
    h = _load(args.file)
    info = {
        "transactions": len(h) - 1,
        "operations": sum(len(t.ops) for t in h.transactions.values() if t.tid != "init"),
        "variables": len(h.variables),
        "width": width(h),
    }
    if h.is_session_form:
        info.update(comm_stats(h))
    if args.json:
        print(json.dumps(info, ensure_ascii=False))
    else:
        for k, v in info.items():
            print(f"{k}: {v}")
    return EXIT_VALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="txncheck", description="Check transactional histories for consistency."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="check a criterion")
    p.add_argument("--criterion", "-c", required=True, choices=CRITERIA)
    p.add_argument("--decompose", action="store_true",
                   help="check each biconnected component separately")
    p.add_argument("--via-sat", action="store_true", help="use the SAT encoding")
    p.add_argument("--witness", action="store_true", help="print the commit order")
    p.add_argument("--budget", type=int, default=None,
                   help="search state budget (conflict budget with --via-sat)")
    p.add_argument("--json", action="store_true")
    p.add_argument("files", nargs="+", metavar="FILE")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("generate", help="generate a history")
    p.add_argument("kind", choices=["random", "canned", "from-cnf"])
    p.add_argument("source", nargs="?", help="canned NAME or DIMACS FILE")
    p.add_argument("--sessions", type=int, default=3)
    p.add_argument("--txns", type=int, default=5, help="transactions per session")
    p.add_argument("--ops", type=int, default=4, help="operations per transaction")
    p.add_argument("--vars", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--disjoint-writes", action="store_true")
    p.add_argument("--mode", choices=["serial", "stale_read", "snapshot"],
                   help="default: stale_read if --stale-reads is set, else serial")
    p.add_argument("--stale-reads", type=int, default=0,
                   help="number of reads redirected to older versions")
    p.add_argument("--general", action="store_true",
                   help="emit a general session order instead of sessions")
    p.add_argument("--edge-prob", type=float, default=0.3)
    p.add_argument("--indent", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reduce", help="write the PC or SI reduction to SER")
    p.add_argument("target", choices=["pc", "si"])
    p.add_argument("file", metavar="FILE")
    p.add_argument("--indent", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("encode", help="write the DIMACS encoding")
    p.add_argument("--criterion", "-c", required=True, choices=CRITERIA)
    p.add_argument("file", metavar="FILE")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("oracle", help="brute-force check (small histories only)")
    p.add_argument("--criterion", "-c", required=True, choices=CRITERIA)
    p.add_argument("--max-txns", type=int, default=10)
    p.add_argument("file", metavar="FILE")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("stats", help="size, width and communication-graph statistics")
    p.add_argument("--json", action="store_true")
    p.add_argument("file", metavar="FILE")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except BudgetError as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, InstanceTooLarge, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except TxnCheckError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
