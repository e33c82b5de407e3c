"""Command-line interface.

Exit codes: 0 success / check passed; 1 check failed or claim refuted;
2 usage error; 3 inconclusive (budget-limited Survived leaves where a full
elimination was requested).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from .arith import (
    decimal_prefix,
    factorize,
    is_prime,
    multiplicative_order,
    sigma,
)
from .cases import CaseSpec, ProofTrace, TraceSchemaError
from .classify import classify, has_all_even_exponents
from .eliminator import Budget, eliminate, prove_theorem_1, prove_theorem_2
from .search import CheckpointError, SearchJob, run_search, sieve_dpn, split_job
from .trace import TraceCheckError, check_trace

CHECKPOINT_ENV = "DPN_CHECKPOINT_DIR"


def _parse_bound(text: str) -> int:
    return int(float(text)) if any(c in text for c in "eE.") else int(text)


def cmd_verify(args) -> int:
    n = args.n
    c = classify(n)
    f = factorize(n)
    print(f"n = {n} = " + " * ".join(f"{p}^{a}" if a > 1 else str(p) for p, a in f))
    print(f"sigma(n) = {sigma(f)}")
    print(f"kind: {c.kind}")
    if c.deficient_perfect is not None:
        rec = c.deficient_perfect
        print(f"deficient perfect: sigma(n) = 2n - d with d = {rec.d}, D = n/d = {rec.D}")
        if c.almost_perfect:
            print("almost perfect (d = 1)")
        return 0
    print("not deficient perfect")
    return 1


def cmd_classify(args) -> int:
    c = classify(args.n)
    out = {
        "n": args.n,
        "kind": c.kind,
        "deficient_perfect": None,
        "near_perfect_divisor": c.near_perfect_divisor,
        "almost_perfect": c.almost_perfect,
    }
    if c.deficient_perfect is not None:
        out["deficient_perfect"] = {"d": c.deficient_perfect.d, "D": c.deficient_perfect.D}
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_search(args) -> int:
    if args.all and args.no_even_filter is False:
        # the even-exponent filter is only sound for odd candidates
        args.no_even_filter = True
    job = SearchJob(
        bound=args.bound, k=args.k,
        odd_only=not args.all,
        even_exponent_filter=not args.no_even_filter and not args.all,
    )
    ckpt = args.checkpoint_dir or os.environ.get(CHECKPOINT_ENV)
    if args.jobs:
        for unit in split_job(job):
            print(json.dumps(unit.to_obj(), sort_keys=True))
        return 0
    try:
        report = run_search(job, checkpoint_dir=ckpt, resume=args.resume)
    except CheckpointError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(json.dumps(report.to_obj(), indent=2, sort_keys=True))
    return 0


def cmd_prove(args) -> int:
    budget = Budget()
    if args.target == "theorem-1":
        trace = prove_theorem_1(budget)
        expected_open = {"out-of-scope"}
    elif args.target == "theorem-2":
        trace = prove_theorem_2(budget)
        expected_open = {"out-of-scope"}
    else:
        try:
            with open(args.target) as fh:
                case = CaseSpec.from_obj(json.load(fh))
        except (OSError, json.JSONDecodeError, KeyError) as e:
            print(f"error: cannot read case file {args.target}: {e}", file=sys.stderr)
            return 2
        trace = eliminate(case, budget)
        expected_open = set()
    text = trace.to_json(indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(f"trace written to {args.out}")
    survivors = trace.survived()
    print(f"leaves: {len(trace.leaves())}  eliminated: {len(trace.eliminated())}  "
          f"survived: {len(survivors)}")
    for leaf in survivors:
        print(f"  survived: {leaf.case.describe()}  ({leaf.reason})")
    unexpected = [s for s in survivors if s.reason not in expected_open]
    if unexpected:
        return 3
    return 0


def cmd_check_trace(args) -> int:
    try:
        with open(args.trace) as fh:
            trace = ProofTrace.from_json(fh.read())
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TraceSchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return 1
    try:
        n = check_trace(trace)
    except TraceCheckError as e:
        print(f"CHECK FAILED: {e}", file=sys.stderr)
        return 1
    print(f"trace verified: {n} nodes, {len(trace.leaves())} leaves, "
          f"{len(trace.survived())} survived")
    return 0


def cmd_table(args) -> int:
    primes = args.primes
    moduli = args.moduli
    for p in primes + moduli:
        if not is_prime(p):
            print(f"error: {p} is not prime", file=sys.stderr)
            return 2
    header = "p \\ q " + " ".join(f"{q:>6}" for q in moduli)
    print(header)
    for p in primes:
        row = [f"{p:>5} "]
        for q in moduli:
            if p == q:
                row.append(f"{'-':>6}")
            else:
                row.append(f"{multiplicative_order(p, q):>6}")
        print(" ".join(row))
    return 0


def cmd_report(args) -> int:
    bound = args.bound
    hits = sieve_dpn(bound)
    print(f"deficient perfect numbers up to {bound}: {len(hits)}")
    print(f"{'n':>10} {'d':>8} {'D':>8} {'parity':>6} {'even-exps':>9} {'sigma(n)/n':>12}")
    for n in hits:
        c = classify(n)
        rec = c.deficient_perfect
        f = factorize(n)
        ratio = Fraction(sigma(f), n)
        print(f"{n:>10} {rec.d:>8} {rec.D:>8} {'odd' if n % 2 else 'even':>6} "
              f"{'yes' if has_all_even_exponents(f) else 'no':>9} "
              f"{decimal_prefix(ratio, 6):>12}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dpn",
        description="Deficient perfect numbers: verify, classify, search, "
        "and replay case-elimination proofs.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="verify whether n is deficient perfect")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="classify n (JSON output)")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("search", help="exhaustively enumerate DPNs")
    p.add_argument("--k", type=int, required=True, help="exact number of distinct prime factors")
    p.add_argument("--bound", type=_parse_bound, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--odd", action="store_true", default=True, help="odd n only (default)")
    g.add_argument("--all", action="store_true", help="both parities")
    p.add_argument("--no-even-filter", action="store_true",
                   help="disable the even-exponent pruning (odd searches)")
    p.add_argument("--jobs", action="store_true", help="print split units and exit")
    p.add_argument("--checkpoint-dir", help=f"default ${CHECKPOINT_ENV}")
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("prove", help="run a case-elimination proof")
    p.add_argument("target", help="'theorem-1', 'theorem-2', or a case JSON file")
    p.add_argument("--out", help="write the proof trace JSON here")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("check-trace", help="independently re-verify a proof trace")
    p.add_argument("trace", help="trace JSON file")
    p.set_defaults(func=cmd_check_trace)

    p = sub.add_parser("table", help="multiplicative order table")
    p.add_argument("--primes", type=int, nargs="+", required=True)
    p.add_argument("--moduli", type=int, nargs="+", required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("report", help="table of all DPNs up to a small bound")
    p.add_argument("--bound", type=_parse_bound, default=10**6)
    p.set_defaults(func=cmd_report)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
