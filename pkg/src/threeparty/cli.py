"""Command-line entry point: ``threeparty solve|check|gen|bench``.

Exit status: 0 success, 1 unreadable or invalid input, 2 no equilibrium,
3 internal oracle disagreement, 4 a certificate failed its check.
"""
from __future__ import annotations

import argparse
import sys
import time

from .core import (
    EquivalenceViolation,
    Instance,
    NoEquilibrium,
    NoWalrasianEquilibrium,
    NoWerpEquilibrium,
    OracleDisagreement,
    SizeGuard,
)
from .formats import FormatError, dump_certificate, dump_instance, load_certificate, read_instance, resolve_path
from .generate import MIXES, generate_instance
from .pipeline import (
    REQUIREMENT_TEXT,
    build_mediator_hierarchy,
    check_equilibrium,
    check_min_price_relation,
    solve_three_party,
    trivial_equilibrium_from_we,
    welfare_of_certificate,
)
from .smallk import smallk_max_welfare
from .verify import brute_welfare

EXIT_OK, EXIT_INPUT, EXIT_NO_EQUILIBRIUM, EXIT_DISAGREEMENT, EXIT_REJECTED = 0, 1, 2, 3, 4


def _load(path: str, depth: int, fanout: int) -> Instance:
    inst = read_instance(path)
    return build_mediator_hierarchy(inst, depth, fanout) if depth > 1 else inst


def cmd_solve(args) -> int:
    inst = _load(args.instance, args.hierarchy, args.fanout)
    t0 = time.perf_counter()
    if args.trivial:
        cert = trivial_equilibrium_from_we(inst, validate=False)
    else:
        cert = solve_three_party(inst, "max" if args.max_prices else "min", args.threads, validate=False)
    t1 = time.perf_counter()
    verdict = check_equilibrium(inst, cert)
    t2 = time.perf_counter()
    timings = {"solve": t1 - t0, "check": t2 - t1} if args.timings else None
    sys.stdout.write(dump_certificate(inst, cert, verdict, timings))
    if not verdict.passed:
        print(f"error: certificate fails {', '.join(verdict.failed)}", file=sys.stderr)
        return EXIT_NO_EQUILIBRIUM
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load(args.instance, args.hierarchy, args.fanout)
    cert = load_certificate(resolve_path(args.certificate).read_text(), inst)
    verdict = check_equilibrium(inst, cert)
    for v in verdict.requirements:
        print(f"{v.name}: {'pass' if v.passed else 'FAIL'} ({REQUIREMENT_TEXT[v.name]})")
        for w in v.witnesses:
            print(f"  {w}")
    rel = check_min_price_relation(inst, cert)
    print(
        f"info: max local prices {rel.local_max} "
        f"{'equal' if rel.passed else 'differ from'} bidder-level minimum Walrasian prices {rel.bidder_min}"
    )
    return EXIT_OK if verdict.passed else EXIT_REJECTED


def cmd_gen(args) -> int:
    inst = generate_instance(args.seed, args.items, args.bidders, args.mediators, args.mix, args.max_value, args.max_den)
    text = dump_instance(inst)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_bench(args) -> int:
    print(f"{'k':>3} {'n':>4} {'m':>3} {'direct_s':>10} {'hier2_s':>10} {'smallk_s':>10}  checks")
    status = EXIT_OK
    for k in args.items:
        for n in args.bidders:
            m = max(1, min(args.mediators, n))
            inst = generate_instance(args.seed, k, n, m, "mixed")
            t0 = time.perf_counter()
            direct = solve_three_party(inst, threads=args.threads)
            t1 = time.perf_counter()
            hier_inst = build_mediator_hierarchy(inst, 2)
            hier = solve_three_party(hier_inst, threads=args.threads)
            t2 = time.perf_counter()
            sk = smallk_max_welfare(inst.all_items, inst.valuations, k)
            t3 = time.perf_counter()
            same = welfare_of_certificate(inst, direct) == welfare_of_certificate(hier_inst, hier)
            try:
                brute_ok = sk.welfare == brute_welfare(inst.all_items, inst.valuations, k)
                brute = "ok" if brute_ok else "MISMATCH"
            except SizeGuard:
                brute_ok, brute = True, "skipped"
            notes = f"hierarchy welfare {'ok' if same else 'MISMATCH'}, smallk vs brute {brute}"
            print(f"{k:>3} {n:>4} {m:>3} {t1 - t0:>10.4f} {t2 - t1:>10.4f} {t3 - t2:>10.4f}  {notes}")
            if not (same and brute_ok):
                status = EXIT_DISAGREEMENT
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="threeparty", description="Three-party equilibria for mediated auctions.")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for local auctions (default 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="compute and print an equilibrium certificate")
    solve.add_argument("instance")
    mode = solve.add_mutually_exclusive_group()
    mode.add_argument("--min-prices", action="store_true", help="minimum Walrasian central prices (default)")
    mode.add_argument("--max-prices", action="store_true", help="maximum Walrasian central prices")
    mode.add_argument("--trivial", action="store_true", help="all price vectors equal bidder-level minimum prices")
    solve.add_argument("--hierarchy", type=int, default=1, metavar="DEPTH")
    solve.add_argument("--fanout", type=int, default=2)
    solve.add_argument("--timings", action="store_true", help="add wall-clock timings to the certificate")
    solve.set_defaults(func=cmd_solve)

    check = sub.add_parser("check", help="re-check a certificate against an instance")
    check.add_argument("instance")
    check.add_argument("certificate")
    check.add_argument("--hierarchy", type=int, default=1, metavar="DEPTH")
    check.add_argument("--fanout", type=int, default=2)
    check.set_defaults(func=cmd_check)

    gen = sub.add_parser("gen", help="print a random gross-substitutes instance")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--items", type=int, default=3)
    gen.add_argument("--bidders", type=int, default=4)
    gen.add_argument("--mediators", type=int, default=2)
    gen.add_argument("--mix", choices=MIXES, default="mixed")
    gen.add_argument("--max-value", type=int, default=10)
    gen.add_argument("--max-den", type=int, default=3)
    gen.add_argument("-o", "--output")
    gen.set_defaults(func=cmd_gen)

    bench = sub.add_parser("bench", help="time direct, hierarchical and few-items solves")
    bench.add_argument("--items", type=_int_list, default=[3])
    bench.add_argument("--bidders", type=_int_list, default=[4, 8, 16])
    bench.add_argument("--mediators", type=int, default=2)
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (FormatError, OSError, ValueError, SizeGuard) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NoEquilibrium, NoWalrasianEquilibrium, NoWerpEquilibrium) as exc:
        print(f"error: no equilibrium: {exc}", file=sys.stderr)
        return EXIT_NO_EQUILIBRIUM
    except (OracleDisagreement, EquivalenceViolation) as exc:
        print(f"error: internal oracle disagreement: {exc}", file=sys.stderr)
        return EXIT_DISAGREEMENT


if __name__ == "__main__":
    sys.exit(main())
