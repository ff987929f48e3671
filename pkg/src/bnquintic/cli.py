"""Command line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .arith import PrimeField, is_prime, primes_in_range
from .cache import CacheConflictError, CountCache, resolve_path
from .maps import roundtrip_check
from .modularity import VerificationConfig, full_verification
from .qseries import CoefficientOverflowError, deligne_bound_check, f_coefficients, hecke_check
from .varieties import (
    cayley_cover_fibration,
    cayley_cover_formula,
    count_c2,
    count_cayley_c1,
    count_cayley_resolved_cover,
    count_U_classes,
    count_U_classes_bruteforce,
    count_Y,
    count_Ytilde,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def parse_int_list(text: str, primes_only: bool = True) -> list[int]:
    """Parse "5,7,11" and ranges "5..41" (ranges expand to primes)."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = (int(v) for v in part.split("..", 1))
            out.extend(primes_in_range(lo, hi) if primes_only else range(lo, hi + 1))
        else:
            out.append(int(part))
    return out


def parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("..")
    return int(lo), int(hi or lo)


def _emit_tsv(header, rows, out):
    print("\t".join(header), file=out)
    for r in rows:
        print("\t".join(str(v) for v in r), file=out)


def _emit_json(doc, out):
    print(json.dumps(doc, indent=2), file=out)


def _primes_arg(parser, args, minimum=5) -> list[int]:
    if getattr(args, "prime", None) is not None:
        primes = [args.prime]
    elif getattr(args, "primes", None):
        try:
            primes = parse_int_list(args.primes)
        except ValueError:
            parser.error(f"cannot parse prime list {args.primes!r}")
    else:
        parser.error("give --prime or --primes")
    for p in primes:
        if not is_prime(p):
            parser.error(f"{p}: not prime")
        if p < minimum:
            parser.error(f"{p}: bad prime; good reduction requires p >= 5")
    return primes


def _counts(fld, cache: CountCache, args) -> tuple[int, int]:
    p = fld.p
    n_U, n_sq = cache.get("U", p), cache.get("U_square", p)
    if n_U is None or n_sq is None:
        if args.method == "brute":
            sq, nsq = count_U_classes_bruteforce(fld)
            n_U, n_sq = sq + nsq, sq
        else:
            n_U, n_sq = count_U_classes(fld, args.threads)
        cache.put("U", p, n_U, args.method)
        cache.put("U_square", p, n_sq, args.method)
    return n_U, n_sq


def _recheck(cache: CountCache, args, out) -> int:
    bad = 0
    for (variety, p), entry in sorted(cache.entries.items()):
        if variety not in ("U", "U_square") or p < 5:
            continue
        n_U, n_sq = count_U_classes(PrimeField(p), args.threads)
        fresh = n_U if variety == "U" else n_sq
        if fresh != int(entry["count"]):
            print(f"cache mismatch: {variety}({p}) cached {entry['count']}, recomputed {fresh}",
                  file=sys.stderr)
            bad += 1
    return bad


def cmd_count(parser, args, out) -> int:
    primes = _primes_arg(parser, args)
    cache = CountCache(resolve_path(args.cache))
    if args.recheck and _recheck(cache, args, out):
        return EXIT_FAIL
    rows = []
    for p in primes:
        fld = PrimeField(p)
        n_U, n_sq = _counts(fld, cache, args)
        row = {"p": p, "n_U": n_U, "n_Y": count_Y(fld, n_U), "t3": p**3 - 19 - n_U}
        if args.twisted:
            row["n_Utilde"] = 2 * n_sq
            row["n_Ytilde"] = count_Ytilde(fld, n_sq)
            row["ytilde_branch"] = "proved" if p % 4 == 1 else "unproved"
        rows.append(row)
    cache.save()
    if args.format == "json":
        _emit_json({"tool_version": __version__, "method": args.method, "rows": rows}, out)
    else:
        header = ["p", "#U", "#Y", "t3"] + (["#Utilde", "#Ytilde"] if args.twisted else [])
        keys = ["p", "n_U", "n_Y", "t3"] + (["n_Utilde", "n_Ytilde"] if args.twisted else [])
        _emit_tsv(header, [[r[k] for k in keys] for r in rows], out)
    return EXIT_OK


def cmd_qexp(parser, args, out) -> int:
    if args.N < 1:
        parser.error("-N must be at least 1")
    try:
        q = f_coefficients(args.N)
    except CoefficientOverflowError as exc:
        print(f"overflow: {exc}", file=sys.stderr)
        return EXIT_FAIL
    checks = None
    if args.check:
        hecke, deligne = hecke_check(q), deligne_bound_check(q)
        checks = {
            "hecke": {"checked": hecke.checked, "violations": hecke.violations},
            "deligne": {"checked": deligne.checked, "violations": deligne.violations},
        }
    if args.format == "json":
        _emit_json({"tool_version": __version__, "N": args.N, "level": q.level,
                    "weight": q.weight, "coeffs": q.tolist(), "checks": checks}, out)
    else:
        _emit_tsv(["n", "a_n"], [[n, a] for n, a in enumerate(q.tolist(), 1)], out)
        if checks:
            for name, c in checks.items():
                print(f"# {name}: {c['checked']} identities, {len(c['violations'])} violations",
                      file=out)
    if checks and (checks["hecke"]["violations"] or checks["deligne"]["violations"]):
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(parser, args, out) -> int:
    try:
        S = tuple(parse_int_list(args.S, primes_only=False))
        primes = parse_int_list(args.primes) if args.primes else None
        k_range = parse_range(args.k_range) if args.k_range else None
    except ValueError:
        parser.error("malformed list or range")
    if not is_prime(args.hodge_prime) or args.hodge_prime < 5:
        parser.error(f"{args.hodge_prime}: hodge prime must be a prime >= 5")
    cache = CountCache(resolve_path(args.cache))
    counts = {p: int(e["count"]) for (v, p), e in cache.entries.items() if v == "U"}
    squares = {p: int(e["count"]) for (v, p), e in cache.entries.items() if v == "U_square"}
    config = VerificationConfig(S=S, primes=primes, hodge_prime=args.hodge_prime,
                                k_range=k_range, counts=counts, square_counts=squares,
                                threads=args.threads)
    try:
        report = full_verification(config)
    except ValueError as exc:
        parser.error(str(exc))
    try:
        for row in report.rows:
            cache.put("U", row["p"], row["n_U"])
    except CacheConflictError as exc:
        print(exc, file=sys.stderr)
    cache.save()
    doc = report.to_dict()
    if args.format == "json":
        _emit_json(doc, out)
    else:
        _emit_tsv(["p", "#U", "#Y", "t3", "a_p", "match"],
                  [[r["p"], r["n_U"], r["n_Y"], r["t3"], r["a_p"], r["match"]] for r in doc["rows"]],
                  out)
        print(f"# verdict: {report.verdict}", file=out)
    return EXIT_OK if report.verified else EXIT_FAIL


def cmd_maps(parser, args, out) -> int:
    p = _primes_arg(parser, args)[0]
    report = roundtrip_check(PrimeField(p), args.samples, args.seed, exhaustive=args.exhaustive)
    if args.format == "json":
        _emit_json(report, out)
    else:
        print(f"# p={p} n={report['n']} seed={report['seed']}", file=out)
        _emit_tsv(["map", "ok", "indeterminate", "failed"],
                  [[m, report[m]["ok"], report[m]["indeterminate"], report[m]["failed"]]
                   for m in ("beauville", "verrill")], out)
    failed = report["beauville"]["failed"] + report["verrill"]["failed"]
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_cayley(parser, args, out) -> int:
    primes = _primes_arg(parser, args)
    rows = []
    for p in primes:
        fld = PrimeField(p)
        cover = count_cayley_resolved_cover(fld, args.threads)
        c1 = count_cayley_c1(fld)
        row = {
            "p": p,
            "cover": cover,
            "formula": cayley_cover_formula(p),
            "fibration": cayley_cover_fibration(fld),
            "c1": c1,
            "c2": count_c2(fld),
        }
        row["match"] = (cover == row["formula"] == row["fibration"]) and row["c2"] == c1 + 4 * p
        rows.append(row)
    if args.format == "json":
        _emit_json({"tool_version": __version__, "rows": rows}, out)
    else:
        keys = ["p", "cover", "formula", "fibration", "c1", "c2", "match"]
        _emit_tsv(keys, [[r[k] for k in keys] for r in rows], out)
    return EXIT_OK if all(r["match"] for r in rows) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("tsv", "json"), default=None)
    common.add_argument("--cache", metavar="PATH", help="count cache (default: $BNQUINTIC_CACHE)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="bnquintic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="point counts (p, #U, #Y, t3)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--primes")
    g.add_argument("--prime", type=int)
    p.add_argument("--twisted", action="store_true", help="add #Utilde and #Ytilde")
    p.add_argument("--method", choices=("fast", "brute"), default="fast")
    p.add_argument("--recheck", action="store_true", help="recompute cached counts first")
    p.set_defaults(func=cmd_count, subparser=p, default_format="tsv")

    p = sub.add_parser("qexp", parents=[common], help="coefficients of the weight 4 newform")
    p.add_argument("-N", type=int, required=True)
    p.add_argument("--check", action="store_true", help="Hecke and Deligne checks")
    p.set_defaults(func=cmd_qexp, subparser=p, default_format="tsv")

    p = sub.add_parser("verify", parents=[common], help="finite-prime modularity check")
    p.add_argument("--S", default="2,3")
    p.add_argument("--primes", help="override the prime set T")
    p.add_argument("--hodge-prime", type=int, default=13)
    p.add_argument("--k-range", default="7..59")
    p.set_defaults(func=cmd_verify, subparser=p, default_format="json")

    p = sub.add_parser("maps", parents=[common], help="round-trip the birational maps")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--exhaustive", action="store_true")
    p.set_defaults(func=cmd_maps, subparser=p, default_format="tsv")

    p = sub.add_parser("cayley", parents=[common], help="Cayley cubic cover counts")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--primes")
    g.add_argument("--prime", type=int)
    p.set_defaults(func=cmd_cayley, subparser=p, default_format="tsv")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    if args.threads < 1:
        parser.error("--threads must be positive")
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args.subparser, args, out)


if __name__ == "__main__":
    sys.exit(main())
