"""Command-line entry point: search, cf, bound, reduce, verify, check-cert."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Any, Sequence

from . import contfrac, linforms, reduction, search
from .realnum import MAX_PRECISION, PrecisionExhausted, compute_constants

log = logging.getLogger("pillai")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_PRECISION = 3
EXIT_BOUND = 4
EXIT_UNRESOLVED = 5

DEFAULT_PRECISION = 512
PRECISION_ENV = "PILLAI_PRECISION_BITS"
BOUND_TOLERANCE = 0.05


class StageFailure(Exception):
    def __init__(self, stage: str, code: int, message: str):
        super().__init__(f"stage '{stage}' failed: {message}")
        self.stage = stage
        self.code = code


def precision_window(flag: int | None) -> tuple[int, int]:
    """(start, cap).  An explicit flag or env setting pins the precision;
    otherwise start at the default and escalate up to MAX_PRECISION."""
    if flag is None and os.environ.get(PRECISION_ENV):
        try:
            flag = int(os.environ[PRECISION_ENV])
        except ValueError:
            raise SystemExit(f"{PRECISION_ENV} must be an integer")
    if flag is None:
        return DEFAULT_PRECISION, MAX_PRECISION
    return flag, flag


def fraction_text(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    with localcontext() as ctx:
        ctx.prec = 30
        return str(Decimal(x.numerator) / Decimal(x.denominator))


# -- JSON shapes -------------------------------------------------------------

def record_json(r: search.SolutionRecord) -> dict[str, Any]:
    return {"c": str(r.c), "pairs": [list(p) for p in r.pairs]}


def campaign_json(r: reduction.CampaignReport, details: bool = False) -> dict[str, Any]:
    out: dict[str, Any] = {
        "label": r.label,
        "family": r.family,
        "sign": r.sign,
        "B": r.root,
        "A": fraction_text(r.A),
        "A_printed": None if r.A_printed is None else fraction_text(r.A_printed),
        "A_recomputed": r.A_recomputed.to_decimal(8),
        "parameters": len(r.certificates) + len(r.unresolved),
        "unresolved": [list(p) for p in r.unresolved],
        "fallbacks": [{"param": list(f.param), "from": f.from_index, "to": f.to_index,
                       "reason": f.reason} for f in r.fallbacks],
    }
    if r.certificates:
        out.update({
            "min_epsilon": r.min_epsilon.to_decimal(12),
            "max_k_bound": r.max_k_bound,
            "worst_param": list(r.worst_param),
            "printed_bound": r.printed_bound,
            "printed_epsilon": None if r.printed_epsilon is None else fraction_text(r.printed_epsilon),
            "max_precision": r.max_precision,
        })
    if details:
        out["certificates"] = [
            {"param": list(p), "convergent": c.convergent_index, "q": str(c.q),
             "epsilon": c.epsilon.to_decimal(12), "k_bound": c.k_bound, "precision": c.precision}
            for p, c in r.certificates.items()]
    return out


def chain_json(chain: linforms.BoundChain) -> list[dict[str, Any]]:
    return [{"name": row.name, "value": row.value.to_decimal(8),
             "printed": None if row.printed is None else fraction_text(row.printed),
             "deviation": None if row.deviation is None else round(row.deviation, 6),
             "note": row.note} for row in chain.rows]


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def certificate_digest(cert: dict[str, Any]) -> str:
    body = {k: v for k, v in cert.items() if k not in ("timings", "digest")}
    return hashlib.sha256(canonical(body).encode()).hexdigest()


# -- commands ----------------------------------------------------------------

def cmd_search(args: argparse.Namespace) -> int:
    if args.m_max < search.M_MIN - 1 or args.n_max < search.N_MIN - 1 or args.min_reps < 1:
        print(f"error: need m-max >= {search.M_MIN - 1}, n-max >= {search.N_MIN - 1}, "
              "min-reps >= 1", file=sys.stderr)
        return EXIT_USAGE
    records = search.search(args.m_max, args.n_max, args.min_reps, args.workers)
    if args.format == "csv":
        sys.stdout.write(search.to_csv(records))
    elif args.format == "json":
        lines = ",\n ".join(json.dumps(record_json(r)) for r in records)
        print(f"[{lines}]" if len(records) < 2 else f"[\n {lines}\n]")
    else:
        width = max((len(str(r.c)) for r in records), default=1)
        for r in records:
            print(f"{r.c:>{width}} | {r.pairs_text()}")
        print(f"{len(records)} values", file=sys.stderr)
    return EXIT_OK


def cmd_cf(args: argparse.Namespace) -> int:
    start, cap = precision_window(args.precision_bits)
    pq = contfrac.expand(reduction.TAU_SOURCES[args.tau], args.terms, start, cap, label=args.tau)
    if pq.truncated:
        print(f"error: only {len(pq)} of {args.terms} quotients certified at {pq.precision} bits",
              file=sys.stderr)
        return EXIT_PRECISION
    convs = contfrac.convergents(pq)
    printed = reduction.PRINTED_CONVERGENTS[args.tau]
    if args.json:
        print(json.dumps({
            "tau": args.tau, "precision": pq.precision, "quotients": list(pq.quotients),
            "convergents": [{"index": c.index, "p": str(c.p), "q": str(c.q),
                             "printed": (c.p, c.q) == printed} for c in convs]}, indent=1))
        return EXIT_OK
    print(f"# tau = {args.tau}, certified at {pq.precision} bits")
    print("quotients:", " ".join(map(str, pq.quotients)))
    for c in convs:
        mark = "  <- printed pair" if (c.p, c.q) == printed else ""
        print(f"{c.index:4d}  p = {c.p}  q = {c.q}{mark}")
    return EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    chain = linforms.bound_chain()
    over = [row for row in chain.rows
            if row.deviation is not None and row.deviation > BOUND_TOLERANCE]
    if args.json:
        print(json.dumps({"rows": chain_json(chain), "n_absolute": str(chain.n_absolute),
                          "over_tolerance": [r.name for r in over]}, indent=1))
    else:
        print(f"{'quantity':28s} {'recomputed':>14s} {'printed':>12s} {'deviation':>10s}")
        for row in chain.rows:
            printed = "" if row.printed is None else f"{float(row.printed):.4g}"
            dev = "" if row.deviation is None else f"{100 * row.deviation:+.2f}%"
            print(f"{row.name:28s} {row.value.to_decimal(6):>14s} {printed:>12s} {dev:>10s}"
                  + (f"  ({row.note})" if row.note else ""))
        print(f"n < {chain.n_absolute}")
    if over:
        print("error: exceeds printed value by more than 5%: "
              + ", ".join(r.name for r in over), file=sys.stderr)
        return EXIT_BOUND
    return EXIT_OK


def cmd_reduce(args: argparse.Namespace) -> int:
    start, cap = precision_window(args.precision_bits)
    try:
        setup = reduction.prepare(precision=start, max_prec=cap)
    except (contfrac.NotReached, PrecisionExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    if args.campaign == "gamma":
        reports = list(reduction.campaign_gamma(setup, args.sign).values())
    elif args.campaign == "gamma1":
        reports = [reduction.campaign_gamma1(setup, sign=args.sign)]
    elif args.campaign == "gamma2":
        reports = [reduction.campaign_gamma2(setup, sign=args.sign)]
    else:
        reports = [reduction.campaign_gamma3(setup, sign=args.sign)]
    print(json.dumps({"M": str(setup.M), "precision": setup.precision,
                      "campaigns": [campaign_json(r, args.details) for r in reports]}, indent=1))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_UNRESOLVED


def run_pipeline(precision_bits: int | None, n_cutoff: int, workers: int = 1,
                 details: bool = False) -> dict[str, Any]:
    start, cap = precision_window(precision_bits)
    timings: dict[str, float] = {}
    cert: dict[str, Any] = {"precision": {"start": start, "cap": cap}}

    def stage(name: str):
        t0 = time.perf_counter()
        log.info("stage %s", name)
        return lambda: timings.__setitem__(name, round(time.perf_counter() - t0, 3))

    done = stage("constants")
    try:
        c = compute_constants(max(start, 64))
    except (ValueError, PrecisionExhausted) as exc:
        raise StageFailure("constants", EXIT_PRECISION, str(exc))
    cert["constants_digest"] = {
        "precision": c.precision,
        "alpha": {"value": c.alpha.to_decimal(40), "width": f"{float(c.alpha.width):.3e}"},
        "delta": {"value": c.delta.to_decimal(40), "width": f"{float(c.delta.width):.3e}"},
    }
    done()

    done = stage("bound")
    try:
        chain = linforms.bound_chain(max(min(start, 192), 64), max(cap, 64))
    except PrecisionExhausted as exc:
        raise StageFailure("bound", EXIT_PRECISION, str(exc))
    over = [r.name for r in chain.rows if r.deviation is not None and r.deviation > BOUND_TOLERANCE]
    if over:
        raise StageFailure("bound", EXIT_BOUND, "exceeds printed value: " + ", ".join(over))
    cert["absolute_bound"] = str(chain.n_absolute)
    cert["bound_chain"] = chain_json(chain)
    done()

    done = stage("reduction")
    try:
        setup = reduction.prepare(chain.n_absolute, precision=start, max_prec=cap)
        summary = reduction.run_reduction(setup)
    except (contfrac.NotReached, PrecisionExhausted) as exc:
        raise StageFailure("reduction", EXIT_PRECISION, str(exc))
    cert["campaign_reports"] = [campaign_json(r, details) for r in summary.reports]
    if not summary.ok:
        bad = [r.label for r in summary.reports if not r.ok]
        raise StageFailure("reduction", EXIT_UNRESOLVED, "unresolved parameters in " + ", ".join(bad))
    cert["convergent_start"] = setup.start
    cert["n_gap_bound"] = summary.n_gap_bound
    cert["m_gap_bound"] = summary.m_gap_bound
    cert["final_n_bound"] = summary.final_n_bound
    done()

    done = stage("search")
    report = search.verify_theorem(n_cutoff, workers)
    passed = report.passed and summary.final_n_bound <= n_cutoff
    cert["theorem_check"] = {
        "passed": passed,
        "n_cutoff": n_cutoff,
        "m_cutoff": report.m_cutoff,
        "printed_m_cutoff": search.PRINTED_M_CUTOFF,
        "values": [str(v) for v in report.values],
        "missing": [str(v) for v in report.missing],
        "extra": [str(v) for v in report.extra],
        "records": [record_json(r) for r in report.records],
    }
    done()

    cert["timings"] = timings
    cert["digest"] = certificate_digest(cert)
    return cert


def cmd_verify(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    try:
        cert = run_pipeline(args.precision_bits, args.n_cutoff, args.workers, args.details)
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(cert, fh, indent=1)
            fh.write("\n")
    check = cert["theorem_check"]
    print(f"absolute bound  n < {cert['absolute_bound']}")
    print(f"reduced bounds  n - n1 < {cert['n_gap_bound']}, m - m1 < {cert['m_gap_bound']}, "
          f"n < {cert['final_n_bound']}")
    print(f"search          n <= {check['n_cutoff']}, m <= {check['m_cutoff']}: "
          f"{len(check['values'])} values")
    print(f"theorem check   {'PASS' if check['passed'] else 'FAIL'}"
          f"  ({time.perf_counter() - t0:.1f} s, digest {cert['digest'][:16]})")
    if not check["passed"]:
        print(f"error: stage 'search' failed: missing {check['missing']}, extra {check['extra']}",
              file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_check_cert(args: argparse.Namespace) -> int:
    with open(args.path) as fh:
        cert = json.load(fh)
    digest = certificate_digest(cert)
    ok = digest == cert.get("digest")
    print(f"{'valid' if ok else 'INVALID'} digest {digest}")
    return EXIT_OK if ok else EXIT_FAIL


# -- parser ------------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _bits(text: str) -> int:
    v = int(text)
    if v < 64:
        raise argparse.ArgumentTypeError("precision must be at least 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pillai", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("search", help="list c with several representations P_m - F_n")
    s.add_argument("--m-max", type=int, default=189)
    s.add_argument("--n-max", type=int, default=300)
    s.add_argument("--min-reps", type=int, default=2)
    s.add_argument("--format", choices=("json", "csv", "table"), default="table")
    s.add_argument("--workers", type=_positive, default=1)
    s.set_defaults(func=cmd_search)

    c = sub.add_parser("cf", help="certified continued fraction of a log ratio")
    c.add_argument("--tau", choices=tuple(reduction.TAU_SOURCES), default="delta-over-alpha")
    c.add_argument("--terms", type=_positive, default=110)
    c.add_argument("--precision-bits", type=_bits)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_cf)

    b = sub.add_parser("bound", help="recompute the linear-forms bound chain")
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bound)

    r = sub.add_parser("reduce", help="run one reduction campaign")
    r.add_argument("--campaign", choices=("gamma", "gamma1", "gamma2", "gamma3"), required=True)
    r.add_argument("--sign", choices=("pos", "neg"), default="pos")
    r.add_argument("--precision-bits", type=_bits)
    r.add_argument("--details", action="store_true", help="include every certificate")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="run the whole pipeline and write a certificate")
    v.add_argument("--precision-bits", type=_bits)
    v.add_argument("--out", metavar="PATH")
    v.add_argument("--n-cutoff", type=int, default=search.PRINTED_N_CUTOFF)
    v.add_argument("--workers", type=_positive, default=1)
    v.add_argument("--details", action="store_true", help="include every certificate")
    v.set_defaults(func=cmd_verify)

    k = sub.add_parser("check-cert", help="recompute the digest of a certificate file")
    k.add_argument("path")
    k.set_defaults(func=cmd_check_cert)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
