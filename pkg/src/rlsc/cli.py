"""Command line entry point: ``rlsc {bounds,construct,verify,simulate,enumerate}``.

Exit codes: 0 success, 1 property failure, 2 usage or parse error,
3 resample budget or verification work limit exhausted.
"""

from __future__ import annotations

import argparse
import random
import secrets
import sys
from itertools import combinations

from . import __version__, bounds
from .combinatorics import ConstrainedVectorSpace, count_constrained, enumerate_constrained
from .construction import (BudgetExhausted, identity_code, moser_tardos_construct,
                           qary_construct, suggest_length)
from .group_testing import nagt_simulate, two_stage_simulate
from .io import MatrixFormatError, dumps_report, load_matrix, save_matrix, write_atomic
from .matrix import CodeParams
from .verification import (WorkLimitExceeded, check_column_weight, check_runlength,
                           is_selector_exact, is_superimposed_exact, monte_carlo_check)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _report(command: str, argv: list[str], params: dict, result: dict, status: str) -> dict:
    return {
        "tool": "rlsc",
        "version": __version__,
        "command": command,
        "argv": argv,
        "params": params,
        "status": status,
        "result": result,
    }


def _emit(args, report: dict) -> None:
    text = dumps_report(report)
    if args.report:
        write_atomic(args.report, text)
    if not args.quiet:
        sys.stdout.write(text)


def _seeded_argv(argv: list[str], args) -> list[str]:
    """Echo argv with the seed made explicit so the run can be replayed."""
    if getattr(args, "seed", None) is None:
        args.seed = secrets.randbelow(2**32)
        return argv + ["--seed", str(args.seed)]
    return argv


# -- bounds -----------------------------------------------------------------

def cmd_bounds(args, argv) -> int:
    try:
        rep = bounds.bound_report(args.k, args.n, args.d, args.p, args.w, args.method)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = rep.as_dict()
    if args.format == "table":
        if not args.quiet:
            print(f"# k={args.k} n={args.n} d={args.d} p={args.p or args.k} w={args.w or 'best'}")
            print(f"{'method':<18}{'t':>14}{'w':>6}{'q':>6}  guaranteed")
            for e in rep.entries:
                t = "-" if e.t is None else (f"{e.t:.2f}" if isinstance(e.t, float) else str(e.t))
                print(f"{e.method:<18}{t:>14}{e.w or '-':>6}{e.q or '-':>6}  {e.guaranteed}")
        if args.report:
            write_atomic(args.report, dumps_report(
                _report("bounds", argv, _echo(args), data, "ok")))
        return EXIT_OK
    _emit(args, _report("bounds", argv, _echo(args), data, "ok"))
    return EXIT_OK


def _echo(args) -> dict:
    skip = {"func", "report", "quiet", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# -- construct --------------------------------------------------------------

def _pick_w_for_t(k, n, d, p, t) -> int:
    """Weight with the smallest existence threshold among those fitting in ``t`` rows."""
    best = None
    for w in bounds.best_w_range(k, n):
        if bounds.min_feasible_length(w, d) > t:
            break
        if p == k:
            need = min(bounds.lll_min_length(k, n, d, w), bounds.union_min_length(k, n, d, w))
        else:
            need = bounds.selector_lll_min_length(k, n, d, p, w)
        if best is None or need < best[0]:
            best = (need, w)
    if best is None:
        raise UsageError(f"no weight fits in t={t} rows with d={d}")
    return best[1]


def cmd_construct(args, argv) -> int:
    argv = _seeded_argv(argv, args)
    k, n, d = args.k, args.n, args.d
    p = args.p if args.p is not None else k
    try:
        CodeParams(k=k, n=n, d=d, p=p, w=args.w, t=args.t)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.t is not None and p == k and args.method != "identity":
        lb = bounds.lower_bound(k, n, d)
        if args.t < lb:
            raise UsageError(
                f"t={args.t} is below the necessary length min{{n, 1+(k-1)(d+1)}} = {lb}; "
                f"no (k={k}, n={n}, d={d}) code exists")
    log = None
    try:
        if args.method == "identity":
            matrix = identity_code(n, k=k, d=d)
        elif args.method == "qary":
            if p != k:
                raise UsageError("the q-ary construction builds superimposed codes only (p = k)")
            matrix, log = qary_construct(k, n, d, args.seed, q=args.q, t_q=args.t_q,
                                         max_retries=args.max_retries)
        else:
            t, w = args.t, args.w
            if t is None and w is None:
                t, w = suggest_length(k, n, d, p)
            elif t is None:
                t = (min(bounds.lll_min_length(k, n, d, w), bounds.union_min_length(k, n, d, w))
                     if p == k else bounds.selector_lll_min_length(k, n, d, p, w))
            elif w is None:
                w = _pick_w_for_t(k, n, d, p, t)
            matrix, log = moser_tardos_construct(CodeParams(k=k, n=n, d=d, p=p, w=w, t=t),
                                                 args.seed, args.max_resamples)
    except BudgetExhausted as exc:
        report = _report("construct", argv, _echo(args),
                         {"error": str(exc), "log": exc.log.as_dict()}, "budget_exhausted")
        _emit(args, report)
        return EXIT_BUDGET
    result = {"t": matrix.t, "n": matrix.n, "w": matrix.params.w if matrix.params else None,
              "matrix_file": args.out, "log": log.as_dict() if log else None}
    status = "ok"
    if not args.no_verify:
        checks = [check_runlength(matrix, d)]
        if matrix.params and matrix.params.w is not None:
            checks.append(check_column_weight(matrix, matrix.params.w))
        checks.append(is_superimposed_exact(matrix, k, override=True) if p == k
                      else is_selector_exact(matrix, k, p, override=True))
        result["verification"] = [c.as_dict() for c in checks]
        status = "pass" if all(c.passed for c in checks) else "fail"
    comments = [f"seed {args.seed}", f"method {args.method}"]
    if args.out:
        save_matrix(matrix, args.out, comments)
    _emit(args, _report("construct", argv, _echo(args), result, status))
    return EXIT_OK if status != "fail" else EXIT_FAIL


# -- verify -----------------------------------------------------------------

def cmd_verify(args, argv) -> int:
    try:
        matrix = load_matrix(args.path)
    except MatrixFormatError as exc:
        raise UsageError(f"{args.path}: {exc}") from None
    except OSError as exc:
        raise UsageError(str(exc)) from None
    meta = matrix.params
    k = args.k if args.k is not None else (meta.k if meta else None)
    if k is None:
        raise UsageError("k is neither given nor recorded in the file header")
    p = args.p if args.p is not None else (meta.p if meta and meta.k == k else k)
    d = args.d if args.d is not None else (meta.d if meta else 0)
    w = args.w if args.w is not None else (meta.w if meta else None)
    if not 1 <= p <= k <= matrix.n:
        raise UsageError(f"need 1 <= p <= k <= n, got p={p}, k={k}, n={matrix.n}")
    if args.mode == "monte-carlo":
        argv = _seeded_argv(argv, args)
    checks = [check_runlength(matrix, d)]
    if w is not None:
        checks.append(check_column_weight(matrix, w))
    try:
        if args.mode == "exact":
            checks.append(is_superimposed_exact(matrix, k, args.override) if p == k
                          else is_selector_exact(matrix, k, p, args.override))
        else:
            checks.append(monte_carlo_check(matrix, k, p, args.trials, args.seed))
    except WorkLimitExceeded as exc:
        _emit(args, _report("verify", argv, _echo(args), {"error": str(exc),
              "work_estimate": exc.estimate, "work_limit": exc.limit}, "work_limit"))
        return EXIT_BUDGET
    failed = any(c.result == "fail" for c in checks) or any(
        c.result == "estimated" and c.violation_rate > 0 for c in checks)
    result = {"t": matrix.t, "n": matrix.n, "k": k, "p": p, "d": d, "w": w,
              "checks": [c.as_dict() for c in checks]}
    status = "fail" if failed else ("pass" if args.mode == "exact" else "no_violation_found")
    _emit(args, _report("verify", argv, _echo(args), result, status))
    return EXIT_FAIL if failed else EXIT_OK


# -- simulate ---------------------------------------------------------------

def _positive_sets(args, n: int, default_size: int):
    if args.positives is not None:
        for spec in args.positives:
            spec = spec.strip()
            yield [] if spec in ("", "-") else [int(x) for x in spec.split(",")]
    elif args.all_up_to is not None:
        for size in range(args.all_up_to + 1):
            yield from (list(c) for c in combinations(range(n), size))
    else:
        rng = random.Random(args.seed)
        size = default_size if args.size is None else args.size
        if size > n:
            raise UsageError(f"cannot draw {size} positives from {n} items")
        for _ in range(args.random):
            yield sorted(rng.sample(range(n), size))


def cmd_simulate(args, argv) -> int:
    try:
        matrix = load_matrix(args.path)
    except MatrixFormatError as exc:
        raise UsageError(f"{args.path}: {exc}") from None
    except OSError as exc:
        raise UsageError(str(exc)) from None
    k = args.k
    if args.random is not None:
        argv = _seeded_argv(argv, args)
    n = matrix.n
    verified = not args.unverified
    verification = None
    if verified:
        try:
            if args.mode == "nagt":
                verification = is_superimposed_exact(matrix, k, args.override)
            else:
                if 2 * k > n:
                    raise UsageError(f"two-stage mode needs n >= 2k, got n={n}, k={k}")
                verification = is_selector_exact(matrix, 2 * k, k + 1, args.override)
        except WorkLimitExceeded as exc:
            _emit(args, _report("simulate", argv, _echo(args), {"error": str(exc)}, "work_limit"))
            return EXIT_BUDGET
        if not verification.passed:
            _emit(args, _report("simulate", argv, _echo(args),
                                {"verification": verification.as_dict()}, "fail"))
            return EXIT_FAIL
    runs = []
    try:
        for P in _positive_sets(args, n, k - 1 if args.mode == "nagt" else k):
            if args.mode == "nagt":
                runs.append(nagt_simulate(matrix, k, P, verified))
            else:
                runs.append(two_stage_simulate(matrix, k, P, verified))
    except (IndexError, ValueError) as exc:
        raise UsageError(f"bad positive set: {exc}") from None
    in_contract = [r for r in runs if "out_of_contract" not in r.flags]
    aggregate = {
        "runs": len(runs),
        "exactness_rate": sum(r.exact for r in runs) / len(runs) if runs else None,
        "in_contract_exactness_rate": (sum(r.exact for r in in_contract) / len(in_contract)
                                       if in_contract else None),
        "max_candidates": max((len(r.candidates) for r in runs), default=0),
        "max_total_tests": max((r.total_tests for r in runs), default=0),
        "test_budget_t_plus_2k": matrix.t + 2 * k if args.mode == "two-stage" else matrix.t,
        "flag_counts": {f: sum(f in r.flags for r in runs)
                        for f in sorted({f for r in runs for f in r.flags})},
    }
    result = {"t": matrix.t, "n": n, "k": k, "mode": args.mode, "aggregate": aggregate,
              "verification": verification.as_dict() if verification else None,
              "reports": [r.as_dict() for r in runs]}
    status = "pass" if all(r.exact for r in in_contract) else "fail"
    _emit(args, _report("simulate", argv, _echo(args), result, status))
    return EXIT_OK if status == "pass" else EXIT_FAIL


# -- enumerate --------------------------------------------------------------

def cmd_enumerate(args, argv) -> int:
    try:
        space = ConstrainedVectorSpace(args.t, args.w, args.d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    count = count_constrained(args.t, args.w, args.d)
    shown = []
    if count:
        it = enumerate_constrained(space, budget=None)
        for _ in range(min(count, args.limit)):
            col = next(it)
            shown.append("".join(str(b) for b in col.to_list()))
    if args.format == "json" or args.report:
        report = _report("enumerate", argv, _echo(args), {"count": count, "vectors": shown}, "ok")
        if args.report:
            write_atomic(args.report, dumps_report(report))
        if args.format == "json":
            if not args.quiet:
                sys.stdout.write(dumps_report(report))
            return EXIT_OK
    if not args.quiet:
        print(f"count {count}")
        for row in shown:
            print(row)
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {s}")
    return v


def _pos(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rlsc", description=(
        "Runlength-constrained superimposed codes and selectors: bounds, "
        "construction, verification and group-testing simulation."))
    parser.add_argument("--version", action="version", version=f"rlsc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--report", help="also write the JSON report to this path")
        sp.add_argument("-q", "--quiet", action="store_true", help="print nothing on stdout")

    sp = sub.add_parser("bounds", help="length thresholds and lower bounds")
    sp.add_argument("-k", type=_pos, required=True)
    sp.add_argument("-n", type=_pos, required=True)
    sp.add_argument("-d", type=_nonneg, default=0)
    sp.add_argument("-p", type=_pos)
    sp.add_argument("-w", type=_pos, help="column weight (default: minimise over w)")
    sp.add_argument("--method", nargs="+", default=["all"],
                    choices=list(bounds.METHODS) + ["all"])
    sp.add_argument("--format", choices=["json", "table"], default="json")
    common(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("construct", help="build and certify a code matrix")
    sp.add_argument("-k", type=_pos, required=True)
    sp.add_argument("-n", type=_pos, required=True)
    sp.add_argument("-d", type=_nonneg, default=0)
    sp.add_argument("-p", type=_pos)
    sp.add_argument("-w", type=_pos)
    sp.add_argument("-t", type=_pos)
    sp.add_argument("--method", choices=["mt", "qary", "identity"], default="mt")
    sp.add_argument("--seed", type=_nonneg)
    sp.add_argument("--max-resamples", type=_pos)
    sp.add_argument("--q", type=int, help="alphabet size for --method qary")
    sp.add_argument("--t-q", type=_pos, help="q-ary rows for --method qary")
    sp.add_argument("--max-retries", type=_nonneg, default=100)
    sp.add_argument("--no-verify", action="store_true")
    sp.add_argument("-o", "--out", help="matrix file to write")
    common(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", help="check a matrix file")
    sp.add_argument("path")
    sp.add_argument("-k", type=_pos)
    sp.add_argument("-p", type=_pos)
    sp.add_argument("-d", type=_nonneg)
    sp.add_argument("-w", type=_pos)
    sp.add_argument("--mode", choices=["exact", "monte-carlo"], default="exact")
    sp.add_argument("--trials", type=_pos, default=100_000)
    sp.add_argument("--seed", type=_nonneg)
    sp.add_argument("--override", action="store_true", help="ignore the work limit")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("simulate", help="simulate group testing with a matrix file")
    sp.add_argument("path")
    sp.add_argument("--mode", choices=["nagt", "two-stage"], required=True)
    sp.add_argument("-k", type=_pos, required=True)
    pos = sp.add_mutually_exclusive_group(required=True)
    pos.add_argument("--positives", action="append",
                     help="comma-separated 0-based item indices; repeat for several sets; '-' is empty")
    pos.add_argument("--all-up-to", type=_nonneg, help="every positive set up to this size")
    pos.add_argument("--random", type=_pos, help="this many random positive sets")
    sp.add_argument("--size", type=_nonneg, help="size of random positive sets")
    sp.add_argument("--seed", type=_nonneg)
    sp.add_argument("--unverified", action="store_true", help="skip certification, flag results")
    sp.add_argument("--override", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("enumerate", help="list constrained columns in rank order")
    sp.add_argument("-t", type=_nonneg, required=True)
    sp.add_argument("-w", type=_nonneg, required=True)
    sp.add_argument("-d", type=_nonneg, default=0)
    sp.add_argument("--limit", type=_nonneg, default=100)
    sp.add_argument("--format", choices=["text", "json"], default="text")
    common(sp)
    sp.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, argv)
    except UsageError as exc:
        print(f"rlsc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

