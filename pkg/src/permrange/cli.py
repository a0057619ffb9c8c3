"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 budget.

Every subcommand builds a table (fixed column order) and emits it as
text, CSV or JSON.  JSON documents carry ``"schema": "permrange/1"`` and
write every integer as a decimal string.  CSV and text output never
contain timings or the worker count, so identical arguments give
byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from permrange.errors import BudgetExceeded, IdentityFailure, MatrixFormatError
from permrange.gap import (
    constants,
    derive_counts,
    lower_bound_report,
    main2_plugin,
    affine_transform_check,
)
from permrange.permanent import choose_engine, default_budget, laplace_expand, permanent
from permrange.permanent import permanent_injection_sum
from permrange.range_oracle import (
    construction_subset_check,
    count_gamma,
    enumerate_range,
    min_positive_permanent,
    monotonicity_check,
    upper_triangular_range,
)
from permrange.sign_matrix import (
    CountsVector,
    SignMatrix,
    make_b_matrix,
    parse_matrix,
    render_matrix,
)
from permrange.symbolic import (
    build_M_matrix,
    m_from_decomposition,
    per_b_closed_form,
    s_recursion_failures,
    verify_main_lemma,
)

SCHEMA = "permrange/1"
SUITES = ("lemma", "mobius", "laplace", "transform", "recursion", "mainlemma")
EXPERIMENTS = ("krauter", "upper-triangular", "monotonicity", "subset")




def parse_range(text):
    """'5' -> [5]; '2-4' -> [2, 3, 4]; '1,3,7' -> [1, 3, 7]."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return out


def compact_matrix(a: SignMatrix):
    """Matrix file text on one line, rows separated by ';' (accepted by ``per --inline``)."""
    return render_matrix(a).rstrip("\n").replace("\n", ";")


def _jsonable(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, SignMatrix):
        return compact_matrix(v)
    return v


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    if isinstance(v, SignMatrix):
        return compact_matrix(v)
    return str(v)


class Table:
    def __init__(self, command, columns):
        self.command = command
        self.columns = columns
        self.rows = []
        self.extra = {}
        self.failed = False

    def add(self, **row):
        self.rows.append(row)

    def render(self, fmt, config):
        if fmt == "json":
            doc = {"schema": SCHEMA, "command": self.command, "config": _jsonable(config)}
            doc["columns"] = self.columns
            doc["rows"] = [_jsonable({c: r.get(c) for c in self.columns}) for r in self.rows]
            doc.update(_jsonable(self.extra))
            return json.dumps(doc, indent=2) + "\n"
        cells = [[_cell(r.get(c)) for c in self.columns] for r in self.rows]
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.columns)
            w.writerows(cells)
            return buf.getvalue()
        widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(self.columns)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(self.columns, widths)).rstrip()]
        for r in cells:
            lines.append("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip())
        return "\n".join(lines) + "\n"


def _verdict(ok):
    return "PASS" if ok else "FAIL"


# ---------------------------------------------------------------- per


def cmd_per(args):
    if args.inline is not None:
        text = args.inline.replace(";", "\n") + "\n"
    elif args.file == "-":
        text = sys.stdin.read()
    elif args.file is None:
        raise MatrixFormatError("give a matrix file, '-' for stdin, or --inline")
    else:
        try:
            text = Path(args.file).read_text()
        except OSError as e:
            raise MatrixFormatError(str(e)) from e
    a = parse_matrix(text)
    engine = choose_engine(a, args.budget)
    value = permanent(a, args.budget, args.workers)
    t = Table("per", ["k", "n", "engine", "permanent"])
    t.add(k=a.k, n=a.n, engine=engine, permanent=value)
    if args.format == "text":
        t.render = lambda fmt, config: f"{value}\n"
    return t


# ---------------------------------------------------------------- construct


def cmd_construct(args):
    n = _one(args.n, "--n")
    if args.counts:
        counts = CountsVector(tuple(int(c) for c in args.counts.split(",")), n)
        n0 = counts.n0
    else:
        n0, counts = derive_counts(_one(args.k, "--k"), n)
    b = make_b_matrix(counts)
    t = Table("construct", ["k", "n", "n0", "counts", "matrix"])
    t.add(k=b.k, n=b.n, n0=n0, counts=list(counts.entries), matrix=b)
    if args.format == "text":
        t.render = lambda fmt, config: render_matrix(b)
    return t


# ---------------------------------------------------------------- verify


def _compositions(k, total_max):
    """All k-tuples of nonnegative ints with sum <= total_max."""
    if k == 0:
        yield ()
        return
    for first in range(total_max + 1):
        for rest in _compositions(k - 1, total_max - first):
            yield (first,) + rest


def _random_matrix(rng, k, n):
    return SignMatrix.from_code(k, n, rng.getrandbits(k * n))


def _random_counts(rng, k, n):
    left = n
    out = []
    for _ in range(k):
        c = rng.randint(0, left)
        out.append(c)
        left -= c
    rng.shuffle(out)
    return CountsVector(tuple(out), n)


def suite_lemma(k, n, args, rng):
    cases = 0
    for c in _compositions(k, n):
        counts = CountsVector(c, n)
        cases += 1
        got = per_b_closed_form(counts)
        want = permanent_injection_sum(make_b_matrix(counts), args.budget)
        if got != want:
            return cases, False, make_b_matrix(counts), f"closed form {got} != {want}"
    return cases, True, None, ""


def suite_mobius(k, n, args, rng):
    cases = 0
    for c in _compositions(k, n):
        b = make_b_matrix(CountsVector(c, n))
        cases += 1
        g = count_gamma(b, args.budget)
        if not g.holds:
            return cases, False, b, "counting identity failed"
    return cases, True, None, ""


def suite_laplace(k, n, args, rng):
    if k < 2:
        return 0, True, None, "skipped: needs k >= 2"
    for s in range(args.samples):
        a = _random_matrix(rng, k, n)
        want = permanent_injection_sum(a, args.budget)
        for i in range(k):
            got = laplace_expand(a, i, args.budget)
            if got != want:
                return s + 1, False, a, f"row {i}: {got} != {want}"
    return args.samples, True, None, ""


def suite_transform(k, n, args, rng):
    if k + 1 > n:
        return 0, True, None, "skipped: needs k + 1 <= n"
    for s in range(args.samples):
        b = make_b_matrix(_random_counts(rng, k, n))
        a = [rng.choice((1, -1)) for _ in range(n)]
        v = affine_transform_check(a, b, args.budget)
        if not v.holds:
            return s + 1, False, b, f"a={''.join('+' if x > 0 else '-' for x in a)}"
    return args.samples, True, None, ""


def cmd_verify(args):
    suite = args.suite
    ks = args.k or [3]
    rng = random.Random(args.seed)
    if suite in ("recursion", "mainlemma"):
        t = Table("verify", ["suite", "k", "n0", "cases", "verdict", "detail"])
        for k in ks:
            params = constants(k) if k >= 1 else None
            n0s = args.n0 if args.n0 is not None else range(params.d)
            for n0 in n0s:
                if suite == "recursion":
                    bad = s_recursion_failures(k, n0)
                    ok = not bad
                    detail = "" if ok else f"(ell, a) = {bad[0]}"
                    cases = sum(k - a - 1 for a in range(1, k))
                else:
                    v = verify_main_lemma(k, params.mu, n0)
                    dec = m_from_decomposition(k, params.mu, n0) == build_M_matrix(k, params.mu, n0)
                    ok = v.passed and dec
                    detail = f"rank={v.rank_p_hat} witness={v.witness}"
                    if not dec:
                        detail += " decomposition mismatch"
                    cases = 1
                t.failed |= not ok
                t.add(suite=suite, k=k, n0=n0, cases=cases, verdict=_verdict(ok), detail=detail)
        return t
    check = {"lemma": suite_lemma, "mobius": suite_mobius,
             "laplace": suite_laplace, "transform": suite_transform}[suite]
    ns = args.n or [max(ks)]
    t = Table("verify", ["suite", "k", "n", "cases", "verdict", "counterexample", "detail"])
    for k in ks:
        for n in ns:
            if not 1 <= k <= n:
                continue
            cases, ok, witness, detail = check(k, n, args, rng)
            t.failed |= not ok
            t.add(suite=suite, k=k, n=n, cases=cases, verdict=_verdict(ok),
                  counterexample=witness, detail=detail)
    return t


# ---------------------------------------------------------------- range


def cmd_range(args):
    t = Table("range", ["k", "n", "mode", "r", "min_positive", "two_adic_content",
                        "visited", "classes"])
    reports = []
    for k in args.k:
        for n in args.n:
            if not 1 <= k <= n:
                continue
            rep = enumerate_range(k, n, args.mode, args.budget, args.workers)
            reports.append(rep)
            t.add(k=k, n=n, mode=rep.mode, r=rep.r, min_positive=rep.min_positive,
                  two_adic_content=rep.two_adic_content, visited=rep.visited,
                  classes=rep.classes)
    t.extra["reports"] = [
        {"k": r.k, "n": r.n, "values": r.values, "seconds": round(r.seconds, 6),
         "witnesses": {v: compact_matrix(r.witness(v)) for v in r.values}}
        for r in reports
    ]
    if args.values_out:
        lines = [str(v) for r in reports for v in r.values]
        Path(args.values_out).write_text("\n".join(lines) + "\n")
    return t


# ---------------------------------------------------------------- bounds


def cmd_bounds(args):
    t = Table("bounds", ["k", "d_k", "N_k", "M_k", "M_k_bound", "M_k_ok", "delta_k",
                         "delta_floor", "delta_ok", "epsilon_k", "min_n_nonvacuous"])
    for k in args.k or []:
        p = constants(k)
        t.add(k=k, d_k=p.d, N_k=p.N, M_k=p.Mk, M_k_bound=p.Mk_bound,
              M_k_ok=p.Mk <= p.Mk_bound, delta_k=p.delta, delta_floor=p.delta_floor,
              delta_ok=p.delta >= p.delta_floor, epsilon_k=p.eps,
              min_n_nonvacuous=p.min_n_for_unit_side())
    if args.n:
        eps = 0.1 if args.eps is None else args.eps
        plug = []
        for n in args.n:
            m = main2_plugin(n, eps)
            plug.append({"n": n, "eps": eps, "k": m.k, "exponent": m.exponent,
                         "log_bound_exponent": m.log_bound_exponent})
        t.extra["main2"] = plug
        if not args.k:
            t.columns = ["n", "eps", "k", "exponent", "log_bound_exponent"]
            for row in plug:
                t.add(**row)
    return t


# ---------------------------------------------------------------- report


def cmd_report(args):
    k = _one(args.k, "--k")
    t = Table("report", ["k", "n", "n0", "side", "witness", "proper", "certified_count",
                         "epsilon_bound", "meets_epsilon_bound", "vacuous"])
    details = []
    for n in args.n or [300]:
        rep = lower_bound_report(k, n, side=args.side, eps=args.eps, workers=args.workers,
                                 budget=args.budget)
        sub = rep.subbox
        t.failed |= not sub.proper
        t.add(k=k, n=n, n0=sub.n0, side=sub.side, witness=list(sub.witness),
              proper=sub.proper, certified_count=rep.certified_count,
              epsilon_bound=sub.eps_bound, meets_epsilon_bound=sub.meets_eps_bound,
              vacuous=sub.vacuous)
        details.append({
            "n": n, "counts": list(sub.counts), "basis": list(sub.basis),
            "default_side": sub.default_side, "min_n_nonvacuous": sub.min_n_nonvacuous,
            "collision": None if sub.collision is None else [list(x) for x in sub.collision],
            "lower_bounds_r": f"r_{rep.rows},{n} and r_{n}", "notes": sub.notes,
            "main2": None if rep.main2 is None else vars(rep.main2),
        })
    p = constants(k)
    t.extra["constants"] = {"mu": list(p.mu), "d_k": p.d, "N_k": p.N, "M_k": p.Mk,
                            "delta_k": p.delta, "epsilon_k": p.eps}
    t.extra["details"] = details
    return t


# ---------------------------------------------------------------- experiment


def cmd_experiment(args):
    name = args.name
    if name == "krauter":
        t = Table("experiment", ["n", "observed_min_positive", "predicted", "matches", "witness"])
        for n in args.n or [2, 3, 4]:
            v = min_positive_permanent(n, allow_long=args.long, workers=args.workers)
            t.add(n=n, observed_min_positive=v.observed, predicted=v.predicted,
                  matches=v.matches, witness=v.witness)
        return t
    if name == "upper-triangular":
        t = Table("experiment", ["n", "r_upper", "r_full", "equal", "missing"])
        for n in args.n or [1, 2, 3, 4]:
            u = upper_triangular_range(n, args.workers)
            t.add(n=n, r_upper=u.report.r, r_full=len(u.full_values), equal=u.equal,
                  missing=u.missing)
        return t
    if name == "monotonicity":
        t = Table("experiment", ["k", "n", "r_k", "r_k_plus_1", "padding_samples", "verdict"])
        for k in args.k or [1, 2]:
            for n in args.n or [4]:
                if k + 1 > n:
                    continue
                v = monotonicity_check(k, n, args.samples, args.seed, workers=args.workers)
                t.failed |= not v.holds
                t.add(k=k, n=n, r_k=v.r_k, r_k_plus_1=v.r_k1, padding_samples=v.samples,
                      verdict=_verdict(v.holds))
        return t
    t = Table("experiment", ["k", "n", "construction_values", "range_size", "coverage",
                             "verdict"])
    for k in args.k or [1, 2]:
        for n in args.n or [4]:
            v = construction_subset_check(k, n, budget=args.budget, workers=args.workers)
            t.failed |= not v.holds
            t.add(k=k, n=n, construction_values=len(v.construction_values),
                  range_size=v.range_size, coverage=v.coverage, verdict=_verdict(v.holds))
    return t


# ---------------------------------------------------------------- plumbing


def _one(values, flag):
    if not values or len(values) != 1:
        raise ValueError(f"{flag} takes a single value here")
    return values[0]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=parse_range, help="k, a range lo-hi, or a list a,b,c")
    common.add_argument("--n", type=parse_range, help="n, a range lo-hi, or a list a,b,c")
    common.add_argument("--n0", type=parse_range, help="restrict n0 sweeps")
    common.add_argument("--eps", type=float, help="epsilon of the k = eps log n / log log n rule")
    common.add_argument("--side", type=int, help="sub-box side (default floor(delta_k n))")
    common.add_argument("--mode", choices=("naive", "canonical"), default="canonical")
    common.add_argument("--budget", type=int, default=None,
                        help="work budget (default $PERMRANGE_BUDGET or built-in)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=100)

    p = argparse.ArgumentParser(prog="permrange", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("per", parents=[common], help="permanent of a matrix file")
    s.add_argument("file", nargs="?")
    s.add_argument("--inline", help="matrix with rows separated by ';'")
    s.set_defaults(func=cmd_per)
    s = sub.add_parser("construct", parents=[common], help="emit a B-matrix file")
    s.add_argument("--counts", help="comma-separated n_1..n_k (default: derived from k, n)")
    s.set_defaults(func=cmd_construct)
    s = sub.add_parser("verify", parents=[common], help="run an identity suite")
    s.add_argument("suite", choices=SUITES)
    s.set_defaults(func=cmd_verify)
    s = sub.add_parser("range", parents=[common], help="exhaustive permanent range")
    s.add_argument("--values-out", help="also write the value sets, one integer per line")
    s.set_defaults(func=cmd_range)
    s = sub.add_parser("bounds", parents=[common], help="construction constants")
    s.set_defaults(func=cmd_bounds)
    s = sub.add_parser("report", parents=[common], help="certified lower bound")
    s.set_defaults(func=cmd_report)
    s = sub.add_parser("experiment", parents=[common], help="exploratory experiments")
    s.add_argument("name", choices=EXPERIMENTS)
    s.add_argument("--long", action="store_true", help="allow the n = 5 Krauter run")
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget is None:
        args.budget = default_budget()
    if args.budget <= 0 or args.workers <= 0:
        parser.error("--budget and --workers must be positive")
    config = {k: v for k, v in vars(args).items() if k not in ("func",)}
    t0 = time.perf_counter()
    try:
        table = args.func(args)
    except (MatrixFormatError, ValueError) as e:
        print(f"permrange: input error: {e}", file=sys.stderr)
        return 2
    except BudgetExceeded as e:
        print(f"permrange: {e}", file=sys.stderr)
        return 3
    except IdentityFailure as e:
        print(f"permrange: FAILED: {e}", file=sys.stderr)
        return 1
    if args.format == "json":
        table.extra["seconds"] = round(time.perf_counter() - t0, 6)
    text = table.render(args.format, config)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 1 if table.failed else 0


if __name__ == "__main__":
    sys.exit(main())
