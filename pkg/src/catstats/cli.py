"""Command-line front end.

Subcommands:
  wenum     weight enumerator polynomials from the functional recurrences
  moments   exact moment tables (factorial, raw, central, standardized)
  average   summed pattern counts A_p(n) over the 132-avoiding family
  census    equality classes of the A_p sequences at pattern length k
  guess     fit a recurrence, algebraic equation, or closed form to a sequence file
  abnormal  asymptotic-abnormality report for a catalog statistic
  oracle    brute-force cross-checks of the recurrence catalog

Exit codes: 0 success, 1 internal invariant failure, 2 usage error,
3 guess found nothing within bounds.

Outputs are byte-stable for a fixed configuration.  Files are written
atomically; exact rationals appear as "num/den" strings, floats only in
clearly labeled rendering fields.  A relative --out path is resolved inside
$CATSTATS_OUT_DIR when that is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .abnormality import (
    DEFAULT_EPSILON,
    DEFAULT_N,
    DEFAULT_ORDER,
    DEFAULT_R,
    DEFAULT_TAU_KURT,
    DEFAULT_TAU_SKEW,
    analyze,
    analyze_table,
    binomial_control_table,
)
from .errors import UsageError
from .funcrec import builtin_families, builtin_spec, eval_full, eval_truncated
from .guessing import (
    CLOSED_FORM_PARTS,
    DEFAULT_HOLDOUT,
    fit_closed_form,
    guess_algebraic,
    guess_p_recursive,
)
from .moments import moments_from_full, moments_from_truncated
from .multipoly import coeff_to_str, norm_coeff
from .perms import (
    AV132,
    DEFAULT_ORACLE_LIMIT,
    brute_sigma_enum,
    brute_weight_enum,
    format_perm,
    parse_perm,
)
from .seqio import atomic_write_text, load_sequence, sequence_file
from .splits import AverageEngine, bona_census_123, bona_census_132

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3


# -- output plumbing -------------------------------------------------------


def _resolve_out(path: str) -> str:
    base = os.environ.get("CATSTATS_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _emit(text: str, out: "str | None") -> None:
    if out:
        dest = _resolve_out(out)
        atomic_write_text(dest, text)
        print(f"wrote {dest}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _echo(subcommand: str, config: dict) -> dict:
    return {
        "tool": "catstats",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
    }


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _header(subcommand: str, config: dict) -> str:
    pairs = " ".join(f"{k}={v}" for k, v in config.items())
    return f"# catstats {__version__} {subcommand} {pairs}\n"


def _csv_text(header_line: str, rows: "list[list[str]]") -> str:
    lines = [header_line.rstrip("\n")]
    lines += [",".join(rec) for rec in rows]
    return "\n".join(lines) + "\n"


# -- wenum -----------------------------------------------------------------


def cmd_wenum(args) -> int:
    spec = builtin_spec(args.family, args.stat)
    seq = eval_full(spec, args.n)
    kept = list(spec.variables)
    if args.vars:
        kept = [v.strip() for v in args.vars.split(",") if v.strip()]
        unknown = [v for v in kept if v not in spec.variables]
        if unknown:
            raise UsageError(
                f"unknown variables {unknown}; {spec.label} has {list(spec.variables)}"
            )
        drop = {v: 1 for v in spec.variables if v not in kept}
        if drop:
            seq = seq.specialize(drop)
    config = {
        "family": args.family,
        "stat": args.stat,
        "n": args.n,
        "vars": ",".join(kept),
    }
    if args.format == "json":
        obj = _echo("wenum", config)
        obj["variables"] = kept
        obj["rows"] = [{"n": n, "poly": str(p)} for n, p in enumerate(seq.values)]
        text = _json_text(obj)
    elif args.format == "csv":
        rows = [[str(n), f'"{p}"'] for n, p in enumerate(seq.values)]
        text = _csv_text(_header("wenum", config) + "n,poly", rows)
    else:
        lines = [_header("wenum", config).rstrip("\n")]
        head = ",".join(kept)
        for n, p in enumerate(seq.values):
            lines.append(f"P_{n}({head}) = {p}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# -- moments ---------------------------------------------------------------


def cmd_moments(args) -> int:
    spec = builtin_spec(args.family, args.stat)
    if args.mode == "full":
        seq = eval_full(spec, args.max_n)
        table = moments_from_full(seq, r_max=args.r)
    else:
        seq = eval_truncated(spec, args.max_n, cap=args.r)
        table = moments_from_truncated(seq, r_max=args.r)
    config = {
        "family": args.family,
        "stat": args.stat,
        "max_n": args.max_n,
        "r": args.r,
        "mode": args.mode,
    }
    if args.format == "json":
        obj = _echo("moments", config)
        obj["table"] = table.to_json_obj()
        text = _json_text(obj)
    elif args.format == "csv":
        text = _csv_text(
            _header("moments", config) + ",".join(table.csv_rows()[0]),
            table.csv_rows()[1:],
        )
    else:
        lines = [_header("moments", config).rstrip("\n")]
        for row in table.rows:
            cols = [f"n={row.n}", f"mass={row.f[0]}"]
            if args.r >= 1:
                cols.append(f"mean={row.m[1]}")
            if args.r >= 2:
                cols.append(f"variance={row.M[2]}")
            if row.alpha is not None:
                for r in range(3, args.r + 1):
                    cols.append(f"alpha{r}={row.alpha.float_value[r]:.6g}")
            elif row.note:
                cols.append(f"({row.note})")
            lines.append("  ".join(cols))
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# -- average ---------------------------------------------------------------


def cmd_average(args) -> int:
    patterns = [parse_perm(p) for p in args.pattern]
    engine = AverageEngine(args.max_n)
    seqs = [(format_perm(p), engine.sequence(p)) for p in patterns]
    config = {
        "family": "av132",
        "patterns": ",".join(name for name, _ in seqs),
        "max_n": args.max_n,
    }
    if args.format == "json":
        if len(seqs) == 1:
            name, values = seqs[0]
            obj = sequence_file(
                f"av132:total:{name}", values, offset=0, extra=_echo("average", config)
            ).to_json_obj()
        else:
            obj = _echo("average", config)
            obj["sequences"] = [
                sequence_file(f"av132:total:{name}", values).to_json_obj()
                for name, values in seqs
            ]
        text = _json_text(obj)
    elif args.format == "csv":
        head = "n," + ",".join(f"A_{name}" for name, _ in seqs)
        rows = [
            [str(n)] + [str(values[n]) for _, values in seqs]
            for n in range(args.max_n + 1)
        ]
        text = _csv_text(_header("average", config) + head, rows)
    else:
        lines = [_header("average", config).rstrip("\n")]
        for name, values in seqs:
            body = ", ".join(str(v) for v in values)
            lines.append(f"A_{name}(0..{args.max_n}) = {body}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# -- census ----------------------------------------------------------------


def cmd_census(args) -> int:
    if args.family == "av132":
        result = bona_census_132(args.k, prefix_len=args.prefix_len)
    else:
        result = bona_census_123(args.k, n_max=args.max_n)
    config = {"family": args.family, "k": args.k}
    if args.family == "av132":
        config["prefix_len"] = args.prefix_len
    else:
        config["max_n"] = args.max_n
    if args.format == "json":
        obj = _echo("census", config)
        obj["census"] = result.to_json_obj()
        text = _json_text(obj)
    else:
        lines = [_header("census", config).rstrip("\n")]
        lines.append(f"{result.class_count} classes at k = {args.k} ({args.family})")
        for i, cls in enumerate(result.classes, start=1):
            members = " ".join(format_perm(p) for p in cls.patterns)
            lines.append(f"class {i} (size {cls.size}): {members}")
            shown = ", ".join(str(v) for v in cls.prefix[:12])
            lines.append(f"  prefix: {shown}, ...")
        if result.caveat:
            lines.append(f"note: {result.caveat}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# -- guess -----------------------------------------------------------------


def _frac_str_list(values) -> "list[str]":
    return [coeff_to_str(norm_coeff(v)) for v in values]


def cmd_guess(args) -> int:
    seq = load_sequence(args.input)
    values = list(seq.values)
    offset = seq.offset
    notes = []
    config = {
        "kind": args.kind,
        "input": args.input,
        "name": seq.name,
        "offset": offset,
        "holdout": args.holdout,
    }
    if args.kind == "p-recursive":
        config["max_order"] = args.max_order
        config["max_degree"] = args.max_degree
        fit = guess_p_recursive(
            values,
            offset=offset,
            max_order=args.max_order,
            max_degree=args.max_degree,
            holdout=args.holdout,
        )
        if fit is None:
            print(
                f"no recurrence of order <= {args.max_order}, degree <= "
                f"{args.max_degree} fits {seq.name}",
                file=sys.stderr,
            )
            return EXIT_NOT_FOUND
        result = {
            "kind": "p-recurrence",
            "order": fit.order,
            "degree": fit.degree,
            "offset": fit.offset,
            "coefficients": [list(q) for q in fit.coeffs],
            "rendering": fit.render(),
        }
        rendering = fit.render()
    elif args.kind == "algebraic":
        if offset != 0:
            raise UsageError(
                "algebraic fitting treats the values as series coefficients "
                f"a_0, a_1, ...; {seq.name} starts at offset {offset}"
            )
        config["max_deg_y"] = args.max_deg_y
        config["max_deg_z"] = args.max_deg_z
        fit = guess_algebraic(
            values,
            max_deg_y=args.max_deg_y,
            max_deg_z=args.max_deg_z,
            holdout=args.holdout,
        )
        if fit is None:
            print(
                f"no algebraic equation with deg_y <= {args.max_deg_y}, deg_z <= "
                f"{args.max_deg_z} fits {seq.name}",
                file=sys.stderr,
            )
            return EXIT_NOT_FOUND
        solved = fit.render_solved()
        result = {
            "kind": "algebraic",
            "degree_y": fit.degree_y(),
            "degree_z": fit.degree_z(),
            "coefficients": [[[zd, yd], c] for (zd, yd), c in fit.coeffs],
            "rendering": fit.render(),
            "solved": solved,
        }
        rendering = solved or fit.render()
    else:
        config["degree"] = args.degree
        if offset == 0:
            values = values[1:]
            offset = 1
            notes.append(
                "fit starts at n = 1; the n = 0 term is outside the c(n-1) basis"
            )
        fit = fit_closed_form(
            values, offset=offset, degree=args.degree, holdout=args.holdout
        )
        if fit is None:
            print(
                f"no closed form of degree <= {args.degree} over "
                f"{{n^i 4^n, n^i c(n), n^i c(n-1), n^i}} fits {seq.name}",
                file=sys.stderr,
            )
            return EXIT_NOT_FOUND
        result = {
            "kind": "closed-form",
            "degree": fit.degree,
            "offset": fit.offset,
            "parts": {
                part: _frac_str_list(coeffs)
                for part, coeffs in zip(CLOSED_FORM_PARTS, fit.parts)
            },
            "rendering": fit.render(),
        }
        rendering = fit.render()
    if args.format == "json":
        obj = _echo("guess", config)
        obj["result"] = result
        obj["verified_terms"] = len(values)
        if notes:
            obj["notes"] = notes
        text = _json_text(obj)
    else:
        lines = [_header("guess", config).rstrip("\n"), rendering]
        lines.append(f"verified on all {len(values)} terms ({args.holdout} held out)")
        lines += [f"note: {note}" for note in notes]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# -- abnormal --------------------------------------------------------------


def cmd_abnormal(args) -> int:
    if args.family == "synthetic":
        if args.stat != "binomial":
            raise UsageError("the synthetic family only offers the binomial control")
        table = binomial_control_table(args.n_max, args.r)
        report = analyze_table(
            table,
            tau_skew=args.tau_skew,
            tau_kurt=args.tau_kurt,
            epsilon=args.epsilon,
            order=args.order,
        )
    else:
        report = analyze(
            args.family,
            args.stat,
            args.n_max,
            args.r,
            tau_skew=args.tau_skew,
            tau_kurt=args.tau_kurt,
            epsilon=args.epsilon,
            order=args.order,
        )
    config = {
        "family": args.family,
        "stat": args.stat,
        "n_max": args.n_max,
        "r": args.r,
    }
    if args.format == "json":
        obj = _echo("abnormal", config)
        obj["report"] = report.to_json_obj()
        text = _json_text(obj)
    else:
        lines = [_header("abnormal", config).rstrip("\n")]
        lines.append(f"verdict: {report.verdict}")
        lines.append(f"criterion: {report.criterion}")
        lines.append(f"checkpoints: {', '.join(str(n) for n in report.checkpoints)}")
        for ev in report.evidence:
            samples = "  ".join(f"{s.n}: {s.value:+.6f}" for s in ev.samples)
            lines.append(
                f"r={ev.r}  reference={ev.reference}  limit={ev.limit:+.6f}  "
                f"metric={ev.metric:.3g}"
            )
            lines.append(f"  alpha samples: {samples}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK


# -- oracle ----------------------------------------------------------------


def cmd_oracle(args) -> int:
    if args.max_n > args.limit:
        raise UsageError(
            f"brute force is capped at n = {args.limit}; asked for {args.max_n}"
        )
    config = {"max_n": args.max_n, "limit": args.limit}
    rows = []
    failures = []
    for family, stat in builtin_families():
        spec = builtin_spec(family, stat)
        seq = eval_full(spec, args.max_n)
        tracked = dict(spec.tracked)
        for n in range(args.max_n + 1):
            engine_poly = seq.values[n]
            if family == "av123":
                brute = brute_sigma_enum(n, limit=args.limit)
            else:
                stats = [parse_perm(tracked[v]) for v in spec.variables]
                brute = brute_weight_enum(
                    AV132, stats, n, spec.variables, limit=args.limit
                )
            if engine_poly != brute:
                failures.append((spec.label, n, str(engine_poly), str(brute)))
                break
        else:
            rows.append((spec.label, args.max_n, "ok"))
    if args.format == "json":
        obj = _echo("oracle", config)
        obj["checks"] = [
            {"spec": label, "max_n": n, "status": status} for label, n, status in rows
        ]
        obj["failures"] = [
            {"spec": label, "n": n, "engine": eng, "brute_force": bf}
            for label, n, eng, bf in failures
        ]
        text = _json_text(obj)
    else:
        lines = [_header("oracle", config).rstrip("\n")]
        for label, n, status in rows:
            lines.append(f"{label:12s} n <= {n}  {status}")
        for label, n, eng, bf in failures:
            lines.append(f"{label:12s} MISMATCH at n = {n}")
            lines.append(f"  engine:      {eng}")
            lines.append(f"  brute force: {bf}")
        if not failures:
            lines.append(f"all {len(rows)} catalog specs match brute force")
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    if failures:
        print("oracle mismatch: the recurrence engine disagrees with brute force",
              file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def _add_common(p, formats=("text", "json", "csv")) -> None:
    p.add_argument("--format", choices=formats, default="text")
    p.add_argument("--out", help="write to this file (atomic) instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="catstats",
        description="Exact pattern statistics on 132- and 123-avoiding permutations.",
    )
    ap.add_argument("--version", action="version", version=f"catstats {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("wenum", help="weight enumerator polynomials P_0..P_n")
    p.add_argument("--family", required=True, choices=["av132", "av123"])
    p.add_argument("--stat", required=True, help="pattern whose count t tracks")
    p.add_argument("--n", type=int, required=True)
    p.add_argument(
        "--vars",
        help="comma-separated variables to keep (others set to 1); "
        "default keeps the full joint enumerator",
    )
    _add_common(p)
    p.set_defaults(fn=cmd_wenum)

    p = sub.add_parser("moments", help="exact moment table of a catalog statistic")
    p.add_argument("--family", required=True, choices=["av132", "av123"])
    p.add_argument("--stat", required=True)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--r", type=int, default=4, help="highest moment order")
    p.add_argument("--mode", choices=["truncated", "full"], default="truncated")
    _add_common(p)
    p.set_defaults(fn=cmd_moments)

    p = sub.add_parser("average", help="summed pattern counts A_p(n) on av132")
    p.add_argument("--pattern", action="append", required=True,
                   help="pattern like 213; repeat for several")
    p.add_argument("--max-n", type=int, default=30)
    _add_common(p)
    p.set_defaults(fn=cmd_average)

    p = sub.add_parser("census", help="equality classes of A_p at pattern length k")
    p.add_argument("--family", choices=["av132", "av123"], default="av132")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--prefix-len", type=int, default=30,
                   help="av132: sequence prefix length used for classing")
    p.add_argument("--max-n", type=int, default=9,
                   help="av123: brute-force range for classing")
    _add_common(p, formats=("text", "json"))
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("guess", help="fit an equation to a sequence file")
    p.add_argument("--kind", required=True,
                   choices=["p-recursive", "algebraic", "closed-form"])
    p.add_argument("--input", required=True, help="sequence JSON file")
    p.add_argument("--max-order", type=int, default=6)
    p.add_argument("--max-degree", type=int, default=6)
    p.add_argument("--max-deg-y", type=int, default=4)
    p.add_argument("--max-deg-z", type=int, default=12)
    p.add_argument("--degree", type=int, default=3,
                   help="closed-form: highest power of n in the basis")
    p.add_argument("--holdout", type=int, default=DEFAULT_HOLDOUT)
    _add_common(p, formats=("text", "json"))
    p.set_defaults(fn=cmd_guess)

    p = sub.add_parser("abnormal", help="asymptotic-abnormality report")
    p.add_argument("--family", required=True,
                   choices=["av132", "av123", "synthetic"])
    p.add_argument("--stat", required=True,
                   help="catalog statistic, or 'binomial' for the synthetic control")
    p.add_argument("--n-max", type=int, default=DEFAULT_N)
    p.add_argument("--r", type=int, default=DEFAULT_R)
    p.add_argument("--tau-skew", type=float, default=DEFAULT_TAU_SKEW)
    p.add_argument("--tau-kurt", type=float, default=DEFAULT_TAU_KURT)
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER,
                   help="depth of the 1/n-power elimination")
    _add_common(p, formats=("text", "json"))
    p.set_defaults(fn=cmd_abnormal)

    p = sub.add_parser("oracle", help="cross-check the catalog against brute force")
    p.add_argument("action", choices=["verify"])
    p.add_argument("--max-n", type=int, default=10)
    p.add_argument("--limit", type=int, default=DEFAULT_ORACLE_LIMIT,
                   help="hard cap on brute-force length")
    _add_common(p, formats=("text", "json"))
    p.set_defaults(fn=cmd_oracle)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
