"""Command-line front end.

Exit codes: 0 success, 2 input or usage error, 3 internal identity violation
(two computation routes disagreed), 4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

from . import __version__
from .distribution import from_records
from .errors import InputError, MuredError, PathMismatch
from .ingest import WindowSpec, measure_series, read_delimited, time_key
from .measures import MEASURES, canonical_measure, measure_report
from .synth import KIND_ALIASES, KINDS, GeneratorSpec, generate, oracle_measure

SCHEMA_VERSION = "1"
ORACLE_TOL = 1e-9

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL, EXIT_ORACLE = 0, 2, 3, 4

log = logging.getLogger("mured")


def _num(value):
    """Round to 15 significant digits; -0.0 becomes 0.0."""
    if value is None:
        return None
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value
    value = float(f"{float(value):.15g}")
    return 0.0 if value == 0 else value


def _render_numbers(obj):
    if isinstance(obj, dict):
        return {k: _render_numbers(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_render_numbers(v) for v in obj]
    if isinstance(obj, float):
        return _num(obj)
    return obj


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(_num(value))
    return str(value)


def _record(command, inputs, results, warnings=()):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": _render_numbers(list(results)),
        "warnings": list(warnings),
    }


def _dump_json(record) -> str:
    return json.dumps(record, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _split(text):
    if text is None:
        return ()
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _delimiter(args):
    return "\t" if args.tab else args.delimiter


def _schema(args):
    if not getattr(args, "schema", None):
        return None
    try:
        with open(args.schema, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot load schema {args.schema!r}: {exc}") from exc
    if not isinstance(data, dict) or not all(isinstance(v, list) for v in data.values()):
        raise InputError("schema must be a JSON object mapping column names to label lists")
    return {k: [str(x) for x in v] for k, v in data.items()}


def _load(args, time_column=None):
    return read_delimited(
        args.input,
        delimiter=_delimiter(args),
        has_header=not args.no_header,
        declared_alphabets=_schema(args),
        time_column=time_column,
        time_order=getattr(args, "time_order", "auto"),
    )


def _emit(args, record, csv_header=None, csv_rows=None):
    if getattr(args, "format", "json") == "csv" and csv_header is not None:
        sys.stdout.write(_dump_csv(csv_header, csv_rows))
    else:
        sys.stdout.write(_dump_json(record))


# ---------------------------------------------------------------------------
# commands


def cmd_describe(args) -> int:
    data = _load(args, args.time_col)
    alph = data.observed_alphabets()
    cards = {c: len(alph[c]) for c in data.columns}
    result = {"columns": list(data.columns), "rows": len(data), "cardinalities": cards}
    if args.time_col and data.rows:
        values = data.column(args.time_col)
        ordered = sorted(set(values), key=time_key(values, data.time_order))
        result["time_range"] = {"min": ordered[0], "max": ordered[-1]}
    inputs = {"input": args.input, "time_col": args.time_col}
    record = _record("describe", inputs, [result])
    _emit(
        args,
        record,
        ["column", "cardinality"],
        [(c, cards[c]) for c in data.columns],
    )
    return EXIT_OK


def _measure_inputs(args, extra=None):
    out = {
        "input": args.input,
        "measure": canonical_measure(args.measure),
        "vars": list(_split(args.vars)),
        "given": list(_split(args.given)),
        "base": _num(args.base),
        "weighted": args.weighted,
        "explain": bool(args.explain),
    }
    out.update(extra or {})
    return out


def _report_rows(prefix, rep):
    d = rep.to_dict()
    head = list(prefix) + [
        d["measure"],
        " ".join(d["variables"]),
        " ".join(d.get("given", [])),
        d["log_base"],
        d["observation_count"],
    ]
    rows = [head + ["value", d["value"]]]
    for term, v in (d.get("terms") or {}).items():
        rows.append(head + [term, v])
    return rows


REPORT_COLUMNS = ["measure", "variables", "given", "log_base", "observation_count", "term", "value"]


def cmd_measure(args) -> int:
    variables = _split(args.vars)
    given = _split(args.given)
    if not variables:
        raise InputError("--vars is required")
    data = _load(args)
    dist = from_records(data, variables + given, weight_column=args.weighted)
    rep = measure_report(
        dist, args.measure, variables, given=given, base=args.base, explain=args.explain
    )
    record = _record("measure", _measure_inputs(args), [rep.to_dict()], rep.warnings)
    _emit(args, record, REPORT_COLUMNS, _report_rows((), rep))
    return EXIT_OK


def cmd_series(args) -> int:
    variables = _split(args.vars)
    given = _split(args.given)
    if not variables:
        raise InputError("--vars is required")
    data = _load(args, args.time_col)
    spec = WindowSpec(args.window, args.step)
    series = measure_series(
        data,
        variables,
        args.measure,
        spec,
        given=given,
        base=args.base,
        weight_column=args.weighted,
        per_window_alphabets=args.window_alphabets,
        explain=args.explain,
        max_workers=args.jobs,
    )
    warnings = [f"window {g} has no rows; skipped" for g in series.gaps]
    results = []
    rows = []
    for label, rep in series.points:
        warnings.extend(f"window {label}: {w}" for w in rep.warnings)
        results.append({"window": label, **rep.to_dict()})
        rows.extend(_report_rows((label,), rep))
    inputs = _measure_inputs(
        args,
        {
            "time_col": args.time_col,
            "window": spec.width,
            "step": spec.step,
            "window_alphabets": bool(args.window_alphabets),
        },
    )
    record = _record("series", inputs, results, warnings)
    _emit(args, record, ["window"] + REPORT_COLUMNS, rows)
    return EXIT_OK


def _spec_from_args(args) -> GeneratorSpec:
    cards = tuple(int(c) for c in _split(args.cards)) if args.cards else None
    try:
        return GeneratorSpec(
            kind=args.kind,
            arity=args.arity,
            cardinalities=cards,
            noise=args.noise,
            seed=args.seed,
            sparsity=args.sparsity,
        )
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from exc


def weight_table(dist) -> str:
    """Exact-weight table: one row per support cell plus a ``weight`` column."""
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(dist.variables) + ["weight"])
    for labels, p in sorted(dist.labelled().items(), key=lambda kv: tuple(map(str, kv[0]))):
        w.writerow([str(v) for v in labels] + [repr(p)])
    return buf.getvalue()


def cmd_synth(args) -> int:
    dist = generate(_spec_from_args(args))
    text = weight_table(dist)
    if args.out:
        try:
            with open(args.out, "w", newline="", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.out!r}: {exc}") from exc
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _oracle_plan(dist, measure, variables, given):
    """(measure, vars, given) triples to check."""
    names = variables or dist.variables
    n = len(names)
    if measure != "all":
        m = canonical_measure(measure)
        if m == "tcond" and not given:
            return [(m, names[:2], names[2:])]
        return [(m, names, given)]
    plan = [("entropy", names, ()), ("t", names, ()), ("q", names, ()), ("y", names, ())]
    if n >= 2:
        plan.append(("r", names, ()))
    if any(dist.alphabet(v).cardinality > 1 for v in names):
        plan.append(("rfrac", names, ()))
    if n >= 3:
        plan.append(("tcond", names[:2], names[2:]))
        plan.append(("ii", names, ()))
    return plan


def cmd_oracle_check(args) -> int:
    variables = _split(args.vars)
    given = _split(args.given)
    if args.input:
        data = _load(args)
        cols = variables + given or tuple(c for c in data.columns if c != args.weighted)
        dist = from_records(data, cols, weight_column=args.weighted)
        source = {"input": args.input, "weighted": args.weighted}
    elif args.kind:
        spec = _spec_from_args(args)
        dist = generate(spec)
        source = {
            "kind": spec.kind,
            "cards": list(spec.cards()),
            "noise": _num(spec.noise),
            "seed": spec.seed,
            "sparsity": _num(spec.sparsity),
        }
    else:
        raise InputError("oracle-check needs an input file or --kind")

    results = []
    ok = True
    for m, vs, gs in _oracle_plan(dist, args.measure, variables, given):
        main = measure_report(dist, m, vs, given=gs, base=args.base).value
        ref = oracle_measure(dist, m, vs, gs, base=args.base)
        diff = abs(main - ref)
        passed = diff <= ORACLE_TOL
        ok &= passed
        results.append(
            {
                "measure": m,
                "variables": list(vs),
                "given": list(gs),
                "main": main,
                "oracle": ref,
                "difference": diff,
                "ok": passed,
            }
        )
    inputs = dict(source, measure=args.measure, vars=list(variables), given=list(given), base=_num(args.base))
    record = _record("oracle-check", inputs, results)
    _emit(
        args,
        record,
        ["measure", "variables", "given", "main", "oracle", "difference", "ok"],
        [
            (r["measure"], " ".join(r["variables"]), " ".join(r["given"]), r["main"], r["oracle"], r["difference"], r["ok"])
            for r in results
        ],
    )
    return EXIT_OK if ok else EXIT_ORACLE


# ---------------------------------------------------------------------------
# parser

MEASURE_HELP = "; ".join(f"{k}: {v}" for k, v in MEASURES.items())


def _input_options(p, positional=True):
    if positional:
        p.add_argument("input", help="delimited input file")
    p.add_argument("--delimiter", default=",", help="field delimiter (default ',')")
    p.add_argument("--tab", action="store_true", help="tab-delimited input")
    p.add_argument("--no-header", action="store_true", help="first row is data; columns are c0..cK")
    p.add_argument("--schema", help="JSON file declaring category lists per column")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _measure_options(p, default_measure=None):
    p.add_argument("--vars", help="comma-separated variables")
    p.add_argument(
        "--measure",
        required=default_measure is None,
        default=default_measure,
        help=MEASURE_HELP,
    )
    p.add_argument("--given", help="comma-separated conditioning variables (tcond)")
    p.add_argument("--base", type=float, default=2.0, help="logarithm base (default 2, bits)")
    p.add_argument("--weighted", metavar="COL", help="column of row weights (counts, may be fractional)")
    p.add_argument("--explain", action="store_true", help="include component entropies")


def _generator_options(p, required):
    kinds = sorted(set(KINDS) | set(KIND_ALIASES))
    p.add_argument("--kind", choices=kinds, required=required)
    p.add_argument("--arity", type=int, default=3)
    p.add_argument("--cards", help="comma-separated cardinalities (overrides --arity)")
    p.add_argument("--noise", type=float, default=0.0, help="flip probability (latent)")
    p.add_argument("--seed", type=int, default=0, help="seed (random)")
    p.add_argument("--sparsity", type=float, default=0.0, help="zero-cell fraction (random)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mured",
        description="Entropy statistics, transmission and mutual redundancy for categorical data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="columns, row count, cardinalities")
    _input_options(p)
    p.add_argument("--time-col")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("measure", help="one measure on one variable set")
    _input_options(p)
    _measure_options(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("series", help="one measure per time window")
    _input_options(p)
    _measure_options(p)
    p.add_argument("--time-col", required=True)
    p.add_argument("--time-order", choices=("auto", "numeric", "lexical"), default="auto")
    p.add_argument("--window", type=int, default=1, help="window width in time labels")
    p.add_argument("--step", type=int, default=None, help="window step (default: width)")
    p.add_argument(
        "--window-alphabets",
        action="store_true",
        help="use each window's own observed categories instead of the whole file's",
    )
    p.add_argument("--jobs", type=int, default=None, help="parallel workers for windows")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("synth", help="write a generated distribution as a weight table")
    _generator_options(p, required=True)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("oracle-check", help="compare a measure with the brute-force oracle")
    p.add_argument("input", nargs="?", help="delimited input file (or use --kind)")
    _input_options(p, positional=False)
    _measure_options(p, default_measure="all")
    _generator_options(p, required=False)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def _configure_logging():
    level = os.environ.get("MURED_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PathMismatch as exc:
        print(f"mured: internal identity violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (MuredError, ValueError) as exc:
        print(f"mured: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
