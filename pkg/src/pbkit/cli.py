"""Command-line front end.

Exit codes: 0 success, 1 validation errors found, 2 file could not be parsed
(or, for ``outcome``, is not fit for aggregation), 64 usage error, 66 input
file missing or unreadable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import fields

from pbkit import generator, rules
from pbkit.parser import parse, serialize_canonical
from pbkit.summary import summarize
from pbkit.validator import ERROR, format_report, summarize_counts, validate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_UNPARSEABLE = 2
EXIT_USAGE = 64
EXIT_NOINPUT = 66

VARIANTS = {"skip": rules.GreedyVariant.SKIP_UNAFFORDABLE, "stop": rules.GreedyVariant.STOP_AT_FIRST_UNAFFORDABLE}
TIE_BREAKS = {
    "id": rules.TieBreak.BY_PROJECT_ID_ASCENDING,
    "cost": rules.TieBreak.BY_COST_ASCENDING_THEN_ID,
    "input": rules.TieBreak.BY_INPUT_ORDER,
}


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="pbkit", description="Parse, validate and aggregate .pb participatory budgeting files")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_ArgumentParser)

    v = sub.add_parser("validate", help="report constraint violations")
    v.add_argument("file")
    v.add_argument("--format", choices=("text", "json"), default="text")

    i = sub.add_parser("info", help="summarize an instance")
    i.add_argument("file")
    i.add_argument("--format", choices=("text", "json"), default="text")
    i.add_argument("--plot", metavar="PATH", help="also write a cost/vote-length figure")

    o = sub.add_parser("outcome", help="run the greedy rule")
    o.add_argument("file")
    o.add_argument("--variant", choices=tuple(VARIANTS), default="skip")
    o.add_argument("--tie-break", choices=tuple(TIE_BREAKS), default="id")
    o.add_argument("--format", choices=("json", "text", "csv"), default="json")
    o.add_argument("--plot", metavar="PATH", help="also write a score/budget figure")

    c = sub.add_parser("canonicalize", help="rewrite a file in canonical form")
    c.add_argument("file")
    c.add_argument("-o", "--output")

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--spec", metavar="JSON", help="generator spec as a JSON file; flags override it")
    g.add_argument("--vote-type", choices=("approval", "ordinal", "cumulative", "scoring"))
    g.add_argument("--num-projects", type=int)
    g.add_argument("--num-votes", type=int)
    g.add_argument("--budget", type=int, nargs=2, metavar=("MIN", "MAX"), dest="budget_range")
    g.add_argument("--cost", type=int, nargs=2, metavar=("MIN", "MAX"), dest="cost_range")
    g.add_argument("--points", type=int, nargs=2, metavar=("MIN", "MAX"), dest="point_range")
    g.add_argument("--min-length", type=int)
    g.add_argument("--max-length", type=int)
    g.add_argument("--max-sum-points", type=int)
    g.add_argument("--mutation")
    g.add_argument("--seed", type=int)
    g.add_argument("--plain", action="store_true", help="omit optional columns and META keys")
    g.add_argument("-o", "--output")
    return parser


def _read(path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc.strerror}") from exc


def _load(path, err):
    result = parse(_read(path))
    if result.instance is None:
        for d in result.diagnostics:
            print(f"{path}:{d}", file=err)
    return result


def _write(text: str, output, out) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)


def cmd_validate(args, out, err) -> int:
    result = _load(args.file, err)
    if result.instance is None:
        return EXIT_UNPARSEABLE
    violations = validate(result.instance)
    if args.format == "json":
        errors, warnings = summarize_counts(violations)
        doc = {
            "file": args.file,
            "errors": errors,
            "warnings": warnings,
            "violations": [v.to_dict() for v in violations],
        }
        out.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(format_report(violations))
    return EXIT_INVALID if any(v.severity == ERROR for v in violations) else EXIT_OK


def cmd_info(args, out, err) -> int:
    result = _load(args.file, err)
    if result.instance is None:
        return EXIT_UNPARSEABLE
    summary = summarize(result.instance)
    if args.format == "json":
        out.write(json.dumps(summary.to_dict(), indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(summary.to_text())
    if args.plot:
        from pbkit.plotting import plot_summary

        plot_summary(result.instance, args.plot)
    return EXIT_OK


def _outcome_text(outcome) -> str:
    doc = rules.outcome_to_dict(outcome)
    lines = [
        f"variant: {doc['variant']}",
        f"tie_break: {doc['tie_break']}",
        "scores: " + ", ".join(f"{pid}:{doc['scores'][pid]}" for pid in doc["ranking"]),
        "funded: " + ", ".join(doc["funded"]),
        f"spent: {doc['spent']} of {doc['budget']}",
        f"remaining: {doc['remaining']}",
    ]
    lines += [f"skipped: {s['project_id']} ({s['reason']})" for s in doc["skipped"]]
    return "\n".join(lines) + "\n"


def _outcome_csv(outcome) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=";", lineterminator="\n")
    writer.writerow(["rank", "project_id", "score", "cost", "remaining_before", "action"])
    for rank, (pid, score, cost, before, action) in enumerate(outcome.steps, start=1):
        writer.writerow([rank, pid, format(score, "f"), format(cost, "f"), format(before, "f"), action])
    return buf.getvalue()


def cmd_outcome(args, out, err) -> int:
    result = _load(args.file, err)
    if result.instance is None:
        return EXIT_UNPARSEABLE
    try:
        outcome = rules.greedy_outcome(result.instance, VARIANTS[args.variant], TIE_BREAKS[args.tie_break])
    except rules.ValidationRequired as exc:
        for v in exc.violations:
            print(f"{args.file}: {v}", file=err)
        return EXIT_UNPARSEABLE
    except rules.RuleError as exc:
        print(f"{args.file}: {exc}", file=err)
        return EXIT_UNPARSEABLE
    if args.format == "json":
        out.write(json.dumps(rules.outcome_to_dict(outcome), indent=2, ensure_ascii=False) + "\n")
    elif args.format == "csv":
        out.write(_outcome_csv(outcome))
    else:
        out.write(_outcome_text(outcome))
    if args.plot:
        from pbkit.plotting import plot_outcome

        plot_outcome(outcome, result.instance, args.plot)
    return EXIT_OK


def cmd_canonicalize(args, out, err) -> int:
    result = _load(args.file, err)
    if result.instance is None:
        return EXIT_UNPARSEABLE
    _write(serialize_canonical(result.instance), args.output, out)
    return EXIT_OK


def spec_from_args(args) -> generator.GeneratorSpec:
    settings = {}
    if args.spec:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.spec}: not valid JSON ({exc})") from exc
        known = {f.name for f in fields(generator.GeneratorSpec)}
        unknown = set(loaded) - known
        if unknown:
            raise UsageError(f"{args.spec}: unknown spec fields {sorted(unknown)}")
        settings.update({k: tuple(v) if isinstance(v, list) else v for k, v in loaded.items()})
    for name in (
        "vote_type",
        "num_projects",
        "num_votes",
        "budget_range",
        "cost_range",
        "point_range",
        "min_length",
        "max_length",
        "max_sum_points",
        "mutation",
        "seed",
    ):
        value = getattr(args, name)
        if value is not None:
            settings[name] = tuple(value) if isinstance(value, list) else value
    if args.plain:
        settings["decorate"] = False
    try:
        return generator.GeneratorSpec(**settings)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_generate(args, out, err) -> int:
    spec = spec_from_args(args)
    try:
        instance = generator.generate_random_instance(spec)
    except generator.InfeasibleSpec as exc:
        raise UsageError(f"infeasible spec: {exc}") from exc
    _write(serialize_canonical(instance), args.output, out)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "info": cmd_info,
    "outcome": cmd_outcome,
    "canonicalize": cmd_canonicalize,
    "generate": cmd_generate,
}


def run(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.cmd](args, out, err)
    except UsageError as exc:
        parser.print_usage(err)
        print(f"pbkit: error: {exc}", file=err)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"pbkit: {exc}", file=err)
        return EXIT_NOINPUT


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
