"""Command line: ``qsubtest {list,suite,mutate,experiment,dump,report}``.

Exit codes: 0 when everything passed, 1 when a suite case failed, 2 for
usage, configuration or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import QsubError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _entry(name):
    from .benchsuite import get

    try:
        return get(name)
    except KeyError:
        raise UsageError(f"unknown benchmark {name!r} (see 'qsubtest list')") from None


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_list(args) -> int:
    from .benchsuite import catalog

    rows = [{"name": e.name, "io_type": e.io_type.value, "io_mark": e.io_mark.format(),
             "adjointable": e.is_adjointable, "experiment_scale": e.scale if e.check_mode else None}
            for e in catalog()]
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        width = max(len(r["name"]) for r in rows)
        for r in rows:
            print(f"{r['name']:<{width}}  {r['io_type']:<16}  {r['io_mark']}")
    return EXIT_OK


def cmd_suite_run(args) -> int:
    from .benchsuite import all_programs
    from .qir import parse
    from .testkit import load_suites, run_suite, suite_report, write_reports

    programs = dict(all_programs())
    for path in args.program or ():
        sub = parse(Path(path).read_text())
        programs[sub.name] = sub
    suites = load_suites(args.file)
    rng = np.random.default_rng(args.seed)
    verdicts = []
    for s in suites:
        verdicts += run_suite(s, rng, args.alpha, programs)
    summary = suite_report(verdicts)
    print(summary)
    if args.report:
        csv_path, json_path = write_reports(summary, args.report)
        print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK if summary.failed == 0 else EXIT_FAIL


def cmd_suite_export(args) -> int:
    from .benchsuite import catalog
    from .testkit import dumps_suites

    entries = catalog() if args.benchmark == "all" else [_entry(args.benchmark)]
    _emit(dumps_suites([e.suite() for e in entries]), args.out)
    return EXIT_OK


def cmd_mutate(args) -> int:
    from .mutator import MutationKind, enumerate_mutants, write_corpus

    entry = _entry(args.benchmark)
    try:
        kinds = [MutationKind(k.strip()) for k in args.kinds.split(",") if k.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    mutants = enumerate_mutants(entry.subroutine, kinds, args.limit, seed=args.seed)
    manifest = write_corpus(mutants, args.out)
    counts = {k.value: sum(m.kind is k for m in mutants) for k in kinds}
    print(f"{len(mutants)} mutants of {entry.name} ({', '.join(f'{k}={v}' for k, v in counts.items())}); "
          f"manifest {manifest}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    from .harness import load_config, run_experiment

    cfg = load_config(args.config)
    progress = (lambda msg: print(msg, file=sys.stderr)) if args.verbose else None
    report = run_experiment(cfg, jobs=args.jobs, progress=progress)
    if args.out:
        csv_path, side = report.write(args.out, append=args.append)
        print(f"wrote {csv_path} and {side}", file=sys.stderr)
    else:
        sys.stdout.write(report.to_csv())
    return EXIT_OK


def cmd_dump(args) -> int:
    from .qir import serialize
    from .testkit import dumps_suites

    entry = _entry(args.benchmark)
    text = dumps_suites([entry.suite()]) if args.suite else serialize(entry.subroutine)
    _emit(text, args.out)
    return EXIT_OK


def _suite_rows_to_json(rows) -> dict:
    head, body = rows[0], rows[1:]
    return {"cases": [dict(zip(head, r)) for r in body]}


def cmd_report(args) -> int:
    from .harness import REPORT_HEADER, report_from_csv, report_from_json

    text = Path(args.raw).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        if "rows" in doc:
            report = report_from_json(text)
            out = report.to_csv() if args.format == "csv" else json.dumps(report.to_json(), indent=2) + "\n"
        elif "cases" in doc:
            if args.format == "json":
                out = json.dumps(doc, indent=2, sort_keys=True) + "\n"
            else:
                buf = io.StringIO()
                w = csv.writer(buf, lineterminator="\n")
                w.writerow(["subroutine", "case", "verdict", "shots", "witness"])
                for c in doc["cases"]:
                    w.writerow([c.get("target", ""), c.get("check", ""), "pass" if c.get("passed") else "fail",
                                c.get("shots", ""), json.dumps(c["witness"], sort_keys=True) if c.get("witness") else ""])
                out = buf.getvalue()
        else:
            raise UsageError(f"{args.raw}: not a trigger or suite report")
    else:
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] == REPORT_HEADER:
            report = report_from_csv(text)
            out = report.to_csv() if args.format == "csv" else json.dumps(report.to_json(), indent=2) + "\n"
        elif rows and rows[0][:3] == ["subroutine", "case", "verdict"]:
            out = text if args.format == "csv" else json.dumps(_suite_rows_to_json(rows), indent=2) + "\n"
        else:
            raise UsageError(f"{args.raw}: unrecognised report header")
    _emit(out, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsubtest", description="Unit and mutation testing for quantum subroutines.")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("list", help="list the benchmark catalog")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_list)

    q = sub.add_parser("suite", help="run or export unit-test suites")
    ss = q.add_subparsers(dest="suite_command", required=True)
    r = ss.add_parser("run", help="run a suite file")
    r.add_argument("file")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--alpha", type=float, default=0.01)
    r.add_argument("--report", help="write a CSV report (and a JSON mirror) here")
    r.add_argument("--program", action="append", help="qir file replacing the same-named subroutine")
    r.set_defaults(func=cmd_suite_run)
    r = ss.add_parser("export", help="write a benchmark's default suite in suite-file format")
    r.add_argument("benchmark", help="benchmark name or 'all'")
    r.add_argument("--out")
    r.set_defaults(func=cmd_suite_export)

    q = sub.add_parser("mutate", help="write a seeded mutant corpus")
    q.add_argument("benchmark")
    q.add_argument("--kinds", default="GM,SM,CM,MM")
    q.add_argument("--limit", type=int, default=None, help="mutants per kind (default: all)")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_mutate)

    q = sub.add_parser("experiment", help="run a trigger-rate campaign")
    q.add_argument("config")
    q.add_argument("--out", help="CSV path; a JSON sidecar is written next to it")
    q.add_argument("--jobs", type=int, default=None)
    q.add_argument("--append", action="store_true", help="append rows to an existing CSV")
    q.add_argument("-v", "--verbose", action="store_true")
    q.set_defaults(func=cmd_experiment)

    q = sub.add_parser("dump", help="print a benchmark's IR (or its default suite)")
    q.add_argument("benchmark")
    q.add_argument("--suite", action="store_true")
    q.add_argument("--out")
    q.set_defaults(func=cmd_dump)

    q = sub.add_parser("report", help="convert a raw report between CSV and JSON")
    q.add_argument("raw")
    q.add_argument("--format", choices=("csv", "json"), required=True)
    q.add_argument("--out")
    q.set_defaults(func=cmd_report)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, QsubError, OSError, ValueError, KeyError) as exc:
        print(f"qsubtest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
