"""Suite files: one YAML document per subroutine.

```yaml
subroutine: GenQInt
io_mark: "GenQInt : (n, x) -> (q:qs')"
partitions: {x: [zero, nonzero]}
combination: ECC
cases:
  - name: x23
    classical: {x: 23}
    lengths: {qs: 6}
    expect_quantum:
      qs': {check: measure, expect: {equals: 23}}
    repetitions: 10
```
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import yaml

from ..errors import ConfigError
from .cases import SuiteSummary, TestCase, run_case, suite_report
from .iomark import IOMark, format_io_mark, parse_io_mark
from .partition import Partition


@dataclass
class Suite:
    subroutine: str
    io_mark: IOMark
    cases: list
    partitions: dict = field(default_factory=dict)
    combination: Optional[str] = None

    def partition_objects(self) -> list:
        return [Partition.of(var, *labels) for var, labels in self.partitions.items()]

    def to_spec(self) -> dict:
        out = {"subroutine": self.subroutine, "io_mark": format_io_mark(self.io_mark)}
        if self.partitions:
            out["partitions"] = {k: list(v) for k, v in self.partitions.items()}
        if self.combination:
            out["combination"] = self.combination
        out["cases"] = [c.to_spec() for c in self.cases]
        return out


def suite_from_spec(doc: Mapping) -> Suite:
    try:
        mark = parse_io_mark(doc["io_mark"])
        if mark.program != doc["subroutine"]:
            raise ConfigError(f"IO mark names {mark.program}, document is for {doc['subroutine']}")
        cases = [TestCase.from_spec(c) for c in doc.get("cases") or []]
    except KeyError as exc:
        raise ConfigError(f"suite document lacks {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad suite document for {doc.get('subroutine')}: {exc}") from None
    return Suite(doc["subroutine"], mark, cases, dict(doc.get("partitions") or {}), doc.get("combination"))


def loads_suites(text: str) -> list:
    try:
        docs = [d for d in yaml.safe_load_all(text) if d is not None]
    except yaml.YAMLError as exc:
        raise ConfigError(f"suite file is not valid YAML: {exc}") from None
    return [suite_from_spec(d) for d in docs]


def load_suites(path) -> list:
    return loads_suites(Path(path).read_text())


def dumps_suites(suites) -> str:
    return yaml.safe_dump_all([s.to_spec() for s in suites], sort_keys=False)


def run_suite(suite: Suite, rng, alpha: float = 0.01, programs: Optional[Mapping] = None) -> list:
    """Verdicts for every case of ``suite``; the subroutine is looked up by name."""
    if programs is None:
        from ..benchsuite import programs as bp

        programs = bp.all_programs()
    if suite.subroutine not in programs:
        raise ConfigError(f"unknown subroutine {suite.subroutine!r}")
    sub = programs[suite.subroutine]
    return [run_case(sub, case, rng, alpha) for case in suite.cases]


def report_csv(summary: SuiteSummary) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(summary.csv_rows())
    return buf.getvalue()


def report_json(summary: SuiteSummary) -> str:
    return json.dumps(summary.to_json(), indent=2, sort_keys=True, default=str)


def write_reports(summary: SuiteSummary, csv_path) -> tuple:
    """CSV report plus a JSON mirror next to it (same stem, ``.json``)."""
    csv_path = Path(csv_path)
    json_path = csv_path.with_suffix(".json")
    csv_path.write_text(report_csv(summary))
    json_path.write_text(report_json(summary))
    return csv_path, json_path


__all__ = [
    "Suite", "dumps_suites", "load_suites", "loads_suites", "report_csv", "report_json",
    "run_suite", "suite_from_spec", "suite_report", "write_reports",
]
