"""Trigger-rate campaigns: enumerate mutants, run single-shot trials, aggregate.

Config files are flat ``key = value`` text; ``#`` starts a comment::

    benchmarks = QFT:6, CRk:2, Empty:10   # name[:n]; n defaults to the catalog scale
    kinds = GM, SM, CM, MM
    limit_per_kind = 12                   # or per kind: limits = GM:20, SM:16
    inputs = CI, RTI, CSI
    trials_per_n = 100                    # trials per mutant = trials_per_n * n
    trials_per_mutant = 600               # optional, overrides trials_per_n
    seed = 2024
    jobs = 1                              # default: $QSUBTEST_JOBS, else 1

Every trial draws from ``default_rng([seed, benchmark tag, n, mutant id,
input index, trial])``, so reports do not depend on scheduling or job count.
"""

from __future__ import annotations

import csv
import io
import json
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .mutator import ALL_KINDS, Mutant, MutationKind, TrialRunner, enumerate_mutants
from .simcore import MAX_QUBITS
from .stateprep import InputKind

REPORT_HEADER = ["benchmark", "n", "kind", "input", "mutants", "trials", "triggers", "rate"]
JOBS_ENV = "QSUBTEST_JOBS"
EXPERIMENT_INPUTS = (InputKind.CI, InputKind.RTI, InputKind.CSI)


@dataclass(frozen=True)
class ExperimentConfig:
    benchmarks: Tuple[Tuple[str, int], ...]
    kinds: Tuple[str, ...] = tuple(k.value for k in ALL_KINDS)
    limits: Tuple[Tuple[str, Optional[int]], ...] = ()
    inputs: Tuple[str, ...] = tuple(k.value for k in EXPERIMENT_INPUTS)
    trials_per_n: int = 100
    trials_per_mutant: Optional[int] = None
    seed: int = 0
    jobs: Optional[int] = None

    def __post_init__(self):
        from .benchsuite import get

        if not self.benchmarks:
            raise ConfigError("no benchmarks configured")
        for name, n in self.benchmarks:
            try:
                entry = get(name)
            except KeyError:
                raise ConfigError(f"unknown benchmark {name!r}") from None
            if entry.check_mode is None:
                raise ConfigError(f"{name} has no single-shot trigger check")
            if not 1 <= n:
                raise ConfigError(f"scale of {name} must be positive")
            size = entry.layout_binding(n).layout(entry.subroutine, n).n_qubits
            if size > MAX_QUBITS:
                raise ConfigError(f"{name} at n={n} needs {size} qubits, cap is {MAX_QUBITS}")
        for k in self.kinds:
            _enum(MutationKind, k, "mutation kind")
        for k in self.inputs:
            if _enum(InputKind, k, "input kind") not in EXPERIMENT_INPUTS:
                raise ConfigError(f"input kind must be one of CI, RTI, CSI, got {k}")
        if self.trials_per_n < 1 or (self.trials_per_mutant is not None and self.trials_per_mutant < 1):
            raise ConfigError("trials per mutant must be at least 1")
        if self.jobs is not None and self.jobs < 1:
            raise ConfigError("jobs must be at least 1")

    def trials(self, n: int) -> int:
        return self.trials_per_mutant if self.trials_per_mutant is not None else self.trials_per_n * n

    def limit(self, kind: str) -> Optional[int]:
        return dict(self.limits).get(kind, dict(self.limits).get("*"))

    def to_json(self) -> dict:
        d = asdict(self)
        d["benchmarks"] = [f"{b}:{n}" for b, n in self.benchmarks]
        d["limits"] = {k: v for k, v in self.limits}
        d["kinds"] = list(self.kinds)
        d["inputs"] = list(self.inputs)
        return d


def _enum(cls, value, what):
    try:
        return cls(value)
    except ValueError:
        raise ConfigError(f"unknown {what} {value!r}") from None


def _int(key, value):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None


def _items(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` config format (see module docstring)."""
    from .benchsuite import get

    raw: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    known = {"benchmarks", "kinds", "limit_per_kind", "limits", "inputs", "trials_per_n", "trials_per_mutant",
             "seed", "jobs"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "benchmarks" not in raw:
        raise ConfigError("config needs a benchmarks line")
    benches = []
    for item in _items(raw["benchmarks"]):
        name, _, n = item.partition(":")
        try:
            scale = _int("benchmark scale", n) if n else get(name).scale
        except KeyError:
            raise ConfigError(f"unknown benchmark {name!r}") from None
        benches.append((name, scale))
    kw = {"benchmarks": tuple(benches)}
    if "kinds" in raw:
        kw["kinds"] = tuple(_items(raw["kinds"]))
    limits = []
    if "limit_per_kind" in raw:
        limits.append(("*", _int("limit_per_kind", raw["limit_per_kind"])))
    if "limits" in raw:
        for item in _items(raw["limits"]):
            k, _, v = item.partition(":")
            _enum(MutationKind, k, "mutation kind")
            limits.append((k, _int("limits", v)))
    kw["limits"] = tuple(limits)
    if "inputs" in raw:
        kw["inputs"] = tuple(_items(raw["inputs"]))
    for key in ("trials_per_n", "trials_per_mutant", "seed", "jobs"):
        if key in raw:
            kw[key] = _int(key, raw[key])
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def format_config(cfg: ExperimentConfig) -> str:
    lines = [
        "benchmarks = " + ", ".join(f"{b}:{n}" for b, n in cfg.benchmarks),
        "kinds = " + ", ".join(cfg.kinds),
    ]
    per_kind = [f"{k}:{v}" for k, v in cfg.limits if k != "*"]
    if "*" in dict(cfg.limits):
        lines.append(f"limit_per_kind = {dict(cfg.limits)['*']}")
    if per_kind:
        lines.append("limits = " + ", ".join(per_kind))
    lines.append("inputs = " + ", ".join(cfg.inputs))
    lines.append(f"trials_per_n = {cfg.trials_per_n}")
    if cfg.trials_per_mutant is not None:
        lines.append(f"trials_per_mutant = {cfg.trials_per_mutant}")
    lines.append(f"seed = {cfg.seed}")
    if cfg.jobs is not None:
        lines.append(f"jobs = {cfg.jobs}")
    return "\n".join(lines) + "\n"


# --- campaign ---------------------------------------------------------------------------


def benchmark_tag(name: str) -> int:
    return zlib.crc32(name.encode())


@lru_cache(maxsize=64)
def campaign_mutants(name: str, n: int, kinds: tuple, limits: tuple, seed: int) -> Tuple[Mutant, ...]:
    """The seeded mutant corpus of one benchmark at scale ``n``."""
    from .benchsuite import get

    entry = get(name)
    lim = dict(limits)
    out = []
    for k in kinds:
        rng = np.random.default_rng([seed, benchmark_tag(name), n, list(MutationKind).index(MutationKind(k))])
        out += enumerate_mutants(entry.subroutine, [k], lim.get(k, lim.get("*")), rng=rng, seed=seed)
    return tuple(out)


@lru_cache(maxsize=256)
def _runner(name: str, n: int, kinds: tuple, limits: tuple, seed: int, mutant_id: int) -> TrialRunner:
    from .benchsuite import get

    entry = get(name)
    m = campaign_mutants(name, n, kinds, limits, seed)[mutant_id]
    return TrialRunner(m.program, entry.subroutine, n, entry.layout_binding(n), entry.check_mode)


def trial_rng(seed: int, name: str, n: int, mutant_id: int, input_kind, trial: int) -> np.random.Generator:
    idx = list(InputKind).index(InputKind(input_kind))
    return np.random.default_rng([seed, benchmark_tag(name), n, mutant_id, idx, trial])


def _work(item) -> Tuple[tuple, int]:
    name, n, kinds, limits, seed, mutant_id, input_kind, trials = item
    runner = _runner(name, n, kinds, limits, seed, mutant_id)
    hits = 0
    for t in range(trials):
        hits += runner.trial(input_kind, trial_rng(seed, name, n, mutant_id, input_kind, t))
    return (name, n, mutant_id, input_kind), hits


@dataclass
class TriggerReport:
    rows: List[dict]
    config: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for r in self.rows:
            w.writerow([r[h] if h != "rate" else _fmt_rate(r) for h in REPORT_HEADER])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"config": self.config, "header": REPORT_HEADER, "rows": self.rows}

    def rate(self, benchmark: Optional[str] = None, input_kind: Optional[str] = None,
             kind: Optional[str] = None, n: Optional[int] = None) -> float:
        """Aggregate triggers/trials over the matching rows (NaN when nothing matches)."""
        sel = [r for r in self.rows
               if (benchmark is None or r["benchmark"] == benchmark)
               and (input_kind is None or r["input"] == input_kind)
               and (kind is None or r["kind"] == kind)
               and (n is None or r["n"] == n)]
        trials = sum(r["trials"] for r in sel)
        return sum(r["triggers"] for r in sel) / trials if trials else float("nan")

    def write(self, csv_path, append: bool = False) -> Tuple[Path, Path]:
        """CSV report plus the JSON sidecar (same stem) carrying the full config."""
        csv_path = Path(csv_path)
        text = self.to_csv()
        if append and csv_path.exists() and csv_path.stat().st_size:
            with open(csv_path, "a", encoding="utf-8") as fh:
                fh.write(text.split("\n", 1)[1])
        else:
            csv_path.write_text(text)
        side = csv_path.with_suffix(".json")
        side.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")
        return csv_path, side


def _fmt_rate(row) -> str:
    return repr(row["triggers"] / row["trials"]) if row["trials"] else ""


def report_from_csv(text: str) -> TriggerReport:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != REPORT_HEADER:
        raise ConfigError("trigger report must start with header " + ",".join(REPORT_HEADER))
    out = []
    for r in rows[1:]:
        d = dict(zip(REPORT_HEADER, r))
        for k in ("n", "mutants", "trials", "triggers"):
            d[k] = int(d[k])
        d["rate"] = d["triggers"] / d["trials"] if d["trials"] else None
        out.append(d)
    return TriggerReport(out)


def report_from_json(text: str) -> TriggerReport:
    doc = json.loads(text)
    if "rows" not in doc:
        raise ConfigError("JSON report has no rows")
    return TriggerReport(list(doc["rows"]), dict(doc.get("config", {})))


def default_jobs() -> int:
    value = os.environ.get(JOBS_ENV, "1")
    try:
        jobs = int(value)
    except ValueError:
        raise ConfigError(f"{JOBS_ENV} must be an integer, got {value!r}") from None
    return max(1, jobs)


def run_experiment(cfg: ExperimentConfig, jobs: Optional[int] = None, progress=None) -> TriggerReport:
    """Run the campaign; rows are (benchmark, n, mutation kind, input kind) aggregates.

    Faults count as triggers and never abort the campaign. ``progress`` is an
    optional callable receiving a one-line status string per benchmark.
    """
    jobs = jobs or cfg.jobs or default_jobs()
    kinds = tuple(MutationKind(k).value for k in cfg.kinds)
    items = []
    corpora = {}
    for name, n in cfg.benchmarks:
        ms = campaign_mutants(name, n, kinds, cfg.limits, cfg.seed)
        corpora[(name, n)] = ms
        for mid in range(len(ms)):
            for ik in cfg.inputs:
                items.append((name, n, kinds, cfg.limits, cfg.seed, mid, ik, cfg.trials(n)))
    if jobs == 1:
        results = [_work(it) for it in items]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_work, items, chunksize=max(1, len(items) // (4 * jobs))))
    hits = dict(results)
    rows = []
    for name, n in cfg.benchmarks:
        ms = corpora[(name, n)]
        for k in kinds:
            ids = [i for i, m in enumerate(ms) if m.kind.value == k]
            for ik in cfg.inputs:
                trials = len(ids) * cfg.trials(n)
                triggers = sum(hits[(name, n, i, ik)] for i in ids)
                rows.append({"benchmark": name, "n": n, "kind": k, "input": ik, "mutants": len(ids),
                             "trials": trials, "triggers": triggers,
                             "rate": triggers / trials if trials else None})
        if progress is not None:
            progress(f"{name} n={n}: {len(ms)} mutants")
    return TriggerReport(rows, cfg.to_json())


__all__ = [
    "ExperimentConfig", "REPORT_HEADER", "TriggerReport", "campaign_mutants", "default_jobs", "format_config",
    "load_config", "parse_config", "report_from_csv", "report_from_json", "run_experiment", "trial_rng",
]
