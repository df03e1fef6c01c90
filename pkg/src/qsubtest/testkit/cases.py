"""Executable test cases: inputs with generation procedures, outputs with checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from scipy import stats

from ..checkers import CheckVerdict, StatTestConfig, qft_inverse_ops, stat_fit
from ..errors import RuntimeFault
from ..qir import Subroutine, bind_layout, execute
from ..simcore import StateVector, apply_gate, measure, new_state
from ..stateprep import Ensemble, PreparedInput, gen_mixed, make_input, maximally_mixed

# --- classical expectations ----------------------------------------------------------------


class Expectation:
    """Judges the list of per-repetition observations of one output."""

    def judge(self, obs: list, alpha: float) -> tuple:
        """Return ``(passed, statistic, witness)``."""
        raise NotImplementedError

    def to_spec(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Equals(Expectation):
    value: Any

    def judge(self, obs, alpha):
        bad = [o for o in obs if o != self.value]
        if bad:
            return False, float(len(bad)), {"expected": self.value, "observed": bad[0], "mismatches": len(bad)}
        return True, 0.0, None

    def to_spec(self):
        return {"equals": self.value}


@dataclass(frozen=True)
class InRange(Expectation):
    """Observations in ``[lo, hi]``; at least ``fraction`` of them (default all)."""

    lo: float
    hi: float
    fraction: float = 1.0

    def judge(self, obs, alpha):
        bad = [o for o in obs if o is None or not self.lo <= o <= self.hi]
        rate = 1 - len(bad) / len(obs) if obs else 0.0
        if rate < self.fraction:
            return False, rate, {"expected": f"[{self.lo}, {self.hi}]", "observed": bad[0], "rate": rate}
        return True, rate, None

    def to_spec(self):
        out = {"range": [self.lo, self.hi]}
        if self.fraction != 1.0:
            out["fraction"] = self.fraction
        return out


@dataclass(frozen=True)
class Approx(Expectation):
    """Every observation within ``tol`` of ``value``."""

    value: float
    tol: float

    def judge(self, obs, alpha):
        bad = [o for o in obs if o is None or abs(o - self.value) > self.tol]
        if bad:
            return False, float(len(bad)), {"expected": f"{self.value} +- {self.tol}", "observed": bad[0]}
        return True, 0.0, None

    def to_spec(self):
        return {"approx": self.value, "tol": self.tol}


@dataclass(frozen=True)
class Mostly(Expectation):
    """``value`` observed in at least ``fraction`` of the repetitions."""

    value: Any
    fraction: float

    def judge(self, obs, alpha):
        hits = sum(1 for o in obs if o == self.value)
        rate = hits / len(obs) if obs else 0.0
        if rate < self.fraction:
            others = [o for o in obs if o != self.value]
            return False, rate, {"expected": self.value, "rate": rate, "observed": others[0] if others else None}
        return True, rate, None

    def to_spec(self):
        return {"mostly": self.value, "fraction": self.fraction}


@dataclass(frozen=True)
class Distribution(Expectation):
    """Outcome frequencies fit ``table`` (goodness of fit at level alpha)."""

    table: tuple  # ((outcome, probability), ...)

    @classmethod
    def of(cls, table: Mapping) -> "Distribution":
        return cls(tuple(sorted((int(k), float(v)) for k, v in table.items())))

    def judge(self, obs, alpha):
        counts = {}
        for o in obs:
            counts[int(o)] = counts.get(int(o), 0) + 1
        v = stat_fit(counts, dict(self.table), StatTestConfig(shots=len(obs), alpha=alpha))
        return v.passed, v.statistic, v.witness

    def to_spec(self):
        return {"distribution": {str(k): p for k, p in self.table}}


def expectation_from_spec(spec) -> Expectation:
    if isinstance(spec, Expectation):
        return spec
    if not isinstance(spec, Mapping):
        return Equals(spec)
    if "equals" in spec:
        return Equals(spec["equals"])
    if "range" in spec:
        lo, hi = spec["range"]
        return InRange(lo, hi, float(spec.get("fraction", 1.0)))
    if "approx" in spec:
        return Approx(float(spec["approx"]), float(spec.get("tol", 0.1)))
    if "mostly" in spec:
        return Mostly(spec["mostly"], float(spec.get("fraction", 0.9)))
    if "distribution" in spec:
        return Distribution.of(spec["distribution"])
    raise ValueError(f"unknown classical expectation {dict(spec)!r}")


# --- quantum checking procedures ---------------------------------------------------------------


class QuantumCheck(Expectation):
    """A checking procedure: ``observe`` runs on the output register each repetition."""

    def observe(self, state: StateVector, qubits: tuple, rng, rep: int):
        raise NotImplementedError


def _measure_bits(state, qubits, rng) -> str:
    return "".join(map(str, measure(state, qubits, rng).bits))


@dataclass(frozen=True)
class ExpectState(QuantumCheck):
    """Undo the expected state's generation procedure; expect all zeros."""

    expected: PreparedInput

    def observe(self, state, qubits, rng, rep):
        self.expected.unprepare(state, qubits)
        return _measure_bits(state, qubits, rng)

    def judge(self, obs, alpha):
        bad = [o for o in obs if "1" in o]
        if bad:
            return False, float(len(bad)), {"expected": self.expected.description, "observed": bad[0]}
        return True, 0.0, None

    def to_spec(self):
        return {"check": "state", "input": input_spec(self.expected)}


@dataclass(frozen=True)
class ExpectChanged(QuantumCheck):
    """Output detectably differs from ``reference``: some repetition leaves a nonzero."""

    reference: PreparedInput

    def observe(self, state, qubits, rng, rep):
        self.reference.unprepare(state, qubits)
        return _measure_bits(state, qubits, rng)

    def judge(self, obs, alpha):
        changed = sum(1 for o in obs if "1" in o)
        if changed == 0:
            return False, 0.0, {"reference": self.reference.description, "reason": "output indistinguishable from input"}
        return True, float(changed), None

    def to_spec(self):
        return {"check": "changed", "input": input_spec(self.reference)}


@dataclass(frozen=True)
class QFTOutput(QuantumCheck):
    """Product-form check of QFT|j>: undo R1(theta_{j,k}) H on every qubit."""

    j: int

    def observe(self, state, qubits, rng, rep):
        for g, local in qft_inverse_ops(self.j, len(qubits)):
            apply_gate(state, g, tuple(qubits[i] for i in local))
        return _measure_bits(state, qubits, rng)

    def judge(self, obs, alpha):
        bad = [o for o in obs if "1" in o]
        if bad:
            return False, float(len(bad)), {"expected": f"QFT|{self.j}>", "observed": bad[0]}
        return True, 0.0, None

    def to_spec(self):
        return {"check": "qft_output", "j": self.j}


@dataclass(frozen=True)
class QFTPair(QuantumCheck):
    """(QFT|a> + QFT|b>)/sqrt(2): undoing either branch leaves all zeros half the time.

    Even repetitions undo branch a, odd ones branch b; each side gets an exact
    binomial test against p = 1/2.
    """

    a: int
    b: int

    def observe(self, state, qubits, rng, rep):
        j = self.a if rep % 2 == 0 else self.b
        for g, local in qft_inverse_ops(j, len(qubits)):
            apply_gate(state, g, tuple(qubits[i] for i in local))
        return (rep % 2, "1" not in _measure_bits(state, qubits, rng))

    def judge(self, obs, alpha):
        worst = 1.0
        for side, j in ((0, self.a), (1, self.b)):
            hits = [z for s, z in obs if s == side]
            if not hits:
                continue
            p = float(stats.binomtest(sum(hits), len(hits), 0.5).pvalue)
            worst = min(worst, p)
            if p < alpha / 2:
                return False, p, {"branch": j, "zero_rate": sum(hits) / len(hits), "p_value": p}
        return True, worst, None

    def to_spec(self):
        return {"check": "qft_pair", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Measured(QuantumCheck):
    """Measure the register as an integer (first qubit most significant) and judge classically."""

    expect: Expectation

    def observe(self, state, qubits, rng, rep):
        return measure(state, qubits, rng).value

    def judge(self, obs, alpha):
        return self.expect.judge(obs, alpha)

    def to_spec(self):
        return {"check": "measure", "expect": self.expect.to_spec()}


def check_from_spec(spec) -> QuantumCheck:
    if isinstance(spec, QuantumCheck):
        return spec
    kind = spec.get("check")
    if kind in ("state", "unchanged"):
        return ExpectState(input_from_spec(spec["input"]))
    if kind == "changed":
        return ExpectChanged(input_from_spec(spec["input"]))
    if kind == "qft_output":
        return QFTOutput(int(spec["j"]))
    if kind == "qft_pair":
        return QFTPair(int(spec["a"]), int(spec["b"]))
    if kind == "measure":
        return Measured(expectation_from_spec(spec["expect"]))
    raise ValueError(f"unknown quantum check {kind!r}")


# --- inputs and handles ----------------------------------------------------------------------


def input_from_spec(spec):
    """PreparedInput or Ensemble from a suite-file mapping."""
    if isinstance(spec, (PreparedInput, Ensemble)):
        return spec
    gen = spec.get("gen")
    if gen == "maxmix":
        return maximally_mixed(int(spec["n"]))
    if gen == "mix":
        return Ensemble(tuple((float(m["p"]), make_input(m["input"])) for m in spec["members"]))
    return make_input(spec)


def input_spec(obj) -> dict:
    if isinstance(obj, PreparedInput):
        if "spec" in obj.meta:
            return dict(obj.meta["spec"])
        if obj.meta.get("kind") == "CI":
            return {"gen": "ket_x", "n": obj.n_qubits, "x": obj.meta["x"]}
        raise ValueError(f"{obj.description} was not built from a generator spec")
    if isinstance(obj, Ensemble):
        if obj.label.startswith("MAXMIX"):
            return {"gen": "maxmix", "n": obj.n_qubits}
        return {"gen": "mix", "members": [{"p": p, "input": input_spec(g)} for p, g in obj.entries]}
    raise TypeError(f"not an input: {obj!r}")


def resolve_handle(spec):
    """Subroutine for a handle argument.

    ``{"input": gen}`` / ``{"mixed": gen}`` wrap a generator, ``{"phase_oracle":
    {"n", "K"}}`` and ``{"upower": name}`` build test doubles, ``{"program":
    name}`` looks up a benchmark program.
    """
    if isinstance(spec, Subroutine):
        return spec
    from ..benchsuite import programs

    if "input" in spec or "mixed" in spec:
        return input_from_spec(spec.get("input") or spec.get("mixed")).as_subroutine()
    if "phase_oracle" in spec:
        o = spec["phase_oracle"]
        return programs.make_phase_oracle(int(o["n"]), int(o["K"]))
    if "upower" in spec:
        return programs.upower_by_name(str(spec["upower"]))
    if "program" in spec:
        return programs.all_programs()[spec["program"]]
    raise ValueError(f"unknown handle spec {dict(spec)!r}")


# --- test cases ------------------------------------------------------------------------------


def _strip(name: str) -> str:
    return name.rstrip("'")


@dataclass(frozen=True)
class TestCase:
    """Inputs with generation procedures and outputs with checking procedures.

    ``lengths`` fixes sizes of qubit arrays that are not quantum inputs
    (outputs, workspace); quantum inputs take their size from the generator.
    """

    __test__ = False  # not a pytest class

    name: str
    classical_inputs: dict = field(default_factory=dict)
    quantum_inputs: dict = field(default_factory=dict)
    expected_classical: dict = field(default_factory=dict)
    expected_quantum: dict = field(default_factory=dict)
    repetitions: int = 1
    handles: dict = field(default_factory=dict)
    lengths: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, gen in self.quantum_inputs.items():
            if not isinstance(gen, (PreparedInput, Ensemble)):
                raise TypeError(f"quantum input {name!r} needs a generation procedure, got {type(gen).__name__}")
        for name, chk in self.expected_quantum.items():
            if not isinstance(chk, QuantumCheck):
                raise TypeError(f"quantum output {name!r} needs a checking procedure")
        object.__setattr__(
            self, "expected_classical", {k: expectation_from_spec(v) for k, v in self.expected_classical.items()}
        )
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    @classmethod
    def from_spec(cls, spec: Mapping) -> "TestCase":
        return cls(
            name=str(spec["name"]),
            classical_inputs=dict(spec.get("classical", {}) or {}),
            quantum_inputs={k: input_from_spec(v) for k, v in (spec.get("quantum") or {}).items()},
            expected_classical={k: expectation_from_spec(v) for k, v in (spec.get("expect_classical") or {}).items()},
            expected_quantum={k: check_from_spec(v) for k, v in (spec.get("expect_quantum") or {}).items()},
            repetitions=int(spec.get("repetitions", 1)),
            handles=dict(spec.get("handles") or {}),
            lengths=dict(spec.get("lengths") or {}),
        )

    def to_spec(self) -> dict:
        out = {"name": self.name}
        if self.classical_inputs:
            out["classical"] = dict(self.classical_inputs)
        if self.lengths:
            out["lengths"] = dict(self.lengths)
        if self.quantum_inputs:
            out["quantum"] = {k: input_spec(v) for k, v in self.quantum_inputs.items()}
        if self.handles:
            for k, v in self.handles.items():
                if isinstance(v, Subroutine):
                    raise ValueError(f"handle {k!r} is a bare subroutine and cannot be exported")
            out["handles"] = dict(self.handles)
        if self.expected_classical:
            out["expect_classical"] = {k: v.to_spec() for k, v in self.expected_classical.items()}
        if self.expected_quantum:
            out["expect_quantum"] = {k: v.to_spec() for k, v in self.expected_quantum.items()}
        out["repetitions"] = self.repetitions
        return out


def run_case(
    sub: Subroutine,
    case: TestCase,
    rng,
    alpha: float = 0.01,
    executor: Callable = execute,
) -> CheckVerdict:
    """Run ``case.repetitions`` fresh executions and judge every expectation.

    ``executor`` defaults to the interpreter; tests substitute a counting wrapper.
    Runtime faults fail the case with the fault as witness.
    """
    handles = {k: resolve_handle(v) for k, v in case.handles.items()}
    lengths = dict(case.lengths)
    for name, gen in case.quantum_inputs.items():
        lengths.setdefault(name, gen.n_qubits)
    layout = bind_layout(sub, case.classical_inputs, lengths, handles)
    for name in list(case.quantum_inputs) + [_strip(k) for k in case.expected_quantum]:
        if name not in layout.registers:
            raise ValueError(f"{sub.name} has no qubit array {name!r}")
    obs = {k: [] for k in list(case.expected_classical) + list(case.expected_quantum)}
    for rep in range(case.repetitions):
        state = new_state(layout.n_qubits)
        descriptions = {}
        for name, gen in case.quantum_inputs.items():
            prep = gen if isinstance(gen, PreparedInput) else gen_mixed(gen, rng)
            prep.prepare(state, layout.registers[name])
            descriptions[name] = prep.description
        try:
            result = executor(sub, layout.args, state, rng)
        except RuntimeFault as exc:
            return CheckVerdict(
                False, rep + 1, None, None,
                {"fault": str(exc), "site": exc.site, "repetition": rep, "inputs": descriptions},
                case.name, sub.name,
            )
        for name in case.expected_classical:
            obs[name].append(result.classical_outputs.get(_strip(name)))
        for name, chk in case.expected_quantum.items():
            obs[name].append(chk.observe(state, layout.registers[_strip(name)], rng, rep))
    stat = None
    for name, exp in list(case.expected_classical.items()) + list(case.expected_quantum.items()):
        passed, stat, witness = exp.judge(obs[name], alpha)
        if not passed:
            witness = dict(witness or {})
            witness["output"] = name
            return CheckVerdict(False, case.repetitions, stat, alpha, witness, case.name, sub.name)
    return CheckVerdict(True, case.repetitions, stat, alpha, None, case.name, sub.name)


# --- reporting ---------------------------------------------------------------------------------


@dataclass
class SuiteSummary:
    total: int
    passed: int
    failed: int
    per_subroutine: dict
    first_witnesses: dict
    verdicts: list

    @property
    def status(self) -> str:
        if self.total == 0:
            return "no cases"
        return "pass" if self.failed == 0 else "fail"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "total": self.total,
            "passed": self.passed,
            "failed": self.failed,
            "per_subroutine": self.per_subroutine,
            "first_witnesses": self.first_witnesses,
            "cases": [v.to_json() for v in self.verdicts],
        }

    def csv_rows(self) -> list:
        rows = [["subroutine", "case", "verdict", "shots", "witness"]]
        for v in self.verdicts:
            rows.append([
                v.target,
                v.check,
                "pass" if v.passed else "fail",
                str(v.shots),
                json.dumps(v.witness, sort_keys=True, default=str) if v.witness else "",
            ])
        return rows

    def __str__(self):
        if self.total == 0:
            return "no cases"
        lines = [f"{self.passed}/{self.total} cases passed"]
        for name, counts in self.per_subroutine.items():
            lines.append(f"  {name}: {counts['passed']} passed, {counts['failed']} failed")
            if name in self.first_witnesses:
                lines.append(f"    first failure: {json.dumps(self.first_witnesses[name], default=str)}")
        return "\n".join(lines)


def suite_report(verdicts) -> SuiteSummary:
    verdicts = list(verdicts)
    per = {}
    witnesses = {}
    for v in verdicts:
        counts = per.setdefault(v.target, {"passed": 0, "failed": 0})
        if v.passed:
            counts["passed"] += 1
        else:
            counts["failed"] += 1
            witnesses.setdefault(v.target, v.witness)
    failed = sum(1 for v in verdicts if not v.passed)
    return SuiteSummary(len(verdicts), len(verdicts) - failed, failed, per, witnesses, verdicts)


__all__ = [
    "Approx", "Distribution", "Equals", "ExpectChanged", "ExpectState", "Expectation", "InRange",
    "Measured", "Mostly", "QFTOutput", "QFTPair", "QuantumCheck", "SuiteSummary", "TestCase",
    "check_from_spec", "expectation_from_spec", "input_from_spec", "input_spec", "resolve_handle",
    "run_case", "suite_report",
]
