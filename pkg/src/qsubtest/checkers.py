"""Output and relation checks.

One-sided transform checks undo the expected output and look for any nonzero
measurement. Statistical checks compare outcome counts against a probability
table. Relation checks (identity, equivalence, inverse/power/controlled
variants) reduce to identity checks on composed programs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy import stats

from .errors import RuntimeFault, UnsupportedCheck, VariantError
from .qir import (
    Call,
    Layout,
    Param,
    QRef,
    Subroutine,
    bind_layout,
    controlled_of,
    execute,
    inverse_of,
    measurement_sites,
    passthrough_args,
    power_of,
)
from .qir.expr import Const
from .qir.nodes import GateApp, format_path
from .simcore import Gate, StateVector, apply_controlled, apply_gate, measure, new_state
from .stateprep import InputKind, sample_input

PURITY_CAP = 7


@dataclass(frozen=True)
class StatTestConfig:
    shots: int = 4096
    alpha: float = 0.01
    method: str = "auto"  # "auto", "chi-square" or "exact-binomial"

    def __post_init__(self):
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.method not in ("auto", "chi-square", "exact-binomial"):
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class CheckVerdict:
    passed: bool
    shots: int
    statistic: Optional[float] = None
    threshold: Optional[float] = None
    witness: Optional[dict] = None
    check: str = ""
    target: str = ""
    details: list = field(default_factory=list)

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failed verdict needs a witness")

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "target": self.target,
            "passed": self.passed,
            "shots": self.shots,
            "statistic": self.statistic,
            "witness": self.witness,
        }

    def __bool__(self):
        return self.passed


def _bitstring(bits) -> str:
    return "".join(str(int(b)) for b in bits)


# --- transform-based checks -----------------------------------------------------------


def transform_check(
    state: StateVector,
    inverse_expected: Callable[[StateVector], object],
    rng,
    shots: int = 1,
    qubits: Optional[Sequence[int]] = None,
    target: str = "",
) -> CheckVerdict:
    """Undo the expected output and measure; any nonzero bit proves a wrong state.

    ``state`` is consumed when ``shots == 1``; otherwise each shot works on a copy.
    """
    qubits = tuple(range(state.n_qubits)) if qubits is None else tuple(qubits)
    bad = 0
    witness = None
    for _ in range(shots):
        s = state if shots == 1 else state.copy()
        inverse_expected(s)
        bits = measure(s, qubits, rng).bits
        if any(bits):
            bad += 1
            if witness is None:
                witness = {"observed": _bitstring(bits)}
    return CheckVerdict(bad == 0, shots, float(bad), 0.0, witness, "transform", target)


def qft_phase(j: int, k: int) -> float:
    """theta_{j,k} = 2*pi*0.j_{n-k+1}...j_n for output qubit k (1-based, top first)."""
    return 2 * math.pi * (j % (2**k)) / (2**k)


def qft_inverse_ops(j: int, n: int) -> list:
    """Gates mapping the expected QFT|j> output (qubit 0 most significant) to |0...0>."""
    ops = []
    for k in range(1, n + 1):
        ops.append((Gate("R1", -qft_phase(j, k)), (k - 1,)))
        ops.append((Gate("H"), (k - 1,)))
    return ops


def qft_output_check(
    j: int, n: int, state: StateVector, rng, shots: int = 1, qubits: Optional[Sequence[int]] = None
) -> CheckVerdict:
    """Product-form check of QFT|j>: per qubit undo R1(theta_{j,k}) H, then expect zeros."""
    qubits = tuple(range(n)) if qubits is None else tuple(qubits)
    if len(qubits) != n:
        raise ValueError("qubit count does not match n")
    ops = qft_inverse_ops(j, n)

    def undo(s):
        for g, local in ops:
            apply_gate(s, g, tuple(qubits[i] for i in local))

    v = transform_check(state, undo, rng, shots, qubits, target=f"QFT|{j}>")
    v.check = "qft_output"
    if v.witness is not None:
        v.witness["input"] = f"CI(x={j},n={n})"
    return v


# --- statistical checks --------------------------------------------------------------------


def _as_table(expected) -> dict:
    if isinstance(expected, Mapping):
        return {int(k): float(v) for k, v in expected.items()}
    return {i: float(p) for i, p in enumerate(np.asarray(expected, dtype=float))}


def _pool(obs, exp):
    """Merge bins with expected count < 5 (smallest first) until none remain or one bin is left."""
    bins = sorted(zip(exp, obs))
    while len(bins) > 1 and bins[0][0] < 5:
        e0, o0 = bins.pop(0)
        e1, o1 = bins.pop(0)
        bins.append((e0 + e1, o0 + o1))
        bins.sort()
    return [o for _, o in bins], [e for e, _ in bins]


def stat_fit(observed: Mapping, expected, cfg: StatTestConfig = StatTestConfig(), target: str = "") -> CheckVerdict:
    """Goodness of fit of outcome counts to a probability table.

    Two-outcome tables use the exact binomial test (``method="auto"``), larger
    ones Pearson's chi-square with small bins pooled. Passes iff p >= alpha.
    """
    table = _as_table(expected)
    total_p = sum(table.values())
    if abs(total_p - 1.0) > 1e-9:
        raise ValueError(f"expected probabilities sum to {total_p}")
    counts = {int(k): int(v) for k, v in observed.items() if v}
    total = sum(counts.values())
    if total < cfg.shots:
        raise ValueError(f"{total} observations, configuration requires {cfg.shots}")
    for k, c in counts.items():
        if table.get(k, 0.0) <= 1e-12:
            return CheckVerdict(
                False, total, math.inf, cfg.alpha,
                {"observed": k, "count": c, "reason": "outcome has zero expected probability"},
                "stat_fit", target,
            )
    support = sorted(k for k, p in table.items() if p > 1e-12)
    if len(support) <= 1:
        return CheckVerdict(True, total, 0.0, cfg.alpha, None, "stat_fit", target)
    method = cfg.method
    if method == "auto":
        method = "exact-binomial" if len(support) == 2 else "chi-square"
    if method == "exact-binomial":
        if len(support) != 2:
            raise ValueError("exact binomial test needs exactly two outcomes")
        k0 = counts.get(support[0], 0)
        p0 = table[support[0]] / (table[support[0]] + table[support[1]])
        pvalue = float(stats.binomtest(k0, total, p0).pvalue)
        statistic = float(k0)
    else:
        obs = [counts.get(k, 0) for k in support]
        exp = [total * table[k] for k in support]
        obs, exp = _pool(obs, exp)
        if len(obs) < 2:
            return CheckVerdict(True, total, 0.0, cfg.alpha, None, "stat_fit", target)
        res = stats.chisquare(obs, exp)
        statistic, pvalue = float(res.statistic), float(res.pvalue)
    passed = pvalue >= cfg.alpha
    witness = None
    if not passed:
        top = max(counts, key=counts.get)
        witness = {"p_value": pvalue, "most_frequent": top, "count": counts[top]}
    v = CheckVerdict(passed, total, statistic, cfg.alpha, witness, "stat_fit", target)
    v.details.append({"p_value": pvalue, "method": method})
    return v


# --- identity and equivalence -----------------------------------------------------------------


@dataclass(frozen=True)
class Binding:
    """How to lay a subroutine out on a register for relation checks.

    ``inputs``/``outputs`` name the qubit-array parameters forming the input
    and output registers (default: all qubit arrays, in declaration order).
    ``clean`` names workspace arrays that start in |0...0> and must end there.
    """

    classical: dict = field(default_factory=dict)
    handles: dict = field(default_factory=dict)
    lengths: dict = field(default_factory=dict)
    inputs: Optional[tuple] = None
    outputs: Optional[tuple] = None
    clean: tuple = ()

    def layout(self, sub: Subroutine, n: int) -> Layout:
        return bind_layout(sub, self.classical, self.lengths, self.handles, default_length=n)

    def registers(self, sub: Subroutine, layout: Layout):
        names = [p.name for p in sub.params if p.kind == "qubits" and p.name not in self.clean]
        ins = self.inputs if self.inputs is not None else names
        outs = self.outputs if self.outputs is not None else ins
        return layout.qubits(*ins), layout.qubits(*outs)


def _kinds(kinds):
    if kinds is None:
        return (InputKind.STV,)
    if isinstance(kinds, (str, InputKind)):
        return (InputKind(kinds),)
    return tuple(InputKind(k) for k in kinds)


def identity_check(
    sub: Subroutine,
    n: int,
    trials: int,
    kinds=None,
    rng=None,
    binding: Optional[Binding] = None,
) -> CheckVerdict:
    """prepare -> run -> unprepare -> measure, expecting all zeros every trial.

    Stops at the first failing trial. Classical outputs are ignored.
    """
    rng = np.random.default_rng() if rng is None else rng
    binding = binding or Binding()
    kinds = _kinds(kinds)
    layout = binding.layout(sub, n)
    in_reg, out_reg = binding.registers(sub, layout)
    if len(in_reg) != len(out_reg):
        raise ValueError("input and output registers differ in size")
    for t in range(trials):
        kind = kinds[t % len(kinds)]
        prep = sample_input(kind, len(in_reg), rng)
        state = new_state(layout.n_qubits)
        prep.prepare(state, in_reg)
        try:
            execute(sub, layout.args, state, rng)
        except RuntimeFault as exc:
            return CheckVerdict(
                False, t + 1, None, 0.0,
                {"input": prep.description, "fault": str(exc), "site": exc.site, "trial": t},
                "identity", sub.name,
            )
        prep.unprepare(state, out_reg)
        bits = measure(state, out_reg + layout.qubits(*binding.clean), rng).bits
        if any(bits):
            return CheckVerdict(
                False, t + 1, 1.0, 0.0,
                {"input": prep.description, "observed": _bitstring(bits), "trial": t},
                "identity", sub.name,
            )
    return CheckVerdict(True, trials, 0.0, 0.0, None, "identity", sub.name)


def sequence(name: str, parts: Sequence[Subroutine], params: Optional[tuple] = None) -> Subroutine:
    """A subroutine calling each part in order with the same arguments."""
    params = tuple(params if params is not None else parts[0].params)
    for p in parts:
        if tuple((q.kind) for q in p.params) != tuple(q.kind for q in params):
            raise ValueError(f"{p.name} does not match the signature of {name}")
    probe = Subroutine(name, params, ())
    args = passthrough_args(probe)
    return Subroutine(name, params, tuple(Call(p, args) for p in parts))


def _same_signature(p1: Subroutine, p2: Subroutine) -> bool:
    return [(p.kind) for p in p1.params] == [(p.kind) for p in p2.params]


def equivalence_check(
    p1: Subroutine,
    p2: Subroutine,
    n: int,
    trials: int,
    rng=None,
    binding: Optional[Binding] = None,
    kinds=None,
    shots_per_input: int = 256,
    alpha: float = 0.01,
) -> CheckVerdict:
    """Equivalence up to global phase.

    Adjointable ``p2``: identity check on p1 followed by inverse(p2).
    Otherwise: per sampled input, a two-sample chi-square test on the
    measured output distributions (Bonferroni-corrected over inputs).
    """
    rng = np.random.default_rng() if rng is None else rng
    if not _same_signature(p1, p2):
        raise ValueError(f"signatures of {p1.name} and {p2.name} differ")
    binding = binding or Binding()
    if p2.is_adjointable:
        comp = sequence(f"{p1.name};Adjoint {p2.name}", [p1, inverse_of(p2)])
        v = identity_check(comp, n, trials, kinds, rng, binding)
        v.check = "equivalence"
        v.target = f"{p1.name} == {p2.name}"
        return v
    kinds = _kinds(kinds)
    layout = binding.layout(p1, n)
    in_reg, out_reg = binding.registers(p1, layout)
    level = alpha / max(trials, 1)
    worst = 1.0
    total = 0
    for t in range(trials):
        prep = sample_input(kinds[t % len(kinds)], len(in_reg), rng)
        tables = []
        for prog in (p1, p2):
            counts = {}
            for _ in range(shots_per_input):
                state = prep.prepare(new_state(layout.n_qubits), in_reg)
                try:
                    execute(prog, layout.args, state, rng)
                    key = _bitstring(measure(state, out_reg, rng).bits)
                except RuntimeFault as exc:
                    key = f"fault:{exc}"
                counts[key] = counts.get(key, 0) + 1
            tables.append(counts)
            total += shots_per_input
        keys = sorted(set(tables[0]) | set(tables[1]))
        if len(keys) < 2:
            continue
        matrix = np.array([[tab.get(k, 0) for k in keys] for tab in tables])
        pvalue = float(stats.chi2_contingency(matrix)[1])
        worst = min(worst, pvalue)
        if pvalue < level:
            return CheckVerdict(
                False, total, pvalue, level,
                {"input": prep.description, "p1_counts": tables[0], "p2_counts": tables[1]},
                "equivalence", f"{p1.name} == {p2.name}",
            )
    return CheckVerdict(True, total, worst, level, None, "equivalence", f"{p1.name} == {p2.name}")


# --- variant relations ------------------------------------------------------------------------


def _x_layer(name: str, pattern: Optional[int], m: int) -> tuple:
    """X on control qubits whose bit in ``pattern`` is 1 (all when pattern is None)."""
    out = []
    for i in range(m):
        if pattern is None or (pattern >> (m - 1 - i)) & 1:
            out.append(GateApp("X", (QRef(name, Const(i)),)))
    return tuple(out)


def _controlled_probe(p: Subroutine, inv: Subroutine, m: int, pattern: Optional[int]) -> Subroutine:
    """Controls prepared in ``pattern`` (None = all ones) around Controlled p.

    Active controls are followed by the inverse of p so the whole program is
    the identity when the controlled semantics are right.
    """
    cp = controlled_of(p)
    ctl = cp.params[0].name
    params = (Param(ctl, "qubits", Const(m)),) + tuple(p.params)
    args = passthrough_args(Subroutine("probe", params, ()))
    body = list(_x_layer(ctl, pattern, m))
    body.append(Call(cp, args))
    if pattern is None:
        body.append(Call(inv, args[1:]))
    body.extend(_x_layer(ctl, pattern, m))
    label = "on" if pattern is None else f"off{pattern}"
    return Subroutine(f"{p.name}#ctl{m}{label}", params, tuple(body))


def variant_checks(
    p: Subroutine,
    n: int,
    trials: int,
    rng=None,
    binding: Optional[Binding] = None,
    inverse: Optional[Subroutine] = None,
    powers: Sequence[int] = (-2, -1, 2, 3),
    kinds=None,
    control_sizes: Sequence[int] = (1, 2),
) -> CheckVerdict:
    """Inverse relation, power relations and controlled activation/deactivation.

    ``inverse`` substitutes a hand-written inverse for the generated one.
    """
    rng = np.random.default_rng() if rng is None else rng
    if not p.is_adjointable:
        raise VariantError(f"{p.name} is not adjointable")
    binding = binding or Binding()
    inv = inverse if inverse is not None else inverse_of(p)
    relations = [
        ("P;InvP", sequence(f"{p.name};{inv.name}", [p, inv]), 0),
        ("InvP;P", sequence(f"{inv.name};{p.name}", [inv, p]), 0),
    ]
    for k in powers:
        undo = inv if k > 0 else p
        relations.append((f"PowP({k})", sequence(f"{p.name}^{k};undo", [power_of(p, k)] + [undo] * abs(k)), 0))
    for m in control_sizes:
        relations.append((f"CtrlP(m={m},active)", _controlled_probe(p, inv, m, None), m))
        for pattern in range(2**m - 1):
            relations.append((f"CtrlP(m={m},pattern={pattern})", _controlled_probe(p, inv, m, pattern), m))
    shots = 0
    details = []
    for label, prog, m in relations:
        b = binding
        if m:
            # the control array starts in |0..0>, is set by the X layer and must return to 0
            ctl = prog.params[0].name
            lengths = dict(binding.lengths, **{ctl: m})
            b = Binding(binding.classical, binding.handles, lengths, binding.inputs, binding.outputs,
                        binding.clean + (ctl,))
        v = identity_check(prog, n, trials, kinds, rng, b)
        shots += v.shots
        details.append({"relation": label, "passed": v.passed})
        if not v.passed:
            witness = dict(v.witness)
            witness["relation"] = label
            out = CheckVerdict(False, shots, None, 0.0, witness, "variants", p.name, details)
            return out
    return CheckVerdict(True, shots, 0.0, 0.0, None, "variants", p.name, details)


# --- unitarity heuristic ---------------------------------------------------------------------


def _shifted(layout: Layout, offset: int) -> dict:
    args = dict(layout.args)
    for name, regs in layout.registers.items():
        args[name] = tuple(q + offset for q in regs)
    return args


def unitarity_check(
    sub: Subroutine,
    n: int,
    trials: int,
    shots_per_purity: int,
    rng=None,
    binding: Optional[Binding] = None,
    kinds=(InputKind.CSI,),
    static: bool = True,
) -> CheckVerdict:
    """Static measurement scan, then a swap-test purity estimate of the output.

    Two independent runs on copies of the input feed a controlled-SWAP
    test; P(ancilla = 1) = (1 - tr(rho^2)) / 2. An input passes when the
    estimated purity is at least 1 - 3 sigma.
    """
    rng = np.random.default_rng() if rng is None else rng
    binding = binding or Binding()
    if static:
        sites = measurement_sites(sub)
        if sites:
            name, path = sites[0]
            return CheckVerdict(
                False, 0, None, None,
                {"site": f"{name}:{format_path(path)}", "reason": "reachable measurement"},
                "unitarity", sub.name,
            )
    layout = binding.layout(sub, n)
    m = layout.n_qubits
    if m > PURITY_CAP:
        raise UnsupportedCheck(f"purity estimation needs 2*{m}+1 qubits; cap is {PURITY_CAP} per copy")
    in_reg, _ = binding.registers(sub, layout)
    kinds = _kinds(kinds)
    args_a = _shifted(layout, 1)
    args_b = _shifted(layout, 1 + m)
    worst = 1.0
    total = 0
    for t in range(trials):
        prep = sample_input(kinds[t % len(kinds)], len(in_reg), rng)
        ones = 0
        for _ in range(shots_per_purity):
            state = new_state(2 * m + 1)
            prep.prepare(state, [q + 1 for q in in_reg])
            prep.prepare(state, [q + 1 + m for q in in_reg])
            try:
                execute(sub, args_a, state, rng)
                execute(sub, args_b, state, rng)
            except RuntimeFault as exc:
                return CheckVerdict(
                    False, total, None, None, {"input": prep.description, "fault": str(exc)},
                    "unitarity", sub.name,
                )
            apply_gate(state, Gate("H"), (0,))
            for q in range(m):
                apply_controlled(state, Gate("SWAP"), (0,), (1,), (1 + q, 1 + m + q))
            apply_gate(state, Gate("H"), (0,))
            ones += measure(state, (0,), rng).bits[0]
        total += shots_per_purity
        f = ones / shots_per_purity
        purity = 1 - 2 * f
        sigma = 2 * math.sqrt(f * (1 - f) / shots_per_purity)
        worst = min(worst, purity)
        if purity < 1 - 3 * sigma:
            return CheckVerdict(
                False, total, purity, 1 - 3 * sigma,
                {"input": prep.description, "purity": purity, "ones": ones},
                "unitarity", sub.name,
            )
    return CheckVerdict(True, total, worst, None, None, "unitarity", sub.name)


def combine_verdicts(verdicts: Sequence[CheckVerdict], check: str, target: str) -> CheckVerdict:
    """Conjunction of verdicts; the first failure's witness is kept."""
    shots = sum(v.shots for v in verdicts)
    for v in verdicts:
        if not v.passed:
            return CheckVerdict(False, shots, v.statistic, v.threshold, v.witness, check, target)
    return CheckVerdict(True, shots, None, None, None, check, target)


__all__ = [
    "Binding",
    "CheckVerdict",
    "PURITY_CAP",
    "StatTestConfig",
    "combine_verdicts",
    "equivalence_check",
    "identity_check",
    "qft_inverse_ops",
    "qft_output_check",
    "qft_phase",
    "sequence",
    "stat_fit",
    "transform_check",
    "unitarity_check",
    "variant_checks",
]
