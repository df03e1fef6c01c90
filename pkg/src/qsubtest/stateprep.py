"""Input-state generators, random input samplers and the SCAQ coverage check.

Every generated input carries its gate recipe, so it can be prepared on any
register, undone exactly (for identity checks) and exported as an IR
subroutine for use as a handle argument.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import qir
from .simcore import Gate, StateVector, apply_gate, exact_distribution, new_state

SCAQ_EPS = 1e-9


class InputKind(str, enum.Enum):
    CI = "CI"
    RTI = "RTI"
    CSI = "CSI"
    PAULI = "PAULI"
    STV = "STV"


def _fmt_theta(theta: float) -> str:
    for label, value in (("0", 0.0), ("pi/2", math.pi / 2), ("pi", math.pi), ("-pi/2", -math.pi / 2)):
        if abs(theta - value) < 1e-12:
            return label
    return repr(float(theta))


def bit(x: int, i: int, n: int) -> int:
    """Bit ``i`` of ``x`` read most-significant first (``x[0]`` is the top bit)."""
    return (x >> (n - 1 - i)) & 1


@dataclass(frozen=True)
class PreparedInput:
    """A quantum input together with its generation recipe.

    ``ops`` is a tuple of ``(Gate, local qubit indices)``; ``prepare`` maps
    local index ``i`` onto ``qubits[i]``.
    """

    n_qubits: int
    description: str
    ops: tuple = ()
    reversible: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    def prepare(self, state: StateVector, qubits: Optional[Sequence[int]] = None) -> StateVector:
        qubits = tuple(range(self.n_qubits)) if qubits is None else tuple(qubits)
        if len(qubits) != self.n_qubits:
            raise ValueError(f"{self.description} needs {self.n_qubits} qubits, got {len(qubits)}")
        for g, local in self.ops:
            apply_gate(state, g, tuple(qubits[i] for i in local))
        return state

    def unprepare(self, state: StateVector, qubits: Optional[Sequence[int]] = None) -> StateVector:
        if not self.reversible:
            raise ValueError(f"{self.description} has no inverse procedure")
        qubits = tuple(range(self.n_qubits)) if qubits is None else tuple(qubits)
        if len(qubits) != self.n_qubits:
            raise ValueError(f"{self.description} needs {self.n_qubits} qubits, got {len(qubits)}")
        for g, local in reversed(self.ops):
            apply_gate(state, g.inverse(), tuple(qubits[i] for i in local))
        return state

    def state(self) -> StateVector:
        """The prepared state on a fresh register."""
        return self.prepare(new_state(self.n_qubits))

    def as_subroutine(self, name: Optional[str] = None) -> qir.Subroutine:
        """IR subroutine ``(qs: qubits[n])`` applying the recipe."""
        body = []
        for g, local in self.ops:
            targets = tuple(qir.QRef("qs", qir.Const(i)) for i in local)
            angle = qir.Const(float(g.theta)) if g.theta is not None else None
            body.append(qir.GateApp(g.kind, targets, angle))
        return qir.Subroutine(
            name or _ident(self.description),
            (qir.Param("qs", "qubits", qir.Const(self.n_qubits)),),
            tuple(body),
        )

    def __str__(self):
        return self.description


def _ident(text: str) -> str:
    return "Gen_" + "".join(c if c.isalnum() else "_" for c in text).strip("_")


# --- Algorithms 1-5 ----------------------------------------------------------------


def gen_ket_x(n: int, x: int) -> PreparedInput:
    """|x> by X gates on the 1-bits; qubit i holds bit i of x, most significant first."""
    if n < 0 or not 0 <= x < 2**n:
        raise ValueError(f"x={x} out of range for n={n}")
    ops = tuple((Gate("X"), (i,)) for i in range(n) if bit(x, i, n))
    return PreparedInput(n, f"CI(x={x},n={n})", ops, meta={"kind": "CI", "x": x})


def _comp_sup_ops(n: int, x: int, theta: float, qubits: Sequence[int]) -> list:
    # x' = x if x[0] = 0 else complement(x); the X on qubit 0 below restores
    # the x[0] = 1 branch so the phase lands on |x-bar>, as in the target.
    x0 = bit(x, 0, n)
    xp = x if x0 == 0 else (~x) & (2**n - 1)
    q0 = qubits[0]
    ops = [(Gate("H"), (q0,)), (Gate("R1", float(theta)), (q0,))]
    if x0:
        ops.append((Gate("X"), (q0,)))
    for i in range(1, n):
        if bit(xp, i, n):
            ops.append((Gate("X"), (qubits[i],)))
        ops.append((Gate("CNOT"), (q0, qubits[i])))
    return ops


def gen_comp_sup(n: int, x: int, theta: float = 0.0) -> PreparedInput:
    """(|x> + e^{i theta}|~x>)/sqrt(2), with ~x the bitwise complement."""
    if n < 1 or not 0 <= x < 2**n:
        raise ValueError(f"x={x} out of range for n={n}")
    ops = tuple(_comp_sup_ops(n, x, theta, list(range(n))))
    return PreparedInput(
        n, f"CSI(x={x},n={n},theta={_fmt_theta(theta)})", ops,
        meta={"kind": "CSI", "x": x, "theta": theta},
    )


def gen_two_value(n: int, x: int, y: int, theta: float = 0.0) -> PreparedInput:
    """(|x> + e^{i theta}|y>)/sqrt(2) for x != y."""
    if not (0 <= x < 2**n and 0 <= y < 2**n):
        raise ValueError("x, y out of range")
    if x == y:
        raise ValueError("x == y: use gen_ket_x")
    same = [i for i in range(n) if bit(x, i, n) == bit(y, i, n)]
    diff = [i for i in range(n) if bit(x, i, n) != bit(y, i, n)]
    ops = [(Gate("X"), (i,)) for i in same if bit(x, i, n)]
    xd = 0
    for i in diff:
        xd = (xd << 1) | bit(x, i, n)
    ops.extend(_comp_sup_ops(len(diff), xd, theta, diff))
    return PreparedInput(
        n, f"RTI(x={x},y={y},n={n},theta={_fmt_theta(theta)})", tuple(ops),
        meta={"kind": "RTI", "x": x, "y": y, "theta": theta},
    )


_PAULI_RECIPES = {
    1: (),
    2: ("X",),
    3: ("H",),
    4: ("X", "H"),
    5: ("H", "S"),
    6: ("H", "Sdg"),
}
PAULI_LABELS = {1: "|0>", 2: "|1>", 3: "|+>", 4: "|->", 5: "|+i>", 6: "|-i>"}


def gen_pauli(indices: Sequence[int]) -> PreparedInput:
    """Tensor product of Pauli eigenstates; index 1..6 = |0>,|1>,|+>,|->,|+i>,|-i>."""
    indices = tuple(int(i) for i in indices)
    ops = []
    for q, idx in enumerate(indices):
        if idx not in _PAULI_RECIPES:
            raise ValueError(f"Pauli index {idx} not in 1..6")
        ops.extend((Gate(k), (q,)) for k in _PAULI_RECIPES[idx])
    label = ",".join(str(i) for i in indices)
    return PreparedInput(len(indices), f"PAULI({label})", tuple(ops), meta={"kind": "PAULI", "indices": indices})


def gen_tensor(parts: Sequence[PreparedInput]) -> PreparedInput:
    """Product of independent inputs on consecutive registers."""
    ops = []
    offset = 0
    for p in parts:
        ops.extend((g, tuple(offset + i for i in local)) for g, local in p.ops)
        offset += p.n_qubits
    desc = "(x)".join(p.description for p in parts)
    return PreparedInput(offset, desc, tuple(ops), all(p.reversible for p in parts))


# --- mixed states -----------------------------------------------------------------------


@dataclass(frozen=True)
class Ensemble:
    """Mixture ``{(p_i, U_i)}``: prepare U_i|0> with probability p_i."""

    entries: tuple
    label: str = ""

    def __post_init__(self):
        if not self.entries:
            raise ValueError("empty ensemble")
        probs = [p for p, _ in self.entries]
        if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError("ensemble probabilities must be nonnegative and sum to 1")
        sizes = {g.n_qubits for _, g in self.entries}
        if len(sizes) != 1:
            raise ValueError("ensemble members must have equal qubit counts")

    @property
    def n_qubits(self) -> int:
        return self.entries[0][1].n_qubits

    @property
    def description(self) -> str:
        if self.label:
            return self.label
        parts = ";".join(f"{p:g}:{g.description}" for p, g in self.entries)
        return f"MIX({parts})"

    def density_matrix(self) -> np.ndarray:
        """Oracle-only dense density matrix (n <= 6)."""
        if self.n_qubits > 6:
            raise ValueError("density-matrix oracle limited to 6 qubits")
        dim = 2**self.n_qubits
        rho = np.zeros((dim, dim), dtype=complex)
        for p, g in self.entries:
            psi = g.state().amplitudes
            rho += p * np.outer(psi, psi.conj())
        return rho

    def as_subroutine(self, name: Optional[str] = None) -> qir.Subroutine:
        """IR generator: classical draw of the entry, then its recipe."""
        fracs = [Fraction(p).limit_denominator(1 << 20) for p, _ in self.entries]
        denom = math.lcm(*(f.denominator for f in fracs))
        branches = []
        acc = 0
        for frac, (_, g) in zip(fracs, self.entries):
            acc += int(frac * denom)
            body = g.as_subroutine().body
            branches.append((acc, body))
        chain = ()
        for threshold, body in reversed(branches):
            if not chain:
                chain = body
            else:
                chain = (qir.If(qir.parse_expr(f"r < {threshold}"), body, chain),)
        body = (qir.RandomInt("r", qir.Const(denom)),) + tuple(chain)
        return qir.Subroutine(
            name or _ident(self.description),
            (qir.Param("qs", "qubits", qir.Const(self.n_qubits)),),
            body,
        )


def maximally_mixed(n: int) -> Ensemble:
    """Uniform ensemble over the 2^n basis states."""
    p = 1.0 / 2**n
    return Ensemble(tuple((p, gen_ket_x(n, x)) for x in range(2**n)), label=f"MAXMIX(n={n})")


def gen_mixed(ensemble: Ensemble, rng: np.random.Generator) -> PreparedInput:
    """Sample one member with its probability."""
    probs = np.array([p for p, _ in ensemble.entries])
    r = int(rng.choice(len(probs), p=probs / probs.sum()))
    return ensemble.entries[r][1]


# --- samplers ----------------------------------------------------------------------------


def _distinct_pair(n: int, rng) -> tuple:
    if n < 1:
        raise ValueError("two-value inputs need n >= 1")
    x = int(rng.integers(2**n))
    y = int(rng.integers(2**n - 1))
    if y >= x:
        y += 1
    return x, y


def sample_input(kind, n: int, rng: np.random.Generator) -> PreparedInput:
    """Random input of the given kind on ``n`` qubits (theta = 0 for RTI/CSI).

    ``STV`` picks uniformly among |x>, (|x>+|y>)/sqrt(2) and (|x>+i|y>)/sqrt(2).
    With ``n == 0`` every kind yields the empty input.
    """
    kind = InputKind(kind)
    if n == 0:
        return gen_ket_x(0, 0)
    if kind is InputKind.CI:
        return gen_ket_x(n, int(rng.integers(2**n)))
    if kind is InputKind.RTI:
        x, y = _distinct_pair(n, rng)
        return gen_two_value(n, x, y, 0.0)
    if kind is InputKind.CSI:
        return gen_comp_sup(n, int(rng.integers(2**n)), 0.0)
    if kind is InputKind.PAULI:
        return gen_pauli([int(v) for v in rng.integers(1, 7, size=n)])
    form = int(rng.integers(3)) if n >= 1 else 0
    if form == 0:
        return gen_ket_x(n, int(rng.integers(2**n)))
    x, y = _distinct_pair(n, rng)
    return gen_two_value(n, x, y, 0.0 if form == 1 else math.pi / 2)


def scaq_check(inputs) -> tuple:
    """Superposition-cover-all-qubits: every qubit superposed in some input.

    Returns ``(passed, uncovered qubit indices)``. A qubit is superposed when
    both computational outcomes have probability above ``SCAQ_EPS``. Only
    pure inputs are accepted; ensembles raise TypeError.
    """
    if any(isinstance(i, Ensemble) for i in inputs):
        raise TypeError("SCAQ is defined for pure inputs only")
    states = [i.state() if isinstance(i, PreparedInput) else i for i in inputs]
    if not states:
        return False, ()
    n = states[0].n_qubits
    if any(s.n_qubits != n for s in states):
        raise ValueError("inputs have different qubit counts")
    covered = set()
    for s in states:
        for q in range(n):
            p = exact_distribution(s, [q])
            if p[0] > SCAQ_EPS and p[1] > SCAQ_EPS:
                covered.add(q)
    uncovered = tuple(q for q in range(n) if q not in covered)
    return not uncovered, uncovered


# --- generator lookup (used by suite files) ------------------------------------------------

GENERATORS = {
    "ket_x": gen_ket_x,
    "comp_sup": gen_comp_sup,
    "two_value": gen_two_value,
    "pauli": gen_pauli,
}


def make_input(spec: dict) -> PreparedInput:
    """Build an input from ``{"gen": name, **kwargs}``; theta accepts "pi", "pi/2" strings."""
    original = dict(spec)
    spec = dict(spec)
    name = spec.pop("gen", None)
    if name not in GENERATORS:
        raise ValueError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")
    if "theta" in spec:
        spec["theta"] = parse_angle(spec["theta"])
    made = GENERATORS[name](**spec)
    return replace(made, meta={**made.meta, "spec": original})


def parse_angle(value) -> float:
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower().replace(" ", "")
    sign = -1.0 if text.startswith("-") else 1.0
    text = text.lstrip("+-")
    if text == "pi":
        return sign * math.pi
    if text.startswith("pi/"):
        return sign * math.pi / float(text[3:])
    if text.endswith("*pi"):
        return sign * float(text[:-3]) * math.pi
    return sign * float(text)
