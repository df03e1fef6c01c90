"""The benchmark catalog: programs, IO marks, oracles and default unit-test suites."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from ..checkers import Binding
from ..qir import Subroutine
from ..testkit import IOMark, IOType, Suite, TestCase, classify_io_type, parse_io_mark
from . import oracles as O
from . import programs as P


@dataclass(frozen=True)
class BenchmarkEntry:
    """One benchmark.

    ``binding(n)`` lays the program out at scale ``n`` for relation checks and
    trigger trials; ``check_mode`` selects how a trial is judged ("inverse":
    undo the oracle and the input, "map": the program should map the input
    register onto the output register unchanged, "qft": product-form check
    for classical inputs). ``scale`` is the default experiment size.
    """

    name: str
    subroutine: Subroutine
    io_mark: IOMark
    io_type: IOType
    spec_oracle: Callable
    suite_specs: tuple = ()
    binding: Optional[Callable[[int], Binding]] = None
    check_mode: Optional[str] = None
    scale: int = 3
    partitions: dict = field(default_factory=dict)

    @property
    def default_suite(self) -> list:
        return [TestCase.from_spec(s) for s in self.suite_specs]

    def suite(self) -> Suite:
        return Suite(self.name, self.io_mark, self.default_suite, dict(self.partitions))

    @property
    def is_adjointable(self) -> bool:
        return self.subroutine.is_adjointable

    def layout_binding(self, n: int) -> Binding:
        if self.binding is None:
            raise ValueError(f"{self.name} has no relation-check layout")
        return self.binding(n)


def _ket(n, x):
    return {"gen": "ket_x", "n": n, "x": x}


def _two(n, x, y, theta=0):
    return {"gen": "two_value", "n": n, "x": x, "y": y, "theta": theta}


def _pauli(*idx):
    return {"gen": "pauli", "indices": list(idx)}


def _state(spec):
    return {"check": "state", "input": spec}


def _measure(expect):
    return {"check": "measure", "expect": expect}


def _qubits(n):
    return Binding()


def _generated(n):
    return Binding(clean=("qs",))


def _pair(n):
    return Binding(lengths={"qs1": n, "qs2": n})


def _entries() -> list:
    cos2 = math.cos(math.pi / 8) ** 2
    out = []

    def add(name, sub, mark, oracle, suite=(), binding=None, mode=None, scale=3, partitions=None):
        m = parse_io_mark(mark)
        out.append(BenchmarkEntry(name, sub, m, classify_io_type(m), oracle, tuple(suite), binding, mode,
                                  scale, dict(partitions or {})))

    add("QRandom", P.qrandom(), "QRandom : (n) -> (r')", O.spec_qrandom, [
        {"name": "n0", "classical": {"n": 0}, "lengths": {"qs": 1},
         "expect_classical": {"r'": {"range": [0, 1]}}, "repetitions": 50},
        {"name": "n5", "classical": {"n": 5}, "lengths": {"qs": 5},
         "expect_classical": {"r'": {"range": [0, 31]}}, "repetitions": 50},
        {"name": "n3_uniform", "classical": {"n": 3}, "lengths": {"qs": 3},
         "expect_classical": {"r'": {"distribution": {str(i): 1 / 8 for i in range(8)}}}, "repetitions": 800},
    ], partitions={"n": ["n=0", "n>0"]}, scale=3)

    add("GenQInt", P.gen_qint(), "GenQInt : (n, x) -> (q:qs')", O.spec_gen_qint, [
        {"name": "n5_x0", "classical": {"x": 0}, "lengths": {"qs": 5},
         "expect_quantum": {"qs'": _measure({"equals": 0})}, "repetitions": 10},
        {"name": "n6_x23", "classical": {"x": 23}, "lengths": {"qs": 6},
         "expect_quantum": {"qs'": _measure({"equals": 23})}, "repetitions": 10},
    ], binding=lambda n: Binding(classical={"x": (2**n - 1) // 3}, clean=("qs",)), mode="inverse", scale=4)

    add("GenXPlusY", P.gen_x_plus_y(), "GenXPlusY : (n, x, y) -> (q:qs')", O.spec_gen_x_plus_y, [
        {"name": "n5_x20_y20", "classical": {"x": 20, "y": 20}, "lengths": {"qs": 5},
         "expect_quantum": {"qs'": _measure({"equals": 20})}, "repetitions": 10},
        {"name": "n4_x5_y12", "classical": {"x": 5, "y": 12}, "lengths": {"qs": 4},
         "expect_quantum": {"qs'": _measure({"distribution": {"5": 0.5, "12": 0.5}})}, "repetitions": 400},
        {"name": "n4_x5_y12_state", "classical": {"x": 5, "y": 12}, "lengths": {"qs": 4},
         "expect_quantum": {"qs'": _state(_two(4, 5, 12))}, "repetitions": 20},
    ], partitions={"x,y": ["x=y", "x!=y"]},
        binding=lambda n: Binding(classical={"x": 2**n - 1, "y": 1 % 2**n}, clean=("qs",)), mode="inverse", scale=4)

    add("GenMaxSup", P.gen_max_sup(), "GenMaxSup : (n) -> (q:qs')", O.spec_gen_max_sup, [
        {"name": "n1", "lengths": {"qs": 1}, "expect_quantum": {"qs'": _state(_pauli(3))}, "repetitions": 20},
        {"name": "n5", "lengths": {"qs": 5}, "expect_quantum": {"qs'": _state(_pauli(3, 3, 3, 3, 3))},
         "repetitions": 20},
    ], binding=_generated, mode="inverse", scale=4)

    add("GenMaxMix", P.gen_max_mix(), "GenMaxMix : (n) -> (q:qs')", O.spec_gen_max_mix, [
        {"name": "n1", "lengths": {"qs": 1},
         "expect_quantum": {"qs'": _measure({"distribution": {"0": 0.5, "1": 0.5}})}, "repetitions": 400},
        {"name": "n5", "lengths": {"qs": 5}, "expect_quantum": {"qs'": _measure({"range": [0, 31]})},
         "repetitions": 100},
    ], scale=3)

    def swap_case(name, g1, g2, p0, n):
        table = {"0": p0, "1": 1 - p0} if p0 < 1 else {"0": 1.0}
        return {"name": name, "lengths": {"anc": 1, "qs1": n},
                "handles": {"GenRho1": g1, "GenRho2": g2},
                "expect_classical": {"res'": {"distribution": table}}, "repetitions": 1000}

    mix1 = {"mixed": {"gen": "maxmix", "n": 1}}
    add("SwapTest", P.swap_test(), "SwapTest : (n, sub:q:GenRho1, sub:q:GenRho2) -> (res')", O.spec_swap_test, [
        swap_case("ket011_ket110", {"input": _ket(3, 3)}, {"input": _ket(3, 6)}, 0.5, 3),
        swap_case("ket1001_twice", {"input": _ket(4, 9)}, {"input": _ket(4, 9)}, 1.0, 4),
        swap_case("ket0_plus", {"input": _ket(1, 0)}, {"input": _pauli(3)}, 0.75, 1),
        swap_case("mixed_twice", mix1, mix1, 0.75, 1),
        swap_case("plus_mixed", {"input": _pauli(3)}, mix1, 0.75, 1),
    ], partitions={"rho1": ["classical", "superposition", "mixed"], "rho2": ["classical", "superposition", "mixed"]})

    def purity_case(name, gen, n, expect):
        return {"name": name, "classical": {"t": 100}, "lengths": {"anc": 1, "qs1": n},
                "handles": {"GenRho": gen}, "expect_classical": {"isPure'": expect}, "repetitions": 3}

    add("Purity", P.purity(), "Purity : (n, t, sub:q:GenRho) -> (isPure')", O.spec_purity, [
        purity_case("ket0101", {"input": _ket(4, 5)}, 4, {"equals": True}),
        purity_case("bell", {"input": _two(2, 0, 3)}, 2, {"equals": True}),
        purity_case("mixed", mix1, 1, {"mostly": False, "fraction": 0.6}),
    ], partitions={"rho": ["classical", "superposition", "mixed"]})

    def ip_case(name, g1, g2, value, n):
        return {"name": name, "classical": {"t": 200}, "lengths": {"anc": 1, "qs1": n},
                "handles": {"GenRho1": g1, "GenRho2": g2},
                "expect_classical": {"est'": {"approx": value, "tol": 0.3}}, "repetitions": 3}

    add("InnerProduct", P.inner_product(),
        "InnerProduct : (n, t, sub:q:GenRho1, sub:q:GenRho2) -> (est')", O.spec_inner_product, [
            ip_case("ket0011_ket1010", {"input": _ket(4, 3)}, {"input": _ket(4, 10)}, 0.0, 4),
            ip_case("ket1001_twice", {"input": _ket(4, 9)}, {"input": _ket(4, 9)}, 1.0, 4),
            ip_case("ket0_plus", {"input": _ket(1, 0)}, {"input": _pauli(3)}, 0.5, 1),
            ip_case("mixed_twice", mix1, mix1, 0.5, 1),
            ip_case("plus_mixed", {"input": _pauli(3)}, mix1, 0.5, 1),
        ])

    def same(name, spec, reps=5):
        return {"name": name, "quantum": {"qs": spec}, "expect_quantum": {"qs'": _state(spec)}, "repetitions": reps}

    add("Empty", P.empty(), "Empty : (n, q:qs) -> (q:qs')", O.spec_identity, [
        same("ci", _ket(3, 5)),
        same("csi", {"gen": "comp_sup", "n": 3, "x": 2, "theta": "pi/2"}),
        same("rti", _two(3, 1, 4)),
    ], binding=_qubits, mode="inverse", scale=10)

    def rev(name, n, x):
        y = O.reverse_bits(x, n)
        return {"name": name, "quantum": {"qs": _ket(n, x)}, "expect_quantum": {"qs'": _state(_ket(n, y))},
                "repetitions": 5}

    add("Reverse", P.reverse(), "Reverse : (n, q:qs) -> (q:qs')", O.spec_reverse, [
        rev("n1", 1, 1), rev("n5_odd", 5, 0b11001), rev("n6_even", 6, 0b010011),
    ], partitions={"n": ["n=1", "n>1 odd", "n even"]}, binding=_qubits, mode="inverse", scale=8)

    phi, psi = _pauli(3, 5, 2), _pauli(6, 1, 4)
    add("MultiSWAP", P.multi_swap(), "MultiSWAP : (n, q:qs1, q:qs2) -> (q:qs1', q:qs2')", O.spec_multi_swap, [
        {"name": "random_pauli", "quantum": {"qs1": phi, "qs2": psi},
         "expect_quantum": {"qs1'": _state(psi), "qs2'": _state(phi)}, "repetitions": 10},
    ], binding=_pair, mode="inverse", scale=6)

    add("CRk", P.crk(), "CRk : (k, q:qctrl, q:qtar) -> (q:qctrl', q:qtar')", O.spec_crk, [
        {"name": "k2_c0_plus", "classical": {"k": 2}, "quantum": {"qctrl": _ket(1, 0), "qtar": _pauli(3)},
         "expect_quantum": {"qctrl'": _state(_ket(1, 0)), "qtar'": _state(_pauli(3))}, "repetitions": 10},
        {"name": "k1_c1_plus", "classical": {"k": 1}, "quantum": {"qctrl": _ket(1, 1), "qtar": _pauli(3)},
         "expect_quantum": {"qctrl'": _state(_ket(1, 1)), "qtar'": _state(_pauli(5))}, "repetitions": 10},
    ], partitions={"c": ["c=0", "c=1"]},
        binding=lambda n: Binding(classical={"k": 1}), mode="inverse", scale=2)

    def pf(name, spec, changed):
        chk = {"check": "changed" if changed else "state", "input": spec}
        return {"name": name, "quantum": {"qs": spec}, "expect_quantum": {"qs'": chk}, "repetitions": 10}

    add("PhaseFlip", P.phase_flip(), "PhaseFlip : (n, q:qs) -> (q:qs')", O.spec_phase_flip, [
        pf("n1_zero", _ket(1, 0), False),
        pf("n1_one", _ket(1, 1), False),
        pf("n1_plus", _pauli(3), True),
        pf("n5_zero", _ket(5, 0), False),
        pf("n5_x13", _ket(5, 0b01101), False),
        pf("n5_zero_plus_x25", _two(5, 0, 0b11001), True),
        pf("n4_x6_plus_x9", _two(4, 0b0110, 0b1001), False),
    ], partitions={"n": ["n=1", "n>1"], "qs": ["I", "II", "III", "IV"]},
        binding=_qubits, mode="inverse", scale=4)

    def grover_case(n, K):
        return {"name": f"n{n}_K{K}", "lengths": {"qs": n}, "handles": {"Oracle": {"phase_oracle": {"n": n, "K": K}}},
                "expect_quantum": {"qs'": _measure({"mostly": K, "fraction": 0.9})}, "repetitions": 100}

    add("Grover", P.grover(), "Grover : (n, sub:q:OracleK) -> (q:qs')", O.spec_grover,
        [grover_case(4, 5), grover_case(4, 12), grover_case(3, 6)],
        binding=lambda n: Binding(handles={"Oracle": P.make_phase_oracle(n, (2**n - 1) // 3)}, clean=("qs",)),
        mode="inverse", scale=4)

    add("QFT", P.qft(), "QFT : (n, q:qs) -> (q:qs'^BE)", O.spec_qft, [
        {"name": "n1_C", "quantum": {"qs": _ket(1, 0)}, "expect_quantum": {"qs'": {"check": "qft_output", "j": 0}},
         "repetitions": 20},
        {"name": "n2_C", "quantum": {"qs": _ket(2, 1)}, "expect_quantum": {"qs'": {"check": "qft_output", "j": 1}},
         "repetitions": 20},
        {"name": "n7_C", "quantum": {"qs": _ket(7, 0b1011001)},
         "expect_quantum": {"qs'": {"check": "qft_output", "j": 0b1011001}}, "repetitions": 20},
        {"name": "n1_S", "quantum": {"qs": {"gen": "comp_sup", "n": 1, "x": 0, "theta": "pi/2"}},
         "expect_quantum": {"qs'": {"check": "qft_pair", "a": 0, "b": 1}}, "repetitions": 200},
        {"name": "n2_S", "quantum": {"qs": {"gen": "comp_sup", "n": 2, "x": 0}},
         "expect_quantum": {"qs'": {"check": "qft_pair", "a": 0, "b": 3}}, "repetitions": 200},
        {"name": "n6_S", "quantum": {"qs": {"gen": "comp_sup", "n": 6, "x": 0b101101}},
         "expect_quantum": {"qs'": {"check": "qft_pair", "a": 0b101101, "b": 0b010010}}, "repetitions": 200},
    ], partitions={"n": ["n=1", "n=2", "n>=3"], "qs": ["C", "S"]}, binding=_qubits, mode="qft", scale=6)

    def add_case(name, n, x, y):
        return {"name": name, "quantum": {"qs1": _ket(n, x), "qs2": _ket(n, y)},
                "expect_quantum": {"qs1'": _state(_ket(n, x)), "qs2'": _state(_ket(n, (x + y) % 2**n))},
                "repetitions": 5}

    add("QAdd", P.qadd(), "QAdd : (n, q:qs1, q:qs2) -> (q:qs1', q:qs2')", O.spec_qadd, [
        add_case("no_overflow", 4, 0b0011, 0b0110),
        add_case("overflow", 4, 0b1100, 0b1001),
    ], partitions={"x+y": ["overflow", "no overflow"]}, binding=_pair, mode="inverse", scale=3)

    add("Teleport", P.teleport(), "Teleport : (q:qsrc) -> (q:qdest')", O.spec_identity, [
        {"name": f"pauli{i}", "quantum": {"qsrc": _pauli(i)}, "lengths": {"qaux": 1, "qdest": 1},
         "expect_quantum": {"qdest'": _state(_pauli(i))}, "repetitions": 20}
        for i in range(1, 7)
    ], binding=lambda n: Binding(inputs=("qsrc",), outputs=("qdest",)), mode="map", scale=1)

    def qpe_case(name, up, nclock, target, expect, reps):
        return {"name": name, "lengths": {"clock": nclock}, "handles": {"Upower": {"upower": up}},
                "quantum": {"target": target}, "expect_quantum": {"clock'": _measure(expect)}, "repetitions": reps}

    add("QPE", P.qpe(), "QPE : (Nclock, Ntarget, sub:q:Upower, q:target) -> (q:clock'^BE)", O.spec_qpe, [
        qpe_case("X_minus", "X", 3, _pauli(4), {"equals": 4}, 50),
        qpe_case("H_zero", "H", 3, _ket(1, 0), {"distribution": {"0": cos2, "4": 1 - cos2}}, 1000),
        qpe_case("CSSdg_101", "CSSdg", 3, _ket(3, 5), {"equals": 6}, 50),
        qpe_case("CSSdg_101_110", "CSSdg", 3, _two(3, 5, 6), {"distribution": {"6": 0.5, "2": 0.5}}, 400),
        qpe_case("CRz_10", "CRz", 7, _ket(2, 2), {"range": [101, 112], "fraction": 0.8}, 50),
    ], partitions={"Nclock": ["ins", "suf"], "Ntarget": ["=1", ">=2"], "Upower": ["fev", "ifev"],
                   "target": ["es", "nes"]},
        binding=lambda n: Binding(handles={"Upower": P.upower_gate("X")}, lengths={"clock": n, "target": 1}, clean=("clock",)),
        mode="inverse", scale=3)
    return out


@lru_cache(maxsize=None)
def _catalog() -> tuple:
    return tuple(_entries())


def catalog() -> list:
    return list(_catalog())


def get(name: str) -> BenchmarkEntry:
    for e in _catalog():
        if e.name == name:
            return e
    raise KeyError(f"unknown benchmark {name!r}")


def names() -> list:
    return [e.name for e in _catalog()]


PAPER_IO_TYPES = {
    "QRandom": IOType.CLASSICAL,
    "GenQInt": IOType.GENERATE_QUANTUM,
    "GenXPlusY": IOType.GENERATE_QUANTUM,
    "GenMaxSup": IOType.GENERATE_QUANTUM,
    "GenMaxMix": IOType.GENERATE_QUANTUM,
    "SwapTest": IOType.DETECT_QUANTUM,
    "Purity": IOType.DETECT_QUANTUM,
    "InnerProduct": IOType.DETECT_QUANTUM,
    "Empty": IOType.TRANSFORM,
    "Reverse": IOType.TRANSFORM,
    "MultiSWAP": IOType.TRANSFORM,
    "CRk": IOType.TRANSFORM,
    "PhaseFlip": IOType.TRANSFORM,
    "Grover": IOType.TRANSFORM,
    "QFT": IOType.TRANSFORM,
    "QAdd": IOType.TRANSFORM,
    "Teleport": IOType.TRANSFORM,
    "QPE": IOType.TRANSFORM,
}
