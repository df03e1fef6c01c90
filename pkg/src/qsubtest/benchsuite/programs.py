"""The benchmark subroutines written in the IR.

The IR has no qubit allocation, so workspace registers (ancillas, the
measured register of QRandom) are explicit qubit-array parameters; IO marks
leave them out.
"""

from __future__ import annotations

from functools import lru_cache

from ..qir import (
    Subroutine,
    assign,
    call,
    controlled,
    for_,
    gate,
    handle,
    if_,
    int_,
    measure,
    qubits,
    random_int,
    repeat_until,
    subroutine,
    within_apply,
)

GEN_SIG = ("qubits",)
UPOWER_SIG = ("int", "qubits")


def _bit(value: str, i: str, n: str = "len(qs)") -> str:
    """Expression for bit ``i`` (0 = most significant) of an n-bit integer."""
    return f"(({value}) >> ({n} - 1 - ({i}))) & 1 == 1"


@lru_cache(maxsize=None)
def reset() -> Subroutine:
    """Measure a register and flip every 1 back to 0."""
    return subroutine(
        "Reset",
        [qubits("qs")],
        [
            measure("m", "qs"),
            for_("i", 0, "len(qs) - 1", [if_(_bit("m", "i"), [gate("X", "qs[i]")])]),
        ],
    )


@lru_cache(maxsize=None)
def qrandom() -> Subroutine:
    """Uniform random integer from |+>^m measured; ``m = len(qs)``."""
    return subroutine(
        "QRandom",
        [int_("n"), qubits("qs")],
        [
            for_("i", 0, "len(qs) - 1", [gate("H", "qs[i]")]),
            measure("r", "qs"),
            for_("i", 0, "len(qs) - 1", [if_(_bit("r", "i"), [gate("X", "qs[i]")])]),
        ],
        returns="r",
    )


@lru_cache(maxsize=None)
def gen_qint() -> Subroutine:
    return subroutine(
        "GenQInt",
        [int_("x"), qubits("qs")],
        [for_("i", 0, "len(qs) - 1", [if_(_bit("x", "i"), [gate("X", "qs[i]")])])],
    )


@lru_cache(maxsize=None)
def gen_x_plus_y() -> Subroutine:
    """(|x> + |y>)/sqrt(2): H on the first differing bit, CNOT-copied to the others."""
    first = "((x ^ y) >> (len(qs) - 1 - {})) == 1"
    differ = "(((x ^ y) >> (len(qs) - 1 - {})) & 1) == 1"
    return subroutine(
        "GenXPlusY",
        [int_("x"), int_("y"), qubits("qs")],
        [
            for_(
                "i",
                0,
                "len(qs) - 1",
                [
                    if_(
                        differ.format("i"),
                        [
                            if_(
                                first.format("i"),
                                [gate("H", "qs[i]")],
                                [
                                    for_(
                                        "j",
                                        0,
                                        "i - 1",
                                        [if_(first.format("j"), [gate("CNOT", "qs[j]", "qs[i]")])],
                                    ),
                                ],
                            )
                        ],
                    )
                ],
            ),
            # branch b of the first differing qubit carries b on every differing
            # qubit; flip those where x disagrees with x at the first differing bit
            for_(
                "i",
                0,
                "len(qs) - 1",
                [
                    if_(
                        f"not ({differ.format('i')}) and {_bit('x', 'i')}",
                        [gate("X", "qs[i]")],
                    ),
                    for_(
                        "j",
                        0,
                        "i - 1",
                        [
                            if_(
                                f"{first.format('j')} and {differ.format('i')} and "
                                f"(({_bit('x', 'i')}) != ({_bit('x', 'j')}))",
                                [gate("X", "qs[i]")],
                            )
                        ],
                    ),
                ],
            ),
        ],
    )


@lru_cache(maxsize=None)
def gen_max_sup() -> Subroutine:
    return subroutine("GenMaxSup", [qubits("qs")], [for_("i", 0, "len(qs) - 1", [gate("H", "qs[i]")])])


@lru_cache(maxsize=None)
def gen_max_mix() -> Subroutine:
    """Uniform ensemble of |x>, x drawn classically (a classical random source)."""
    return subroutine(
        "GenMaxMix",
        [qubits("qs")],
        [random_int("r", "2 ** len(qs)"), call(gen_qint(), "r", "qs")],
    )


@lru_cache(maxsize=None)
def swap_test() -> Subroutine:
    """Single-shot SWAP test; returns 0 with probability (1 + tr(rho1 rho2))/2.

    The ancilla and both registers are measured back to |0...0> afterwards.
    """
    return subroutine(
        "SwapTest",
        [
            handle("GenRho1", GEN_SIG),
            handle("GenRho2", GEN_SIG),
            qubits("anc", 1),
            qubits("qs1"),
            qubits("qs2", "len(qs1)"),
        ],
        [
            call("GenRho1", "qs1", signature=GEN_SIG),
            call("GenRho2", "qs2", signature=GEN_SIG),
            gate("H", "anc[0]"),
            for_("i", 0, "len(qs1) - 1", [controlled("anc", gate("SWAP", "qs1[i]", "qs2[i]"))]),
            gate("H", "anc[0]"),
            measure("res", "anc"),
            if_("res == 1", [gate("X", "anc[0]")]),
            call(reset(), "qs1"),
            call(reset(), "qs2"),
        ],
        returns="res",
    )


@lru_cache(maxsize=None)
def purity() -> Subroutine:
    """True iff t SWAP tests of rho against itself all return 0."""
    st = swap_test()
    return subroutine(
        "Purity",
        [int_("t"), handle("GenRho", GEN_SIG), qubits("anc", 1), qubits("qs1"), qubits("qs2", "len(qs1)")],
        [
            assign("ones", 0),
            for_(
                "i",
                1,
                "t",
                [call(st, "GenRho", "GenRho", "anc", "qs1", "qs2", bind="res"), assign("ones", "ones + res")],
            ),
            assign("isPure", "ones == 0"),
        ],
        returns="isPure",
    )


@lru_cache(maxsize=None)
def inner_product() -> Subroutine:
    """Estimate of tr(rho1 rho2) = 2 p0 - 1 from t SWAP tests."""
    st = swap_test()
    return subroutine(
        "InnerProduct",
        [
            int_("t"),
            handle("GenRho1", GEN_SIG),
            handle("GenRho2", GEN_SIG),
            qubits("anc", 1),
            qubits("qs1"),
            qubits("qs2", "len(qs1)"),
        ],
        [
            assign("ones", 0),
            for_(
                "i",
                1,
                "t",
                [call(st, "GenRho1", "GenRho2", "anc", "qs1", "qs2", bind="res"), assign("ones", "ones + res")],
            ),
            assign("est", "1.0 - 2.0 * float(ones) / float(t)"),
        ],
        returns="est",
    )


@lru_cache(maxsize=None)
def empty() -> Subroutine:
    return subroutine("Empty", [qubits("qs")], [])


@lru_cache(maxsize=None)
def reverse() -> Subroutine:
    return subroutine(
        "Reverse",
        [qubits("qs")],
        [for_("i", 0, "len(qs) / 2 - 1", [gate("SWAP", "qs[i]", "qs[len(qs) - 1 - i]")])],
    )


@lru_cache(maxsize=None)
def multi_swap() -> Subroutine:
    return subroutine(
        "MultiSWAP",
        [qubits("qs1"), qubits("qs2", "len(qs1)")],
        [for_("i", 0, "len(qs1) - 1", [gate("SWAP", "qs1[i]", "qs2[i]")])],
    )


@lru_cache(maxsize=None)
def crk() -> Subroutine:
    """Controlled R1(pi / 2**k)."""
    return subroutine(
        "CRk",
        [int_("k"), qubits("qctrl", 1), qubits("qtar", 1)],
        [assign("theta", "PI / 2 ** k"), controlled("qctrl", gate("R1", "qtar[0]", angle="theta"))],
    )


@lru_cache(maxsize=None)
def qft() -> Subroutine:
    """Big-endian QFT: H and controlled rotations per qubit, then Reverse."""
    return subroutine(
        "QFT",
        [qubits("qs")],
        [
            for_(
                "i",
                0,
                "len(qs) - 2",
                [
                    gate("H", "qs[i]"),
                    for_("j", "i + 1", "len(qs) - 1", [call(crk(), "j - i", "qs[j]", "qs[i]")]),
                ],
            ),
            gate("H", "qs[len(qs) - 1]"),
            call(reverse(), "qs"),
        ],
    )


@lru_cache(maxsize=None)
def phase_flip() -> Subroutine:
    """|0...0> -> |0...0>, |x> -> -|x> otherwise.

    A zero-polarity controlled Z marks |0...0> with -1 and the ZXZX = -I
    sequence on qs[0] moves that sign onto every other basis state.
    """
    return subroutine(
        "PhaseFlip",
        [qubits("qs")],
        [
            within_apply(
                [gate("X", "qs[len(qs) - 1]")],
                [controlled("qs[0:len(qs) - 1]", gate("Z", "qs[len(qs) - 1]"), polarity=0)],
            ),
            gate("Z", "qs[0]"),
            gate("X", "qs[0]"),
            gate("Z", "qs[0]"),
            gate("X", "qs[0]"),
        ],
    )


@lru_cache(maxsize=None)
def grover() -> Subroutine:
    """round(pi/4 sqrt(2^n)) iterations of oracle, H layer, PhaseFlip, H layer."""
    hs = for_("i", 0, "len(qs) - 1", [gate("H", "qs[i]")])
    return subroutine(
        "Grover",
        [handle("Oracle", GEN_SIG), qubits("qs")],
        [
            hs,
            assign("iters", "round(PI / 4 * sqrt(2.0 ** len(qs)))"),
            for_(
                "it",
                1,
                "iters",
                [
                    call("Oracle", "qs", signature=GEN_SIG),
                    for_("i", 0, "len(qs) - 1", [gate("H", "qs[i]")]),
                    call(phase_flip(), "qs"),
                    for_("i", 0, "len(qs) - 1", [gate("H", "qs[i]")]),
                ],
            ),
        ],
    )


@lru_cache(maxsize=None)
def qadd() -> Subroutine:
    """|x>|y> -> |x>|x + y mod 2^n> via phase addition in the Fourier basis."""
    return subroutine(
        "QAdd",
        [qubits("qs1"), qubits("qs2", "len(qs1)")],
        [
            call(qft(), "qs2"),
            for_(
                "i",
                0,
                "len(qs2) - 1",
                [
                    for_(
                        "m",
                        "len(qs1) - 1 - i",
                        "len(qs1) - 1",
                        [call(crk(), "i + m - len(qs1) + 1", "qs1[m]", "qs2[i]")],
                    )
                ],
            ),
            call(qft(), "qs2", adjoint=True),
        ],
    )


@lru_cache(maxsize=None)
def teleport() -> Subroutine:
    """Teleport qsrc onto qdest; qsrc and qaux are measured and reset."""
    return subroutine(
        "Teleport",
        [qubits("qsrc", 1), qubits("qaux", 1), qubits("qdest", 1)],
        [
            gate("H", "qaux[0]"),
            gate("CNOT", "qaux[0]", "qdest[0]"),
            gate("CNOT", "qsrc[0]", "qaux[0]"),
            gate("H", "qsrc[0]"),
            measure("m1", "qsrc"),
            measure("m2", "qaux"),
            if_("m2 == 1", [gate("X", "qdest[0]"), gate("X", "qaux[0]")]),
            if_("m1 == 1", [gate("Z", "qdest[0]"), gate("X", "qsrc[0]")]),
        ],
    )


@lru_cache(maxsize=None)
def qpe() -> Subroutine:
    """Phase estimation; clock qubit len(clock)-1-i controls Upower(2^i)."""
    return subroutine(
        "QPE",
        [handle("Upower", UPOWER_SIG), qubits("clock"), qubits("target")],
        [
            for_("i", 0, "len(clock) - 1", [gate("H", "clock[i]")]),
            for_(
                "i",
                0,
                "len(clock) - 1",
                [
                    controlled(
                        "clock[len(clock) - 1 - i]",
                        call("Upower", "2 ** i", "target", signature=UPOWER_SIG),
                    )
                ],
            ),
            call(qft(), "clock", adjoint=True),
        ],
    )


@lru_cache(maxsize=None)
def random012() -> Subroutine:
    """Repeat-until-success sampler of 0, 1, 2 with equal probability."""
    return subroutine(
        "Random012",
        [qubits("qs", 2)],
        [
            repeat_until(
                [
                    gate("H", "qs[0]"),
                    gate("H", "qs[1]"),
                    measure("m", "qs"),
                    if_("m >= 2", [gate("X", "qs[0]")]),
                    if_("m % 2 == 1", [gate("X", "qs[1]")]),
                ],
                "m < 3",
            )
        ],
        returns="m",
    )


# --- test doubles and Upower operators ----------------------------------------------------


@lru_cache(maxsize=None)
def make_phase_oracle(n: int, K: int) -> Subroutine:
    """U_f |x> = (-1)^[x == K] |x> on n qubits (Grover test double)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= K < 2**n:
        raise ValueError(f"K={K} outside [0, 2^{n})")
    z = controlled(f"qs[0:{n - 1}]", gate("Z", f"qs[{n - 1}]"), polarity=K >> 1)
    body = [z] if K & 1 else [within_apply([gate("X", f"qs[{n - 1}]")], [z])]
    return subroutine(f"Oracle{n}_{K}", [qubits("qs", n)], body)


@lru_cache(maxsize=None)
def upower_gate(kind: str) -> Subroutine:
    """U^p for a self-inverse one-qubit gate (X, H, ...): applied iff p is odd."""
    return subroutine(
        f"Upower{kind}",
        [int_("p"), qubits("target", 1)],
        [if_("p % 2 == 1", [gate(kind, "target[0]")])],
    )


@lru_cache(maxsize=None)
def upower_cs_sdg() -> Subroutine:
    """(Controlled (S x Sdg))^p on three qubits, target[0] controlling."""
    return subroutine(
        "UpowerCSSdg",
        [int_("p"), qubits("target", 3)],
        [
            controlled("target[0]", gate("R1", "target[1]", angle="p * PI / 2")),
            controlled("target[0]", gate("R1", "target[2]", angle="-p * PI / 2")),
        ],
    )


@lru_cache(maxsize=None)
def upower_crz(theta_num: int = 2, theta_den: int = 3) -> Subroutine:
    """(Controlled Rz(theta))^p on two qubits, theta = pi * num / den."""
    return subroutine(
        f"UpowerCRz{theta_num}_{theta_den}",
        [int_("p"), qubits("target", 2)],
        [controlled("target[0]", gate("Rz", "target[1]", angle=f"p * PI * {theta_num} / {theta_den}"))],
    )


def all_programs() -> dict:
    """Name -> Subroutine for every benchmark program (QPE included)."""
    subs = [
        qrandom(), gen_qint(), gen_x_plus_y(), gen_max_sup(), gen_max_mix(), swap_test(),
        purity(), inner_product(), empty(), reverse(), multi_swap(), crk(), phase_flip(),
        grover(), qft(), qadd(), teleport(), qpe(),
    ]
    return {s.name: s for s in subs}


def upower_by_name(name: str) -> Subroutine:
    """Upower test doubles addressable from suite files."""
    table = {
        "X": lambda: upower_gate("X"),
        "H": lambda: upower_gate("H"),
        "Z": lambda: upower_gate("Z"),
        "CSSdg": upower_cs_sdg,
        "CRz": upower_crz,
    }
    if name not in table:
        raise ValueError(f"unknown Upower {name!r}; choose from {sorted(table)}")
    return table[name]()
