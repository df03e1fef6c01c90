import dataclasses

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsubtest.benchsuite import programs as P
from qsubtest.benchsuite.catalog import catalog
from qsubtest.benchsuite.oracles import qft_product_form
from qsubtest.checkers import (
    Binding,
    CheckVerdict,
    StatTestConfig,
    equivalence_check,
    identity_check,
    qft_output_check,
    sequence,
    stat_fit,
    transform_check,
    unitarity_check,
    variant_checks,
)
from qsubtest.errors import UnsupportedCheck, VariantError
from qsubtest.qir import bind_layout, gate, inverse_of, measure, power_of, qubits, run, subroutine
from qsubtest.simcore import Gate, StateVector, apply_gate, new_state


def one_gate(kind):
    return subroutine(f"G{kind}", [qubits("q", 1)], [gate(kind, "q[0]")])


def qft_state(n, j):
    sub = P.qft()
    return run(sub, bind_layout(sub, default_length=n), np.random.default_rng(0), StateVector.basis(n, j)).final_state


def h_inverse(s):
    apply_gate(s, Gate("H"), [0])


# --- verdicts -----------------------------------------------------------------------


def test_failed_verdict_needs_witness():
    with pytest.raises(ValueError):
        CheckVerdict(False, 1)
    v = CheckVerdict(False, 3, 1.0, 0.0, {"observed": "1"}, "transform", "x")
    assert v.to_json() == {"check": "transform", "target": "x", "passed": False, "shots": 3,
                           "statistic": 1.0, "witness": {"observed": "1"}}


def test_stat_config_validation():
    with pytest.raises(ValueError):
        StatTestConfig(shots=0)
    with pytest.raises(ValueError):
        StatTestConfig(alpha=1.0)
    with pytest.raises(ValueError):
        StatTestConfig(method="anova")


# --- transform checks ------------------------------------------------------------------


def test_transform_check_plus(rng):
    plus = apply_gate(new_state(1), Gate("H"), [0])
    assert transform_check(plus, h_inverse, rng, shots=200).passed


def test_transform_check_minus(rng):
    minus = apply_gate(StateVector.basis(1, 1), Gate("H"), [0])
    v = transform_check(minus, h_inverse, rng, shots=50)
    assert not v.passed and v.statistic == 50 and v.witness["observed"] == "1"


def test_transform_check_identity(rng):
    assert transform_check(new_state(1), lambda s: None, rng, shots=20).passed


@pytest.mark.parametrize("j", [0, 3])
def test_qft_output_check_passes(j, rng):
    assert qft_output_check(j, 3, qft_state(3, j), rng, shots=100).passed


def test_qft_output_check_wrong_j(rng):
    v = qft_output_check(5, 3, qft_state(3, 3), rng, shots=200)
    assert not v.passed and v.witness["input"] == "CI(x=5,n=3)"


def test_wrong_j_failure_rate_matches_oracle():
    """For every j != j', the observed failure frequency tracks 1 - |<QFT j'|QFT j>|^2."""
    r = np.random.default_rng(5)
    shots = 400
    for j in range(8):
        state = qft_state(3, j)
        for jp in range(8):
            if jp == j:
                continue
            overlap = abs(np.vdot(qft_product_form(jp, 3), qft_product_form(j, 3))) ** 2
            v = qft_output_check(jp, 3, state, r, shots=shots)
            assert v.statistic / shots >= (1 - overlap) - 0.08


# --- statistical fit ------------------------------------------------------------------------


def test_stat_fit_examples():
    assert stat_fit({0: 5000, 1: 5000}, [0.5, 0.5]).passed
    assert not stat_fit({0: 10_000}, [0.5, 0.5]).passed


def test_stat_fit_random012(rng):
    sub = P.random012()
    layout = bind_layout(sub)
    counts = {}
    for _ in range(9999):
        m = run(sub, layout, rng).classical_outputs["m"]
        counts[m] = counts.get(m, 0) + 1
    assert stat_fit(counts, {0: 1 / 3, 1: 1 / 3, 2: 1 / 3}).passed


def test_stat_fit_impossible_outcome():
    v = stat_fit({0: 4095, 3: 1}, {0: 0.5, 1: 0.5})
    assert not v.passed and v.witness["observed"] == 3


def test_stat_fit_rejects_short_samples():
    with pytest.raises(ValueError):
        stat_fit({0: 10}, [0.5, 0.5], StatTestConfig(shots=100))
    with pytest.raises(ValueError):
        stat_fit({0: 10}, [0.5, 0.6], StatTestConfig(shots=10))


def test_stat_fit_chi_square_pooling():
    expected = {0: 0.97, 1: 0.01, 2: 0.01, 3: 0.01}
    assert stat_fit({0: 97, 1: 1, 2: 1, 3: 1}, expected, StatTestConfig(shots=100)).passed


# --- identity and equivalence -------------------------------------------------------------------


def test_identity_check_empty(rng):
    assert identity_check(P.empty(), 5, 50, ["CI", "RTI", "CSI", "PAULI"], rng).passed


def test_identity_check_x_fails_first_trial(rng):
    v = identity_check(one_gate("X"), 1, 10, "CI", rng)
    assert not v.passed and v.shots == 1


def test_identity_check_teleport(rng):
    b = Binding(inputs=("qsrc",), outputs=("qdest",))
    assert identity_check(P.teleport(), 1, 60, "PAULI", rng, b).passed


def test_identity_check_reports_faults(rng):
    bad = subroutine("Bad", [qubits("q")], [gate("X", "q[len(q)]")])
    v = identity_check(bad, 2, 5, "CI", rng)
    assert not v.passed and "fault" in v.witness and v.witness["site"].startswith("Bad")


def test_identity_check_ignores_classical_outputs(rng):
    sub = subroutine("Peek", [qubits("q", 1)], [measure("m", "q")], returns="m")
    assert identity_check(sub, 1, 10, "CI", rng).passed


@pytest.mark.parametrize("entry", [e for e in catalog() if e.is_adjointable and e.binding is not None],
                         ids=lambda e: e.name)
@pytest.mark.parametrize("kind", ["CI", "RTI", "CSI", "PAULI", "STV"])
def test_identity_soundness(entry, kind):
    p = entry.subroutine
    n = min(entry.scale, 3)
    comp = sequence(f"{p.name};Inv", [p, inverse_of(p)])
    assert identity_check(comp, n, 10, kind, np.random.default_rng(1), entry.layout_binding(n)).passed


def test_equivalence_examples(rng):
    assert equivalence_check(P.qft(), P.qft(), 3, 20, rng).passed
    assert equivalence_check(power_of(one_gate("S"), 2), one_gate("Z"), 1, 20, rng).passed
    norev = dataclasses.replace(P.qft(), name="QFTNoRev", body=P.qft().body[:-1])
    for n in (2, 3, 4):
        assert not equivalence_check(P.qft(), norev, n, 30, rng).passed


def test_equivalence_signature_mismatch(rng):
    with pytest.raises(ValueError):
        equivalence_check(P.qft(), P.crk(), 2, 5, rng)


def test_equivalence_non_adjointable_uses_distributions(rng):
    coin = subroutine("Coin", [qubits("q", 1)], [gate("H", "q[0]"), measure("m", "q")])
    coin2 = subroutine("Coin2", [qubits("q", 1)], [gate("H", "q[0]"), gate("S", "q[0]"), measure("m", "q")])
    fixed = subroutine("Fixed", [qubits("q", 1)], [measure("m", "q")])
    assert equivalence_check(coin, coin2, 1, 5, rng, kinds="CI").passed
    assert not equivalence_check(coin, fixed, 1, 5, rng, kinds="CI").passed


def _gate_program(kinds):
    body = [gate(k, f"q[{t}]") for k, t in kinds]
    return subroutine("Rand", [qubits("q", 2)], body)


one_qubit_apps = st.lists(st.tuples(st.sampled_from(["X", "H", "S", "T", "Z"]), st.integers(0, 1)), max_size=6)


@given(one_qubit_apps, one_qubit_apps, st.integers(0, 100))
def test_equivalence_symmetric(a, b, seed):
    p1, p2 = _gate_program(a), _gate_program(b)
    v12 = equivalence_check(p1, p2, 2, 20, np.random.default_rng(seed))
    v21 = equivalence_check(p2, p1, 2, 20, np.random.default_rng(seed))
    assert v12.passed == v21.passed


# --- variant checks -----------------------------------------------------------------------------


def test_variant_checks_qft(rng):
    v = variant_checks(P.qft(), 4, 10, rng)
    assert v.passed
    labels = {d["relation"] for d in v.details}
    assert {"P;InvP", "PowP(-2)", "PowP(3)", "CtrlP(m=1,active)", "CtrlP(m=2,pattern=2)"} <= labels


def test_variant_checks_wrong_inverse(rng):
    bad_inv = dataclasses.replace(inverse_of(P.qft()), name="BadInvQFT", body=inverse_of(P.qft()).body[1:])
    v = variant_checks(P.qft(), 3, 10, rng, inverse=bad_inv)
    assert not v.passed and v.witness["relation"] == "P;InvP"


def test_variant_checks_h_power(rng):
    v = variant_checks(one_gate("H"), 1, 20, rng, powers=(2,))
    assert v.passed
    assert identity_check(power_of(one_gate("H"), 2), 1, 20, "STV", rng).passed


def test_variant_checks_rejects_measurement(rng):
    with pytest.raises(VariantError):
        variant_checks(P.teleport(), 1, 1, rng)


# --- unitarity ---------------------------------------------------------------------------------


def test_unitarity_qft_and_empty(rng):
    assert unitarity_check(P.qft(), 3, 3, 200, rng).passed
    assert unitarity_check(P.empty(), 3, 3, 200, rng).passed


def test_unitarity_static_scan(rng):
    v = unitarity_check(P.teleport(), 1, 3, 100, rng)
    assert not v.passed and v.witness["reason"] == "reachable measurement"


def test_unitarity_dynamic_detects_measurement(rng):
    body = list(P.qft().body)
    body.insert(1, measure("mm", "qs[0]"))
    mutant = dataclasses.replace(P.qft(), name="QFTMeasured", body=tuple(body))
    v = unitarity_check(mutant, 3, 5, 400, rng, static=False)
    assert not v.passed and v.statistic < 1


def test_unitarity_cap(rng):
    with pytest.raises(UnsupportedCheck):
        unitarity_check(P.qft(), 8, 1, 10, rng)
