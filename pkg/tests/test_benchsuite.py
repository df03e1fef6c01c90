import math

import numpy as np
import pytest

from qsubtest.benchsuite import catalog, get, make_phase_oracle, names, spec_qft, spec_qpe, spec_swap_test
from qsubtest.benchsuite import oracles as O
from qsubtest.benchsuite import programs as P
from qsubtest.checkers import Binding, identity_check
from qsubtest.errors import ResourceError
from qsubtest.qir import bind_layout, run
from qsubtest.simcore import Gate, StateVector, exact_distribution, gate_matrix, new_state
from qsubtest.stateprep import gen_ket_x, gen_pauli, gen_two_value, maximally_mixed
from qsubtest.testkit import IOType, resolve_handle, run_suite, suite_report

S2 = 1 / math.sqrt(2)


def apply_program(sub, amplitudes, rng=None, **layout_kw):
    layout = bind_layout(sub, **layout_kw)
    state = StateVector.from_amplitudes(amplitudes)
    assert state.n_qubits == layout.n_qubits
    return run(sub, layout, rng or np.random.default_rng(0), state).final_state.amplitudes


def basis(n, x):
    v = np.zeros(2**n, dtype=complex)
    v[x] = 1
    return v


def assert_fidelity(a, b):
    assert O.fidelity_deficit(a, b) < 1e-9


# --- catalog ------------------------------------------------------------------------------


def test_catalog_has_eighteen_entries():
    assert len(catalog()) == 18
    assert names()[0] == "QRandom" and names()[-1] == "QPE"
    with pytest.raises(KeyError):
        get("Shor")


def test_catalog_io_types():
    assert get("QFT").io_type is IOType.TRANSFORM
    assert get("SwapTest").io_type is IOType.DETECT_QUANTUM


@pytest.mark.parametrize("entry", catalog(), ids=lambda e: e.name)
def test_default_suites_pass(entry):
    summary = suite_report(run_suite(entry.suite(), np.random.default_rng(11)))
    assert summary.total > 0
    assert summary.failed == 0, summary.first_witnesses


# --- transform oracles ----------------------------------------------------------------------


@pytest.mark.parametrize("n", range(1, 6))
def test_qft_matches_oracle(n):
    for j in range(2**n):
        got = apply_program(P.qft(), basis(n, j), default_length=n)
        assert_fidelity(got, spec_qft(n, basis(n, j)))
        assert np.abs(spec_qft(n, basis(n, j)) - O.qft_product_form(j, n)).max() < 1e-12


def test_qft_oracle_examples():
    np.testing.assert_allclose(spec_qft(1, basis(1, 0)), [S2, S2])
    np.testing.assert_allclose(spec_qft(2, basis(2, 1)), np.array([1, 1j, -1, -1j]) / 2, atol=1e-12)
    with pytest.raises(ResourceError):
        spec_qft(7, basis(7, 0))


@pytest.mark.parametrize("n", range(1, 6))
def test_reverse_empty_phase_flip(n):
    for x in range(2**n):
        v = basis(n, x)
        assert_fidelity(apply_program(P.reverse(), v, default_length=n), O.spec_reverse(n, v))
        assert_fidelity(apply_program(P.empty(), v, default_length=n), v)
        got = apply_program(P.phase_flip(), v, default_length=n)
        np.testing.assert_allclose(got, O.spec_phase_flip(n, v), atol=1e-10)


@pytest.mark.parametrize("n, x, y", [(1, 1, 1), (5, 0b11001, 0b10011), (6, 0b010011, 0b110010)])
def test_reverse_rows(n, x, y):
    assert abs(apply_program(P.reverse(), basis(n, x), default_length=n)[y]) == pytest.approx(1)


@pytest.mark.parametrize("n", range(1, 4))
def test_multi_swap_matches_oracle(n):
    for x in range(2 ** (2 * n)):
        v = basis(2 * n, x)
        assert_fidelity(apply_program(P.multi_swap(), v, lengths={"qs1": n}), O.spec_multi_swap(n, v))


@pytest.mark.parametrize("n", range(1, 5))
def test_qadd_exhaustive(n):
    for x in range(2**n):
        for y in range(2**n):
            got = apply_program(P.qadd(), basis(2 * n, (x << n) | y), lengths={"qs1": n})
            assert abs(got[(x << n) | ((x + y) % 2**n)]) == pytest.approx(1, abs=1e-9)


def test_qadd_overflow_row():
    got = apply_program(P.qadd(), basis(8, 0b1100_1001), lengths={"qs1": 4})
    assert abs(got[0b1100_0101]) == pytest.approx(1)


@pytest.mark.parametrize("k", range(1, 5))
def test_crk_matches_oracle(k):
    for x in range(4):
        v = basis(2, x)
        got = apply_program(P.crk(), v, classical={"k": k})
        np.testing.assert_allclose(got, O.spec_crk(k, v), atol=1e-12)


@pytest.mark.parametrize("label, make, changed", [
    ("I", lambda: gen_ket_x(5, 0), False),
    ("II", lambda: gen_ket_x(5, 13), False),
    ("III", lambda: gen_two_value(5, 0, 25), True),
    ("IV", lambda: gen_two_value(4, 6, 9), False),
])
def test_phase_flip_input_types(label, make, changed):
    prep = make()
    v = prep.state().amplitudes
    got = apply_program(P.phase_flip(), v, default_length=prep.n_qubits)
    assert (O.fidelity_deficit(got, v) > 0.5) is changed


@pytest.mark.parametrize("n, K", [(2, 3), (3, 5), (4, 0), (4, 9)])
def test_grover_matches_oracle(n, K):
    layout = bind_layout(P.grover(), handles={"Oracle": make_phase_oracle(n, K)}, default_length=n)
    out = run(P.grover(), layout, np.random.default_rng(0)).final_state
    np.testing.assert_allclose(exact_distribution(out, range(n)), O.spec_grover(n, K), atol=1e-10)


def test_teleport_over_pauli_inputs(rng):
    b = Binding(inputs=("qsrc",), outputs=("qdest",))
    assert identity_check(P.teleport(), 1, 120, "PAULI", rng, b).passed


# --- test doubles -------------------------------------------------------------------------------


def test_phase_oracle_n2_k3():
    got = [apply_program(make_phase_oracle(2, 3), basis(2, x))[x] for x in range(4)]
    np.testing.assert_allclose(got, [1, 1, 1, -1])


@pytest.mark.parametrize("n, K", [(3, 0), (3, 6), (4, 11)])
def test_phase_oracle_marks_only_k(n, K):
    for x in range(2**n):
        v = basis(n, x)
        once = apply_program(make_phase_oracle(n, K), v)
        np.testing.assert_allclose(once, O.phase_oracle_matrix(n, K) @ v, atol=1e-12)
        np.testing.assert_allclose(apply_program(make_phase_oracle(n, K), once), v, atol=1e-12)


def test_phase_oracle_range():
    with pytest.raises(ValueError):
        make_phase_oracle(2, 4)


def test_grover_finds_k_with_high_probability():
    r = np.random.default_rng(4)
    layout = bind_layout(P.grover(), handles={"Oracle": make_phase_oracle(4, 7)}, default_length=4)
    out = run(P.grover(), layout, r).final_state
    assert exact_distribution(out, range(4))[7] > 0.9


# --- detect-quantum programs -----------------------------------------------------------------------


@pytest.mark.parametrize("rho1, rho2, p0", [
    (gen_ket_x(3, 3), gen_ket_x(3, 6), 0.5),
    (gen_ket_x(4, 9), gen_ket_x(4, 9), 1.0),
    (gen_ket_x(1, 0), gen_pauli([3]), 0.75),
    (maximally_mixed(1), maximally_mixed(1), 0.75),
    (gen_pauli([3]), maximally_mixed(1), 0.75),
])
def test_swap_test_oracle(rho1, rho2, p0):
    assert spec_swap_test(rho1, rho2) == pytest.approx(p0)


def _purity(gen, n, rng):
    sub = P.purity()
    layout = bind_layout(sub, classical={"t": 100}, lengths={"anc": 1, "qs1": n},
                         handles={"GenRho": resolve_handle(gen)})
    return run(sub, layout, rng).classical_outputs["isPure"]


def test_purity_rows(rng):
    assert _purity({"input": {"gen": "ket_x", "n": 4, "x": 5}}, 4, rng) is True
    assert _purity({"input": {"gen": "two_value", "n": 2, "x": 0, "y": 3}}, 2, rng) is True
    assert _purity({"mixed": {"gen": "maxmix", "n": 1}}, 1, rng) is False


def test_purity_and_inner_product_oracles():
    assert O.spec_purity(gen_two_value(2, 0, 3)) == pytest.approx(1)
    assert O.spec_purity(maximally_mixed(1)) == pytest.approx(0.5)
    assert O.spec_inner_product(gen_ket_x(1, 0), gen_pauli([3])) == pytest.approx(0.5)


# --- QPE -------------------------------------------------------------------------------------------------


def _qpe_distribution(upower, target, nclock=3):
    sub = P.qpe()
    layout = bind_layout(sub, lengths={"clock": nclock, "target": target.n_qubits}, handles={"Upower": upower})
    state = new_state(layout.n_qubits)
    target.prepare(state, layout.registers["target"])
    out = run(sub, layout, np.random.default_rng(0), state).final_state
    return exact_distribution(out, layout.registers["clock"])


def test_qpe_x_minus():
    assert _qpe_distribution(P.upower_gate("X"), gen_pauli([4]))[0b100] == pytest.approx(1)


def test_qpe_h_zero():
    dist = _qpe_distribution(P.upower_gate("H"), gen_ket_x(1, 0))
    cos2 = math.cos(math.pi / 8) ** 2
    assert dist[0b000] == pytest.approx(cos2)
    # the -1 eigenvector of H has phase 1/2, which big-endian clocks read as 100
    assert dist[0b100] == pytest.approx(1 - cos2)
    np.testing.assert_allclose(dist, spec_qpe(3, gate_matrix("H"), gen_ket_x(1, 0)), atol=1e-10)


def test_qpe_cs_sdg():
    assert _qpe_distribution(P.upower_cs_sdg(), gen_ket_x(3, 5))[0b110] == pytest.approx(1)


def test_qpe_matches_oracle_for_crz():
    theta = math.pi * 2 / 3
    crz = np.eye(4, dtype=complex)
    crz[2:, 2:] = Gate("Rz", theta).matrix()
    got = _qpe_distribution(P.upower_crz(), gen_ket_x(2, 2), nclock=5)
    np.testing.assert_allclose(got, spec_qpe(5, crz, gen_ket_x(2, 2)), atol=1e-10)
