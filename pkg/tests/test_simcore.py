import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qsubtest.errors import ArityError, QubitIndexError, ResourceError
from qsubtest.simcore import (
    GATE_INFO,
    MAX_QUBITS,
    Gate,
    StateVector,
    apply_controlled,
    apply_gate,
    backend_name,
    dump_amplitudes,
    exact_distribution,
    fidelity_with,
    load_amplitudes,
    measure,
    new_state,
    sample_counts,
    use_backend,
)
from qsubtest.simcore import _backend

S2 = 1 / math.sqrt(2)
ANGLES = {"R1": 0.7, "Rz": -1.3}


def make_gate(kind, theta=None):
    if GATE_INFO[kind][1]:
        return Gate(kind, ANGLES[kind] if theta is None else theta)
    return Gate(kind)


def random_state(n, seed):
    r = np.random.default_rng(seed)
    v = r.normal(size=2**n) + 1j * r.normal(size=2**n)
    return StateVector.from_amplitudes(v, normalize=True)


# --- allocation ---------------------------------------------------------------


@pytest.mark.parametrize("n, expected", [(0, [1]), (1, [1, 0]), (2, [1, 0, 0, 0])])
def test_new_state(n, expected):
    np.testing.assert_array_equal(new_state(n).amplitudes, expected)


def test_new_state_cap():
    assert new_state(MAX_QUBITS).n_qubits == MAX_QUBITS
    with pytest.raises(ResourceError):
        new_state(MAX_QUBITS + 1)
    with pytest.raises(ValueError):
        new_state(-1)


# --- gates ----------------------------------------------------------------------


@pytest.mark.parametrize("kind", sorted(GATE_INFO))
def test_gate_matrix_unitary(kind):
    m = make_gate(kind).matrix()
    assert np.abs(m.conj().T @ m - np.eye(m.shape[0])).max() < 1e-12


@pytest.mark.parametrize("kind", sorted(GATE_INFO))
def test_gate_inverse_is_adjoint(kind):
    g = make_gate(kind)
    np.testing.assert_allclose(g.inverse().matrix(), g.matrix().conj().T, atol=1e-12)


def test_named_inverses():
    assert Gate("S").inverse() == Gate("Sdg")
    assert Gate("T").inverse() == Gate("Tdg")
    assert Gate("R1", 0.5).inverse() == Gate("R1", -0.5)


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("Q")
    with pytest.raises(ValueError):
        Gate("R1")
    with pytest.raises(ValueError):
        Gate("H", 0.1)


def test_hadamard_on_zero():
    s = apply_gate(new_state(1), Gate("H"), [0])
    np.testing.assert_allclose(s.amplitudes, [S2, S2], atol=1e-15)


def test_cnot_on_10():
    s = apply_gate(StateVector.basis(2, 0b10), Gate("CNOT"), [0, 1])
    np.testing.assert_allclose(s.amplitudes, [0, 0, 0, 1])


def test_bell_state():
    s = new_state(2)
    apply_gate(s, Gate("H"), [0])
    apply_gate(s, Gate("CNOT"), [0, 1])
    np.testing.assert_allclose(s.amplitudes, [S2, 0, 0, S2], atol=1e-12)


@pytest.mark.parametrize("kind", sorted(GATE_INFO))
def test_apply_matches_dense_matrix(kind):
    """Kernel application on the leading qubits equals the dense matrix times the vector."""
    g = make_gate(kind)
    n = 4
    s = random_state(n, 7)
    expected = np.kron(g.matrix(), np.eye(2 ** (n - g.arity))) @ s.amplitudes
    apply_gate(s, g, list(range(g.arity)))
    np.testing.assert_allclose(s.amplitudes, expected, atol=1e-12)


def test_arity_and_index_errors():
    s = new_state(2)
    with pytest.raises(ArityError):
        apply_gate(s, Gate("CNOT"), [0])
    with pytest.raises(QubitIndexError):
        apply_gate(s, Gate("X"), [2])
    with pytest.raises(QubitIndexError):
        apply_gate(s, Gate("SWAP"), [1, 1])


# --- controlled application -------------------------------------------------------


def test_controlled_x_is_cnot():
    s = apply_controlled(StateVector.basis(2, 0b10), Gate("X"), [0], [1], [1])
    assert s.amplitudes[0b11] == 1


@pytest.mark.parametrize("controls, flips", [(0b1001, True), (0b1101, False)])
def test_polarity_pattern_1001(controls, flips):
    s = StateVector.basis(5, controls << 1)
    apply_controlled(s, Gate("X"), [0, 1, 2, 3], [1, 0, 0, 1], [4])
    expected = (controls << 1) | int(flips)
    assert abs(s.amplitudes[expected]) == pytest.approx(1)


def test_controlled_r1_inactive():
    s = apply_gate(new_state(2), Gate("H"), [1])
    before = s.amplitudes.copy()
    apply_controlled(s, Gate("R1", 1.1), [0], [1], [1])
    np.testing.assert_allclose(s.amplitudes, before)


def test_controlled_overlap_rejected():
    with pytest.raises(QubitIndexError):
        apply_controlled(new_state(2), Gate("X"), [0], [1], [0])
    with pytest.raises(ValueError):
        apply_controlled(new_state(2), Gate("X"), [0], [1, 1], [1])


# --- measurement ---------------------------------------------------------------------


def test_measure_basis_state(rng):
    out = measure(StateVector.basis(1, 1), [0], rng)
    assert out.bits == (1,)


def test_measure_plus_is_fair(rng):
    ones = sum(measure(apply_gate(new_state(1), Gate("H"), [0]), [0], rng).bits[0] for _ in range(4000))
    assert abs(ones / 4000 - 0.5) < 0.03


def test_bell_collapse(rng):
    for _ in range(20):
        s = new_state(2)
        apply_gate(s, Gate("H"), [0])
        apply_gate(s, Gate("CNOT"), [0, 1])
        out = measure(s, [0], rng)
        idx = 0b11 if out.bits == (1,) else 0b00
        assert abs(out.post_state.amplitudes[idx]) == pytest.approx(1)


def test_repeated_measurement_is_stable(rng):
    s = random_state(3, 11)
    first = measure(s, [0, 2], rng).bits
    for _ in range(5):
        assert measure(s, [0, 2], rng).bits == first


def test_measurement_determinism():
    a = [measure(random_state(3, 5), [0, 1, 2], np.random.default_rng(9)).bits for _ in range(3)]
    b = [measure(random_state(3, 5), [0, 1, 2], np.random.default_rng(9)).bits for _ in range(3)]
    assert a == b


def test_marginals_match_exact_distribution():
    s = random_state(3, 3)
    dist = exact_distribution(s, [0, 1, 2])
    counts = sample_counts(s, [0, 1, 2], 10_000, np.random.default_rng(0))
    for k in range(8):
        assert abs(counts.get(k, 0) / 10_000 - dist[k]) < 0.02


def test_sequential_measurements_match_exact_distribution():
    s0 = random_state(3, 4)
    dist = exact_distribution(s0, [0, 1, 2])
    r = np.random.default_rng(2)
    freq = np.zeros(8)
    for _ in range(10_000):
        freq[measure(s0.copy(), [0, 1, 2], r).value] += 1
    assert np.abs(freq / 10_000 - dist).max() < 0.02


# --- exact distribution and fidelity ---------------------------------------------------


def test_exact_distribution_examples():
    plus = apply_gate(new_state(1), Gate("H"), [0])
    np.testing.assert_allclose(exact_distribution(plus, [0]), [0.5, 0.5])
    bell = apply_gate(apply_gate(new_state(2), Gate("H"), [0]), Gate("CNOT"), [0, 1])
    np.testing.assert_allclose(exact_distribution(bell, [0, 1]), [0.5, 0, 0, 0.5], atol=1e-15)
    dist = exact_distribution(StateVector.basis(5, 0b10100), range(5))
    assert dist[20] == 1 and dist.sum() == 1


def test_exact_distribution_respects_qubit_order():
    s = StateVector.basis(3, 0b100)
    assert exact_distribution(s, [0, 2])[0b10] == 1
    assert exact_distribution(s, [2, 0])[0b01] == 1


def test_fidelity_examples():
    zero = new_state(1)
    assert fidelity_with(zero, zero) == 1
    phased = StateVector.from_amplitudes([np.exp(0.4j), 0])
    assert fidelity_with(zero, phased) == pytest.approx(1)
    plus = apply_gate(new_state(1), Gate("H"), [0])
    assert fidelity_with(zero, plus) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        fidelity_with(zero, new_state(2))


def test_amplitude_dump_round_trip():
    s = random_state(3, 8)
    text = dump_amplitudes(s)
    assert text.splitlines()[0].startswith("000 ")
    np.testing.assert_array_equal(load_amplitudes(text).amplitudes, s.amplitudes)
    assert load_amplitudes(dump_amplitudes(new_state(0))).amplitudes.tolist() == [1]


# --- properties ---------------------------------------------------------------------------

gate_apps = st.lists(
    st.tuples(st.sampled_from(sorted(GATE_INFO)), st.randoms(use_true_random=False), st.floats(-6, 6)),
    min_size=1,
    max_size=12,
)


def _apply_sequence(state, ops):
    applied = []
    for kind, r, theta in ops:
        g = make_gate(kind, theta)
        targets = r.sample(range(state.n_qubits), g.arity)
        apply_gate(state, g, targets)
        applied.append((g, targets))
    return applied


@given(gate_apps, st.integers(0, 1000))
def test_norm_preserved(ops, seed):
    s = random_state(4, seed)
    _apply_sequence(s, ops)
    assert abs(s.norm() - 1) < 1e-9


@given(gate_apps, st.integers(0, 1000))
def test_inverse_round_trip(ops, seed):
    s = random_state(4, seed)
    original = s.amplitudes.copy()
    for g, t in reversed(_apply_sequence(s, ops)):
        apply_gate(s, g.inverse(), t)
    np.testing.assert_allclose(s.amplitudes, original, atol=1e-10)


@given(
    st.sampled_from(["X", "H", "S", "T", "R1", "SWAP"]),
    st.lists(st.integers(0, 1), min_size=1, max_size=3),
    st.integers(0, 1000),
)
def test_controlled_norm_preserved(kind, pols, seed):
    g = make_gate(kind)
    n = len(pols) + g.arity
    s = random_state(n, seed)
    apply_controlled(s, g, range(len(pols)), pols, range(len(pols), n))
    assert abs(s.norm() - 1) < 1e-9


# --- backends --------------------------------------------------------------------------------

needs_compiled = pytest.mark.skipif(_backend.compiled_kernels is None, reason="extension not built")


@needs_compiled
@pytest.mark.parametrize("kind", sorted(GATE_INFO))
def test_backends_agree(kind):
    results = []
    previous = backend_name()
    try:
        for name in ("python", "cython"):
            use_backend(name)
            s = random_state(5, 21)
            g = make_gate(kind)
            apply_gate(s, g, [4, 1, 2][: g.arity])
            apply_controlled(s, g, [0, 3], [1, 0], [2, 4, 1][: g.arity])
            results.append(s.amplitudes.copy())
    finally:
        use_backend(previous)
    np.testing.assert_allclose(results[0], results[1], atol=1e-14)


def test_use_backend_rejects_unknown():
    with pytest.raises(ValueError):
        use_backend("fortran")
