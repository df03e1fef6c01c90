"""Dense specification oracles, independent of the IR interpreter."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import linalg

from ..errors import ResourceError
from ..simcore import StateVector
from ..stateprep import Ensemble, PreparedInput

ORACLE_CAP = 6


def _vector(state) -> np.ndarray:
    if isinstance(state, PreparedInput):
        return state.state().amplitudes
    if isinstance(state, StateVector):
        return state.amplitudes
    return np.asarray(state, dtype=complex)


def density(state) -> np.ndarray:
    """Density matrix of a pure state, ensemble or matrix."""
    if isinstance(state, Ensemble):
        return state.density_matrix()
    if isinstance(state, np.ndarray) and state.ndim == 2:
        return state.astype(complex)
    v = _vector(state)
    return np.outer(v, v.conj())


def dft_matrix(n: int) -> np.ndarray:
    N = 2**n
    j, k = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    return np.exp(2j * np.pi * j * k / N) / math.sqrt(N)


def spec_qft(n: int, amplitudes) -> np.ndarray:
    """QFT|j> = 2^{-n/2} sum_k e^{2 pi i jk/2^n}|k>, qubit 0 most significant."""
    if n > ORACLE_CAP:
        raise ResourceError(f"QFT oracle capped at n={ORACLE_CAP}")
    a = _vector(amplitudes)
    if a.shape != (2**n,):
        raise ValueError("amplitude vector does not match n")
    return dft_matrix(n).T @ a


def qft_product_form(j: int, n: int) -> np.ndarray:
    """Bitwise product form: tensor over k of (|0> + e^{2 pi i 0.j_{n-k+1}...j_n}|1>)/sqrt(2)."""
    out = np.ones(1, dtype=complex)
    for k in range(1, n + 1):
        phase = np.exp(2j * np.pi * (j % 2**k) / 2**k)
        out = np.kron(out, np.array([1, phase]) / math.sqrt(2))
    return out


def spec_swap_test(rho1, rho2) -> float:
    """p0 = (1 + tr(rho1 rho2)) / 2."""
    return float((1 + np.trace(density(rho1) @ density(rho2)).real) / 2)


def spec_inner_product(rho1, rho2) -> float:
    return float(np.trace(density(rho1) @ density(rho2)).real)


def spec_purity(rho) -> float:
    r = density(rho)
    return float(np.trace(r @ r).real)


def permutation_oracle(n: int, fn: Callable[[int], int]) -> Callable:
    """Oracle for a basis permutation on n qubits."""

    def apply(amplitudes):
        a = _vector(amplitudes)
        out = np.zeros_like(a)
        for i in range(2**n):
            out[fn(i)] += a[i]
        return out

    return apply


def reverse_bits(x: int, n: int) -> int:
    return int(format(x, f"0{n}b")[::-1], 2) if n else 0


def spec_reverse(n: int, amplitudes) -> np.ndarray:
    return permutation_oracle(n, lambda i: reverse_bits(i, n))(amplitudes)


def spec_multi_swap(n: int, amplitudes) -> np.ndarray:
    """|phi>|psi> -> |psi>|phi> for two n-qubit registers."""
    mask = 2**n - 1
    return permutation_oracle(2 * n, lambda i: ((i & mask) << n) | (i >> n))(amplitudes)


def spec_qadd(n: int, amplitudes) -> np.ndarray:
    """|x>|y> -> |x>|x + y mod 2^n>."""
    mask = 2**n - 1
    return permutation_oracle(2 * n, lambda i: (i & ~mask) | (((i >> n) + (i & mask)) & mask))(amplitudes)


def spec_crk(k: int, amplitudes) -> np.ndarray:
    """|c>|psi> -> |c> diag(1, e^{i pi c / 2^k}) |psi> on (qctrl, qtar)."""
    a = _vector(amplitudes).copy()
    a[3] *= np.exp(1j * math.pi / 2**k)
    return a


def spec_phase_flip(n: int, amplitudes) -> np.ndarray:
    a = -_vector(amplitudes).copy()
    a[0] = -a[0]
    return a


def spec_identity(n: int, amplitudes) -> np.ndarray:
    return _vector(amplitudes).copy()


def spec_gen_qint(n: int, x: int) -> np.ndarray:
    out = np.zeros(2**n, dtype=complex)
    out[x] = 1
    return out


def spec_gen_x_plus_y(n: int, x: int, y: int) -> np.ndarray:
    if x == y:
        return spec_gen_qint(n, x)
    out = np.zeros(2**n, dtype=complex)
    out[x] = out[y] = 1 / math.sqrt(2)
    return out


def spec_gen_max_sup(n: int) -> np.ndarray:
    return np.full(2**n, 1 / math.sqrt(2**n), dtype=complex)


def spec_gen_max_mix(n: int) -> np.ndarray:
    return np.eye(2**n, dtype=complex) / 2**n


def spec_qrandom(n: int) -> np.ndarray:
    """Output distribution of QRandom (n = 0 draws from one qubit)."""
    m = max(n, 1)
    return np.full(2**m, 1 / 2**m)


def phase_oracle_matrix(n: int, K: int) -> np.ndarray:
    d = np.ones(2**n, dtype=complex)
    d[K] = -1
    return np.diag(d)


def spec_grover(n: int, K: int) -> np.ndarray:
    """Measured-output distribution of textbook Grover search for marked K."""
    N = 2**n
    s = np.full(N, 1 / math.sqrt(N), dtype=complex)
    diffusion = 2 * np.outer(s, s) - np.eye(N)
    psi = s.copy()
    for _ in range(int(round(math.pi / 4 * math.sqrt(N)))):
        psi[K] = -psi[K]
        psi = diffusion @ psi
    return np.abs(psi) ** 2


def spec_qpe(nclock: int, upower: np.ndarray, target) -> np.ndarray:
    """Clock distribution (big-endian) of textbook phase estimation.

    ``upower`` is the matrix of U; the target is expanded in U's eigenbasis
    (complex Schur form, exact for normal matrices).
    """
    U = np.asarray(upower, dtype=complex)
    T, Z = linalg.schur(U, output="complex")
    eig = np.diag(T)
    coeff = Z.conj().T @ _vector(target)
    N = 2**nclock
    x = np.arange(N)
    probs = np.zeros(N)
    for c, lam in zip(coeff, eig):
        w = abs(c) ** 2
        if w < 1e-15:
            continue
        phi = (np.angle(lam) / (2 * math.pi)) % 1.0
        for m in range(N):
            amp = np.exp(2j * math.pi * x * (phi - m / N)).sum() / N
            probs[m] += w * abs(amp) ** 2
    return probs


def fidelity_deficit(a, b) -> float:
    """1 - |<a|b>|^2 for normalized vectors (global phase ignored)."""
    return float(1 - abs(np.vdot(_vector(a), _vector(b))) ** 2)
