"""Pure-numpy gate kernels, used when the compiled extension is unavailable.

Kernels operate in place on a contiguous complex128 amplitude vector.
``tbit``/``abit``/``bbit`` are bit masks of the target qubits and
``cmask``/``cval`` select the basis states on which controls are satisfied.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=4096)
def _pair_indices(dim, tbit, cmask, cval):
    idx = np.arange(dim, dtype=np.intp)
    keep = ((idx & tbit) == 0) & ((idx & cmask) == cval)
    lo = idx[keep]
    lo.setflags(write=False)
    hi = lo | tbit
    hi.setflags(write=False)
    return lo, hi


@lru_cache(maxsize=4096)
def _swap_indices(dim, abit, bbit, cmask, cval):
    idx = np.arange(dim, dtype=np.intp)
    keep = ((idx & abit) != 0) & ((idx & bbit) == 0) & ((idx & cmask) == cval)
    lo = idx[keep]
    hi = (lo & ~abit) | bbit
    lo.setflags(write=False)
    hi.setflags(write=False)
    return lo, hi


def apply_1q(amps, tbit, m00, m01, m10, m11, cmask, cval):
    lo, hi = _pair_indices(amps.shape[0], tbit, cmask, cval)
    a = amps[lo]
    b = amps[hi]
    amps[lo] = m00 * a + m01 * b
    amps[hi] = m10 * a + m11 * b


def apply_swap(amps, abit, bbit, cmask, cval):
    lo, hi = _swap_indices(amps.shape[0], abit, bbit, cmask, cval)
    tmp = amps[lo]
    amps[lo] = amps[hi]
    amps[hi] = tmp


def apply_phase(amps, tbit, phase, cmask, cval):
    """Multiply amplitudes with target bit set (and controls satisfied) by ``phase``."""
    lo, hi = _pair_indices(amps.shape[0], tbit, cmask, cval)
    amps[hi] *= phase
