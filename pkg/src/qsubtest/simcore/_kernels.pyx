# Compiled gate kernels. Same signatures and semantics as _fallback.py.

cimport cython


@cython.boundscheck(False)
@cython.wraparound(False)
def apply_1q(double complex[::1] amps, Py_ssize_t tbit,
             double complex m00, double complex m01,
             double complex m10, double complex m11,
             Py_ssize_t cmask, Py_ssize_t cval):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t i, j
    cdef double complex a, b
    with nogil:
        for i in range(dim):
            if (i & tbit) != 0 or (i & cmask) != cval:
                continue
            j = i | tbit
            a = amps[i]
            b = amps[j]
            amps[i] = m00 * a + m01 * b
            amps[j] = m10 * a + m11 * b


@cython.boundscheck(False)
@cython.wraparound(False)
def apply_swap(double complex[::1] amps, Py_ssize_t abit, Py_ssize_t bbit,
               Py_ssize_t cmask, Py_ssize_t cval):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t i, j
    cdef double complex t
    with nogil:
        for i in range(dim):
            if (i & abit) == 0 or (i & bbit) != 0 or (i & cmask) != cval:
                continue
            j = (i & ~abit) | bbit
            t = amps[i]
            amps[i] = amps[j]
            amps[j] = t


@cython.boundscheck(False)
@cython.wraparound(False)
def apply_phase(double complex[::1] amps, Py_ssize_t tbit, double complex phase,
                Py_ssize_t cmask, Py_ssize_t cval):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t i
    with nogil:
        for i in range(dim):
            if (i & tbit) != 0 and (i & cmask) == cval:
                amps[i] = amps[i] * phase
