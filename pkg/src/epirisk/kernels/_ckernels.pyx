# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel core.

Mirrors ``_pykernels`` operation-for-operation (same accumulation order) so
the two backends are interchangeable. See benchmarks/bench_kernels.py for the
speed comparison.
"""

from libc.math cimport exp
from libc.stdlib cimport free, malloc


cdef inline Py_ssize_t _bit_index(Py_ssize_t v):
    # v is a power of two; return the index of its set bit.
    cdef Py_ssize_t idx = 0
    while v > 1:
        v >>= 1
        idx += 1
    return idx


cpdef double sigmoid(double z):
    cdef double e
    if z >= 0.0:
        return 1.0 / (1.0 + exp(-z))
    e = exp(z)
    return e / (1.0 + e)


cpdef double mixture_mean(double[::1] weights, double[::1] predictors):
    cdef Py_ssize_t i
    cdef double total = 0.0
    for i in range(weights.shape[0]):
        total += weights[i] * sigmoid(predictors[i])
    return total


def completion_offsets(double[::1] linear_adds, double[:, ::1] pair_matrix):
    cdef Py_ssize_t k = linear_adds.shape[0]
    cdef Py_ssize_t n = 1 << k
    cdef Py_ssize_t mask, low, rest, m, lb, i, j
    cdef double val
    cdef double* buf = <double*> malloc(n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        buf[0] = 0.0
        for mask in range(1, n):
            low = mask & (-mask)
            i = _bit_index(low)
            rest = mask ^ low
            val = buf[rest] + linear_adds[i]
            m = rest
            while m:
                lb = m & (-m)
                j = _bit_index(lb)
                val += pair_matrix[i, j]
                m ^= lb
            buf[mask] = val
        return [buf[mask] for mask in range(n)]
    finally:
        free(buf)


def completion_weights(double[::1] priors):
    cdef Py_ssize_t k = priors.shape[0]
    cdef Py_ssize_t n = 1 << k
    cdef Py_ssize_t mask, i
    cdef double w, p
    cdef list out = [0.0] * n
    for mask in range(n):
        w = 1.0
        for i in range(k):
            p = priors[i]
            if (mask >> i) & 1:
                w *= p
            else:
                w *= 1.0 - p
        out[mask] = w
    return out


def draw_risks(double predictor, double[::1] offsets):
    cdef Py_ssize_t i
    cdef list out = [0.0] * offsets.shape[0]
    for i in range(offsets.shape[0]):
        out[i] = sigmoid(predictor + offsets[i])
    return out


cpdef double sequential_mean(double[::1] values):
    cdef Py_ssize_t i
    cdef double total = 0.0
    for i in range(values.shape[0]):
        total += values[i]
    return total / values.shape[0]
