# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: truncation search and transfer-matrix contractions.

The contractions call BLAS ``zgemm`` directly, skipping the per-call
Python overhead of the NumPy path.

Every function here has a drop-in twin in ``_kernels_py``; ``ttlab.kernels``
picks one at import time.
"""
import numpy as np
cimport numpy as cnp
from scipy.linalg.cython_blas cimport zgemm

cnp.import_array()

ctypedef double complex cplx


def truncation_rank(const double[::1] s, double tolerance, Py_ssize_t max_bond):
    """Return ``(rank, dropped_weight_squared)`` for descending singular values."""
    cdef Py_ssize_t n = s.shape[0]
    cdef Py_ssize_t r = 0, k
    cdef double cutoff, err2 = 0.0
    if n == 0:
        return 0, 0.0
    cutoff = tolerance * s[0]
    while r < n and s[r] > cutoff:
        r += 1
    if r == 0:
        r = 1
    if max_bond > 0 and r > max_bond:
        r = max_bond
    # accumulate from the smallest value upwards to limit round-off
    k = n - 1
    while k >= r:
        err2 += s[k] * s[k]
        k -= 1
    return r, err2


cdef inline void _gemm(char transa, char transb, int m, int n, int k,
                       cplx *a, int lda, cplx *b, int ldb, cplx *c, int ldc) noexcept nogil:
    """Column-major ``c = op(a) op(b)``; row-major callers pass transposed views."""
    cdef cplx one = 1.0, zero = 0.0
    zgemm(&transa, &transb, &m, &n, &k, &one, a, &lda, b, &ldb, &zero, c, &ldc)


def env_left(cplx[:, ::1] E, cplx[:, :, ::1] A, cplx[:, :, ::1] B):
    """E'[a', b'] = sum conj(A[a, s, a']) E[a, b] B[b, s, b']."""
    cdef int ca = A.shape[0], d = A.shape[1], ca2 = A.shape[2]
    cdef int cb = B.shape[0], cb2 = B.shape[2]
    T_arr = np.empty((ca, d * cb2), dtype=np.complex128)
    out_arr = np.empty((ca2, cb2), dtype=np.complex128)
    cdef cplx[:, ::1] T = T_arr
    cdef cplx[:, ::1] out = out_arr
    with nogil:
        # T = E @ B.reshape(cb, d cb2)
        _gemm(b'N', b'N', d * cb2, ca, cb, &B[0, 0, 0], d * cb2, &E[0, 0], cb, &T[0, 0], d * cb2)
        # out = A.reshape(ca d, ca2)^H @ T.reshape(ca d, cb2)
        _gemm(b'N', b'C', cb2, ca2, ca * d, &T[0, 0], cb2, &A[0, 0, 0], ca2, &out[0, 0], cb2)
    return out_arr


def env_right(cplx[:, ::1] E, cplx[:, :, ::1] A, cplx[:, :, ::1] B):
    """E'[a, b] = sum conj(A[a, s, a']) B[b, s, b'] E[a', b']."""
    cdef int ca = A.shape[0], d = A.shape[1], ca2 = A.shape[2]
    cdef int cb = B.shape[0], cb2 = B.shape[2]
    cdef Py_ssize_t i, j
    T_arr = np.empty((cb * d, ca2), dtype=np.complex128)
    out_arr = np.empty((ca, cb), dtype=np.complex128)
    cdef cplx[:, ::1] T = T_arr
    cdef cplx[:, ::1] out = out_arr
    with nogil:
        # T = B.reshape(cb d, cb2) @ E^T
        _gemm(b'T', b'N', ca2, cb * d, cb2, &E[0, 0], cb2, &B[0, 0, 0], cb2, &T[0, 0], ca2)
        # conj(out) = A.reshape(ca, d ca2) @ T.reshape(cb, d ca2)^H
        _gemm(b'C', b'N', cb, ca, d * ca2, &T[0, 0], d * ca2, &A[0, 0, 0], d * ca2, &out[0, 0], cb)
        for i in range(ca):
            for j in range(cb):
                out[i, j] = out[i, j].conjugate()
    return out_arr


def scprod(list bra, list ket):
    """Contract <bra|ket> site by site from the left."""
    cdef Py_ssize_t n = len(bra), k
    E = np.ones((1, 1), dtype=np.complex128)
    for k in range(n):
        E = env_left(E, bra[k], ket[k])
    return complex(E[0, 0])
