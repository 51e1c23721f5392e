# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels in ``_kernels_py``.

Loops release the GIL so that row ranges can be filled concurrently by a
thread pool.  Signatures and results match the numpy fallback.
"""
from libc.math cimport acos, asin, sqrt
from scipy.linalg.cython_blas cimport dsyrk

cdef double ZERO_NORM = 1e-12
cdef double CHORD_SWITCH = 0.9


cdef inline double _angle(const double[:, ::1] X, Py_ssize_t i, Py_ssize_t j,
                          double c) noexcept nogil:
    cdef Py_ssize_t k
    cdef double chord = 0.0, t
    if c > CHORD_SWITCH:
        for k in range(X.shape[1]):
            t = X[j, k] - X[i, k]
            chord = chord + t * t
        chord = sqrt(chord) / 2.0
        if chord > 1.0:
            chord = 1.0
        return 2.0 * asin(chord)
    return acos(c)


def tangent_factors(const double[:, ::1] X, double[:, :, ::1] out,
                    Py_ssize_t start, Py_ssize_t stop):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double c, un, s, u
    with nogil:
        for i in range(start, stop):
            for j in range(n):
                c = 0.0
                for k in range(d):
                    c = c + X[i, k] * X[j, k]
                if c > 1.0:
                    c = 1.0
                elif c < -1.0:
                    c = -1.0
                un = 0.0
                for k in range(d):
                    u = X[j, k] - c * X[i, k]
                    un = un + u * u
                un = sqrt(un)
                if j == i or un < ZERO_NORM:
                    for k in range(d):
                        out[i, k, j] = 0.0
                else:
                    s = _angle(X, i, j, c) / un
                    for k in range(d):
                        out[i, k, j] = (X[j, k] - c * X[i, k]) * s


def euclidean_factors(const double[:, ::1] X, double[:, :, ::1] out,
                      Py_ssize_t start, Py_ssize_t stop):
    cdef Py_ssize_t n = X.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, k
    with nogil:
        for i in range(start, stop):
            for j in range(n):
                for k in range(d):
                    out[i, k, j] = X[j, k] - X[i, k]


def gram_from_factors(const double[:, :, ::1] V, double[:, :, ::1] out,
                      Py_ssize_t start, Py_ssize_t stop):
    # V[i] is row-major (d, n), i.e. a column-major (n, d) matrix A, so
    # V[i]^T V[i] = A A^T is one symmetric rank-d update (dsyrk)
    cdef int d = <int>V.shape[1], n = <int>V.shape[2]
    cdef Py_ssize_t i, j, l
    cdef char uplo = b'U', trans = b'N'
    cdef double one = 1.0, zero = 0.0
    if d == 0 or n == 0:
        out[start:stop] = 0.0
        return
    with nogil:
        for i in range(start, stop):
            dsyrk(&uplo, &trans, &n, &d, &one, <double*>&V[i, 0, 0], &n,
                  &zero, &out[i, 0, 0], &n)
            # column-major upper triangle is the row-major lower one
            for j in range(n):
                for l in range(j + 1, n):
                    out[i, j, l] = out[i, l, j]


def quad_form_sum(const double[:, :, ::1] Q, W):
    cdef const double[:, ::1] Wt = W.T.copy()
    cdef Py_ssize_t n = Q.shape[0]
    cdef Py_ssize_t i, j, l
    cdef double total = 0.0, row
    with nogil:
        for i in range(n):
            for j in range(n):
                row = 0.0
                for l in range(n):
                    row = row + Q[i, j, l] * Wt[i, l]
                total = total + Wt[i, j] * row
    return total


def gradient(const double[:, :, ::1] Q, W, const double[::1] y, double beta,
             double nu, const double[:, ::1] GW, double[:, ::1] out):
    cdef const double[:, ::1] Wt = W.T.copy()
    cdef Py_ssize_t n = Q.shape[0]
    cdef Py_ssize_t i, j, l
    cdef double acc, viol, shift, w
    with nogil:
        for i in range(n):
            viol = -1.0
            for l in range(n):
                viol = viol + Wt[i, l]
            shift = y[i] + beta * viol
            for j in range(n):
                acc = 0.0
                for l in range(n):
                    acc = acc + Q[i, j, l] * Wt[i, l]
                w = Wt[i, j]
                if w > 0.0:
                    acc = acc + nu * GW[j, i]
                elif w < 0.0:
                    acc = acc - nu * GW[j, i]
                out[j, i] = acc + shift
