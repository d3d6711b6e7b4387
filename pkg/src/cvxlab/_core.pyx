# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: weighted p-norms and circle quadrature sums.

Semantics must match _core_py.py exactly; the backend module treats the
two as interchangeable.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, pow, fabs, isinf

cnp.import_array()

BACKEND_NAME = "compiled"


cdef inline double _cabs(double re, double im) nogil:
    return sqrt(re * re + im * im)


cdef double _norm_point(const double complex* z, Py_ssize_t n, double p,
                        const double* w) nogil:
    cdef Py_ssize_t k
    cdef double acc = 0.0
    cdef double m
    if isinf(p):
        for k in range(n):
            m = _cabs(z[k].real, z[k].imag)
            if w != NULL:
                m *= w[k]
            if m > acc:
                acc = m
        return acc
    if p == 2.0:
        for k in range(n):
            m = z[k].real * z[k].real + z[k].imag * z[k].imag
            if w != NULL:
                m *= w[k]
            acc += m
        return sqrt(acc)
    if p == 1.0:
        for k in range(n):
            m = _cabs(z[k].real, z[k].imag)
            if w != NULL:
                m *= w[k]
            acc += m
        return acc
    for k in range(n):
        m = _cabs(z[k].real, z[k].imag)
        if w != NULL:
            acc += w[k] * pow(m, p)
        else:
            acc += pow(m, p)
    return pow(acc, 1.0 / p)


cdef inline double _qpow(double v, double q) nogil:
    if q == 1.0:
        return v
    if q == 2.0:
        return v * v
    return pow(v, q)


def lp_norm(z, double p, w=None):
    """Weighted p-norm of one complex vector."""
    cdef double complex[::1] zv = np.ascontiguousarray(z, dtype=np.complex128)
    cdef double[::1] wv
    cdef const double* wp = NULL
    if w is not None:
        wv = np.ascontiguousarray(w, dtype=np.float64)
        wp = &wv[0] if wv.shape[0] else NULL
    if zv.shape[0] == 0:
        return 0.0
    return _norm_point(&zv[0], zv.shape[0], p, wp)


def lp_norms(Z, double p, w=None):
    """Row-wise weighted p-norms of a 2-d batch."""
    cdef double complex[:, ::1] Zv = np.ascontiguousarray(Z, dtype=np.complex128)
    cdef double[::1] wv
    cdef const double* wp = NULL
    if w is not None:
        wv = np.ascontiguousarray(w, dtype=np.float64)
        wp = &wv[0] if wv.shape[0] else NULL
    cdef Py_ssize_t m = Zv.shape[0], n = Zv.shape[1], i
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] ov = out
    with nogil:
        for i in range(m):
            ov[i] = _norm_point(&Zv[i, 0], n, p, wp) if n else 0.0
    return out


def circle_qpow_sum(a, b, double p, double q, Py_ssize_t n_nodes,
                    double theta0, double dtheta, w=None):
    """Sum over nodes of ||a + e^{i(theta0 + j dtheta)} b||_p^q, in node order."""
    cdef double complex[::1] av = np.ascontiguousarray(a, dtype=np.complex128)
    cdef double complex[::1] bv = np.ascontiguousarray(b, dtype=np.complex128)
    cdef double[::1] wv
    cdef const double* wp = NULL
    if w is not None:
        wv = np.ascontiguousarray(w, dtype=np.float64)
        wp = &wv[0] if wv.shape[0] else NULL
    cdef Py_ssize_t n = av.shape[0], j, k
    cdef double acc = 0.0, c, s, th, nrm
    cdef double complex[::1] pt = np.empty(n, dtype=np.complex128)
    with nogil:
        for j in range(n_nodes):
            th = theta0 + dtheta * j
            c = cos(th)
            s = sin(th)
            for k in range(n):
                pt[k] = av[k] + (c + 1j * s) * bv[k]
            nrm = _norm_point(&pt[0], n, p, wp) if n else 0.0
            acc += _qpow(nrm, q)
    return acc


def circle_qpow_means(A, B, double p, double q, Py_ssize_t n_nodes, w=None):
    """Per-row mean of ||a_i + e^{i theta} b_i||_p^q over equispaced angles."""
    cdef double complex[:, ::1] Av = np.ascontiguousarray(A, dtype=np.complex128)
    cdef double complex[:, ::1] Bv = np.ascontiguousarray(B, dtype=np.complex128)
    cdef double[::1] wv
    cdef const double* wp = NULL
    if w is not None:
        wv = np.ascontiguousarray(w, dtype=np.float64)
        wp = &wv[0] if wv.shape[0] else NULL
    cdef Py_ssize_t m = Av.shape[0], n = Av.shape[1], i, j, k
    cdef double acc, nrm
    thetas = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    cdef double[::1] cs = np.cos(thetas)
    cdef double[::1] sn = np.sin(thetas)
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double complex[::1] pt = np.empty(n, dtype=np.complex128)
    with nogil:
        for i in range(m):
            acc = 0.0
            for j in range(n_nodes):
                for k in range(n):
                    pt[k] = Av[i, k] + (cs[j] + 1j * sn[j]) * Bv[i, k]
                nrm = _norm_point(&pt[0], n, p, wp) if n else 0.0
                acc += _qpow(nrm, q)
            ov[i] = acc / n_nodes
    return out
