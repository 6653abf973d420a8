# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef inline double cabs(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


def loewner_blocks(mu, v, lam, w):
    cdef const double complex[:] mu_ = np.ascontiguousarray(mu, dtype=np.complex128)
    cdef const double complex[:] lam_ = np.ascontiguousarray(lam, dtype=np.complex128)
    cdef const double complex[:, :, :] v_ = np.ascontiguousarray(v, dtype=np.complex128)
    cdef const double complex[:, :, :] w_ = np.ascontiguousarray(w, dtype=np.complex128)
    cdef Py_ssize_t q = v_.shape[0], p = v_.shape[1], m = v_.shape[2]
    cdef Py_ssize_t k = lam_.shape[0]
    L = np.empty((q * p, k * m), dtype=np.complex128)
    Ls = np.empty((q * p, k * m), dtype=np.complex128)
    cdef double complex[:, :] L_ = L
    cdef double complex[:, :] Ls_ = Ls
    cdef Py_ssize_t i, j, a, b
    cdef double complex d, mi, lj, vi, wj
    with nogil:
        for i in range(q):
            mi = mu_[i]
            for j in range(k):
                lj = lam_[j]
                d = 1.0 / (mi - lj)
                for a in range(p):
                    for b in range(m):
                        vi = v_[i, a, b]
                        wj = w_[j, a, b]
                        L_[i * p + a, j * m + b] = (vi - wj) * d
                        Ls_[i * p + a, j * m + b] = (mi * vi - lj * wj) * d
    return L, Ls


def cauchy(x, y):
    cdef const double complex[:] x_ = np.ascontiguousarray(x, dtype=np.complex128)
    cdef const double complex[:] y_ = np.ascontiguousarray(y, dtype=np.complex128)
    cdef Py_ssize_t n = x_.shape[0], k = y_.shape[0], i, j
    out = np.empty((n, k), dtype=np.complex128)
    cdef double complex[:, :] o = out
    with nogil:
        for i in range(n):
            for j in range(k):
                o[i, j] = 1.0 / (x_[i] - y_[j])
    return out


def bary_eval_siso(nodes, values, weights, s, bint strictly_proper, double tol):
    cdef const double complex[:] z = np.ascontiguousarray(nodes, dtype=np.complex128)
    cdef const double complex[:] f = np.ascontiguousarray(values, dtype=np.complex128)
    cdef const double complex[:] wt = np.ascontiguousarray(weights, dtype=np.complex128)
    cdef const double complex[:] pts = np.ascontiguousarray(s, dtype=np.complex128)
    cdef Py_ssize_t n = pts.shape[0], k = z.shape[0], i, j, hit
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[:] o = out
    cdef double complex num, den, c, diff
    with nogil:
        for i in range(n):
            num = 0.0
            den = 1.0 if strictly_proper else 0.0
            hit = -1
            for j in range(k):
                diff = pts[i] - z[j]
                if cabs(diff) <= tol * (1.0 + cabs(z[j])):
                    hit = j
                    break
                c = wt[j] / diff
                num = num + c * f[j]
                den = den + c
            if hit >= 0:
                o[i] = f[hit]
            else:
                o[i] = num / den
    return out
