# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pairwise kernel sums: leave-one-out score tables and gradient fields.

Same contract as `_fallback.py`.  The score-table accumulators use Kahan
compensation so the fixed pair order gives bit-stable results.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, sqrt

cnp.import_array()

cdef double SQRT_2PI = sqrt(2.0 * 3.141592653589793)

cdef int MAX_ELL = 8


cdef inline void _factor_pair(double t, const double[::1] coeffs, int nc,
                              double* fac, double* dfac) nogil:
    # k(t) = poly(t^2) phi(t);  k'(t) = (2 t poly'(t^2) - t poly(t^2)) phi(t)
    cdef double t2 = t * t
    cdef double poly = 0.0, dpoly = 0.0, p = 1.0
    cdef int r
    for r in range(nc):
        poly += coeffs[r] * p
        if r + 1 < nc:
            dpoly += coeffs[r + 1] * (r + 1) * p
        p *= t2
    cdef double gauss = exp(-0.5 * t2) / SQRT_2PI
    fac[0] = poly * gauss
    dfac[0] = (2.0 * t * dpoly - t * poly) * gauss


def score_table(const double[:, ::1] z, double h, const double[::1] coeffs):
    """Leave-one-out (fhat, grad_fhat) at every sample point; Kahan-compensated sums."""
    cdef int n = z.shape[0]
    cdef int ell = z.shape[1]
    cdef int nc = coeffs.shape[0]
    if ell > MAX_ELL:
        raise ValueError("pairwise core supports ell <= 8")
    fhat_arr = np.zeros(n)
    grad_arr = np.zeros((n, ell))
    fcomp_arr = np.zeros(n)
    gcomp_arr = np.zeros((n, ell))
    cdef double[::1] fhat = fhat_arr
    cdef double[:, ::1] grad = grad_arr
    cdef double[::1] fcomp = fcomp_arr
    cdef double[:, ::1] gcomp = gcomp_arr
    cdef double fac[8]
    cdef double dfac[8]
    cdef double g[8]
    cdef double kval, prod_others, yv, tv
    cdef int i, j, d, m
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                kval = 1.0
                for d in range(ell):
                    _factor_pair((z[i, d] - z[j, d]) / h, coeffs, nc, &fac[d], &dfac[d])
                    kval *= fac[d]
                for d in range(ell):
                    prod_others = 1.0
                    for m in range(ell):
                        if m != d:
                            prod_others *= fac[m]
                    g[d] = dfac[d] * prod_others
                # Kahan add of the symmetric pair contribution to both rows
                yv = kval - fcomp[i]; tv = fhat[i] + yv
                fcomp[i] = (tv - fhat[i]) - yv; fhat[i] = tv
                yv = kval - fcomp[j]; tv = fhat[j] + yv
                fcomp[j] = (tv - fhat[j]) - yv; fhat[j] = tv
                for d in range(ell):
                    yv = g[d] - gcomp[i, d]; tv = grad[i, d] + yv
                    gcomp[i, d] = (tv - grad[i, d]) - yv; grad[i, d] = tv
                    yv = -g[d] - gcomp[j, d]; tv = grad[j, d] + yv
                    gcomp[j, d] = (tv - grad[j, d]) - yv; grad[j, d] = tv
    fhat_arr /= (n - 1) * h**ell
    grad_arr /= (n - 1) * h ** (ell + 1)
    return fhat_arr, grad_arr


def pair_gradient_field(const double[:, ::1] z, double h, const double[::1] coeffs):
    """G[i, j] = grad K((z_i - z_j)/h); zero diagonal, antisymmetric."""
    cdef int n = z.shape[0]
    cdef int ell = z.shape[1]
    cdef int nc = coeffs.shape[0]
    if ell > MAX_ELL:
        raise ValueError("pairwise core supports ell <= 8")
    out_arr = np.zeros((n, n, ell))
    cdef double[:, :, ::1] out = out_arr
    cdef double fac[8]
    cdef double dfac[8]
    cdef double prod_others, gd
    cdef int i, j, d, m
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                for d in range(ell):
                    _factor_pair((z[i, d] - z[j, d]) / h, coeffs, nc, &fac[d], &dfac[d])
                for d in range(ell):
                    prod_others = 1.0
                    for m in range(ell):
                        if m != d:
                            prod_others *= fac[m]
                    gd = dfac[d] * prod_others
                    out[i, j, d] = gd
                    out[j, i, d] = -gd
    return out_arr
