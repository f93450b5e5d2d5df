"""Pure-numpy implementation of the O(n^2) pairwise kernel sums.

Mirrors the compiled extension in `_pairwise.pyx`; selected at import time
when the extension is unavailable.  Summation order is fixed, so results
are deterministic.
"""

import numpy as np

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def _factors(u, coeffs):
    t2 = u * u
    poly = np.polynomial.polynomial.polyval(t2, coeffs)
    if coeffs.size > 1:
        dpoly = np.polynomial.polynomial.polyval(
            t2, np.polynomial.polynomial.polyder(coeffs)
        )
    else:
        dpoly = np.zeros_like(u)
    gauss = np.exp(-0.5 * t2) / _SQRT_2PI
    return poly * gauss, (2.0 * u * dpoly - u * poly) * gauss


def score_table(z, h, coeffs):
    """Leave-one-out density and density-gradient estimates at every sample point.

    Returns (fhat, grad_fhat) with shapes (n,) and (n, ell).
    """
    z = np.asarray(z, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    n, ell = z.shape
    u = (z[:, None, :] - z[None, :, :]) / h
    fac, dfac = _factors(u, coeffs)
    kmat = np.prod(fac, axis=-1)
    np.fill_diagonal(kmat, 0.0)
    fhat = kmat.sum(axis=1) / ((n - 1) * h**ell)
    grad = np.empty((n, ell))
    diag = np.arange(n)
    for d in range(ell):
        if ell == 1:
            gd = dfac[..., 0].copy()
        else:
            gd = dfac[..., d] * np.prod(np.delete(fac, d, axis=-1), axis=-1)
        gd[diag, diag] = 0.0
        grad[:, d] = gd.sum(axis=1)
    grad /= (n - 1) * h ** (ell + 1)
    return fhat, grad


def pair_gradient_field(z, h, coeffs):
    """Gradient of the kernel at every scaled pair difference: G[i, j] = grad K((z_i - z_j)/h).

    The diagonal is zero; G is antisymmetric in (i, j).
    """
    z = np.asarray(z, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    n, ell = z.shape
    u = (z[:, None, :] - z[None, :, :]) / h
    fac, dfac = _factors(u, coeffs)
    out = np.empty((n, n, ell))
    diag = np.arange(n)
    for d in range(ell):
        if ell == 1:
            out[..., d] = dfac[..., 0]
        else:
            out[..., d] = dfac[..., d] * np.prod(np.delete(fac, d, axis=-1), axis=-1)
    out[diag, diag, :] = 0.0
    return out
