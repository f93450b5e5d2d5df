"""Leave-one-out kernel density, gradient, and score estimation.

The per-sample tables are the O(n^2) hot path; they run on the pairwise
engine in `_core` (compiled extension when available, numpy fallback
otherwise).  The single-point operations below are direct sums and double
as independent oracles for the table builder.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _core
from .errors import BandwidthRateWarning, IndexOutOfRange
from .kernels import KernelFunction
from .model import IntervalSample


@dataclass(frozen=True)
class ScoreTable:
    """Cached leave-one-out estimates at the sample points.

    fhat[i] and grad_fhat[i] are the density and density-gradient estimates
    at Z_i excluding observation i; lhat = -2 * grad_fhat is the density-weight
    score entering the support-function estimator.
    """

    fhat: np.ndarray  # (n,)
    grad_fhat: np.ndarray  # (n, ell)
    bandwidth: float
    kernel: KernelFunction

    @property
    def lhat(self) -> np.ndarray:
        return -2.0 * self.grad_fhat

    @property
    def n(self) -> int:
        return self.fhat.shape[0]


def loo_density(sample: IntervalSample, K: KernelFunction, h: float, i: int, z) -> float:
    """f_hat_{i,h}(z) = (1/((n-1) h^ell)) sum_{j != i} K((z - Z_j)/h)."""
    if not 0 <= i < sample.n:
        raise IndexOutOfRange(f"i={i} outside [0, {sample.n})")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    u = (z[None, :] - np.delete(sample.z, i, axis=0)) / h
    return float(np.sum(K.eval(u))) / ((sample.n - 1) * h**sample.ell)


def loo_score(sample: IntervalSample, K: KernelFunction, h: float, i: int, z) -> np.ndarray:
    """l_hat_{i,h}(z) = -2 grad f_hat_{i,h}(z), the estimated density-weight score."""
    if not 0 <= i < sample.n:
        raise IndexOutOfRange(f"i={i} outside [0, {sample.n})")
    z = np.atleast_1d(np.asarray(z, dtype=float))
    u = (z[None, :] - np.delete(sample.z, i, axis=0)) / h
    grad = np.sum(K.eval_gradient(u), axis=0) / ((sample.n - 1) * h ** (sample.ell + 1))
    return -2.0 * grad


def build_score_table(sample: IntervalSample, K: KernelFunction, h: float) -> ScoreTable:
    """Evaluate the leave-one-out density and score at every sample point.

    One pass over unordered pairs with symmetric kernel reuse; summation is
    compensated in the compiled engine and fixed-order in the fallback, so
    results do not depend on scheduling.
    """
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    z = np.ascontiguousarray(sample.z, dtype=float)
    fhat, grad = _core.score_table(z, float(h), np.ascontiguousarray(K.coefficients))
    fhat.setflags(write=False)
    grad.setflags(write=False)
    return ScoreTable(fhat, grad, float(h), K)


def pair_gradient_field(sample: IntervalSample, K: KernelFunction, h: float) -> np.ndarray:
    """Kernel gradients at all scaled pair differences, G[i, j] = grad K((Z_i - Z_j)/h)."""
    z = np.ascontiguousarray(sample.z, dtype=float)
    return _core.pair_gradient_field(z, float(h), np.ascontiguousarray(K.coefficients))


def check_bandwidth_rates(n: int, ell: int, order: int, h: float, htilde: float) -> list[str]:
    """Finite-n heuristic flags for the asymptotic bandwidth rate conditions.

    Flags (never errors) when n h^(ell+2) < 10, n h^(2J) > 10, or
    n htilde^(4(ell+1)) < 10.  Returns the list of triggered flags and emits a
    BandwidthRateWarning for each.
    """
    flags = []
    if n * h ** (ell + 2) < 10:
        flags.append(f"n*h^(ell+2) = {n * h ** (ell + 2):.3g} < 10: h may be too small")
    if n * h ** (2 * order) > 10:
        flags.append(
            f"n*h^(2J) = {n * h ** (2 * order):.3g} > 10: h may be too large for bias removal"
        )
    if n * htilde ** (4 * (ell + 1)) < 10:
        flags.append(
            f"n*htilde^(4(ell+1)) = {n * htilde ** (4 * (ell + 1)):.3g} < 10: "
            "htilde may be too small"
        )
    for msg in flags:
        warnings.warn(msg, BandwidthRateWarning, stacklevel=2)
    return flags
