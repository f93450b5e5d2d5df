"""Shared fixtures and small data builders for the test suite."""

import numpy as np
import pytest

from wadbounds.model import IntervalSample


def make_sample(y_lower, y_upper, z) -> IntervalSample:
    """Build an immutable sample from plain arrays."""
    lo = np.asarray(y_lower, dtype=float).copy()
    hi = np.asarray(y_upper, dtype=float).copy()
    zz = np.atleast_2d(np.asarray(z, dtype=float)).copy()
    if zz.shape[0] != lo.shape[0]:
        zz = zz.T
    for a in (lo, hi, zz):
        a.setflags(write=False)
    return IntervalSample(lo, hi, zz)


def linear_sample(n, seed=0, ell=2, beta=None, noise=1.0, width=0.0) -> IntervalSample:
    """Y = Z'beta + eps, censored symmetrically by a constant half-width."""
    rng = np.random.default_rng(seed)
    beta = np.ones(ell) if beta is None else np.asarray(beta, dtype=float)
    z = rng.standard_normal((n, ell))
    y = z @ beta + noise * rng.standard_normal(n)
    return make_sample(y - width, y + width, z)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _quiet_rate_warnings():
    """Bandwidth-rate heuristics fire constantly at test-scale n; keep them out
    of the report unless a test asserts on them explicitly."""
    import warnings

    from wadbounds.errors import BandwidthRateWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BandwidthRateWarning)
        yield
