"""Plug-in support-function and set estimators.

The support function at direction p is the sample average of
p'lhat_i * Yhat_{p,i}, where lhat is the leave-one-out score at bandwidth h
and Yhat_{p,i} switches between the interval endpoints on the sign of
p'lhat_i at the classification bandwidth htilde.  The optional IV
renormalization premultiplies by the inverse of the sample average of
lhat_i Z_i', targeting the rescaled derivative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .density import ScoreTable, build_score_table, check_bandwidth_rates
from .errors import SingularRenormalization
from .kernels import kernel_from_spec
from .model import (
    ConvexSetRepr,
    DirectionGrid,
    IntervalSample,
    KernelSpec,
    SupportFunctionValues,
)

_COND_LIMIT = 1e10


@dataclass(frozen=True)
class EstimatorConfig:
    kernel: KernelSpec
    grid: DirectionGrid
    renormalize: bool = False


@dataclass(frozen=True)
class ScoreTables:
    """The two leave-one-out score tables backing one estimation run."""

    at_h: ScoreTable
    at_htilde: ScoreTable
    rate_flags: tuple


def prepare_tables(sample: IntervalSample, config: EstimatorConfig) -> ScoreTables:
    K = kernel_from_spec(config.kernel, sample.ell)
    flags = check_bandwidth_rates(
        sample.n, sample.ell, K.order, config.kernel.bandwidth_h, config.kernel.bandwidth_htilde
    )
    table_h = build_score_table(sample, K, config.kernel.bandwidth_h)
    if config.kernel.bandwidth_htilde == config.kernel.bandwidth_h:
        table_ht = table_h
    else:
        table_ht = build_score_table(sample, K, config.kernel.bandwidth_htilde)
    return ScoreTables(table_h, table_ht, tuple(flags))


def _tables(sample, config, tables):
    return tables if tables is not None else prepare_tables(sample, config)


def classify_outcomes(
    sample: IntervalSample,
    config: EstimatorConfig,
    p,
    tables: Optional[ScoreTables] = None,
) -> np.ndarray:
    """Yhat_{p,i}: the lower endpoint where p'lhat_{i,htilde} <= 0, else the upper."""
    t = _tables(sample, config, tables)
    sign = t.at_htilde.lhat @ np.asarray(p, dtype=float)
    return np.where(sign <= 0, sample.y_lower, sample.y_upper)


def renormalization_matrix(sample: IntervalSample, table: ScoreTable) -> np.ndarray:
    """(1/n) sum_i lhat_i Z_i', with a condition-number guard."""
    A = table.lhat.T @ sample.z / sample.n
    if not np.all(np.isfinite(A)) or np.linalg.cond(A) > _COND_LIMIT:
        raise SingularRenormalization(
            f"score-instrument matrix condition number exceeds {_COND_LIMIT:.0e}"
        )
    return A


def extreme_point(
    sample: IntervalSample,
    config: EstimatorConfig,
    p,
    tables: Optional[ScoreTables] = None,
) -> np.ndarray:
    """thetahat(p) = (1/n) sum_i lhat_i Yhat_{p,i}, IV-renormalized when configured."""
    t = _tables(sample, config, tables)
    yhat = classify_outcomes(sample, config, p, t)
    b = t.at_h.lhat.T @ yhat / sample.n
    if config.renormalize:
        return np.linalg.solve(renormalization_matrix(sample, t.at_h), b)
    return b


def support_estimate(
    sample: IntervalSample,
    config: EstimatorConfig,
    p,
    tables: Optional[ScoreTables] = None,
) -> float:
    """Plug-in support function at p (no renormalization)."""
    t = _tables(sample, config, tables)
    p = np.asarray(p, dtype=float)
    yhat = classify_outcomes(sample, config, p, t)
    return float(np.mean((t.at_h.lhat @ p) * yhat))


def support_estimate_iv(
    sample: IntervalSample,
    config: EstimatorConfig,
    p,
    tables: Optional[ScoreTables] = None,
) -> float:
    """IV-renormalized support function: p' (mean lhat Z')^-1 mean(lhat Yhat_p)."""
    t = _tables(sample, config, tables)
    p = np.asarray(p, dtype=float)
    yhat = classify_outcomes(sample, config, p, t)
    b = t.at_h.lhat.T @ yhat / sample.n
    theta = np.linalg.solve(renormalization_matrix(sample, t.at_h), b)
    return float(p @ theta)


@dataclass(frozen=True)
class SetEstimate:
    """Raw grid support values plus the hull-repaired convex representation."""

    raw_support: SupportFunctionValues
    hull: ConvexSetRepr

    def coordinate_bounds(self, j: int) -> tuple[float, float]:
        return self.hull.coordinate_bounds(j)


def _monotone_chain(points: np.ndarray) -> np.ndarray:
    """Convex hull vertices of planar points, counter-clockwise (Andrew's chain)."""
    pts = sorted(set(map(tuple, np.round(points, 12))))
    if len(pts) <= 2:
        return np.array(pts, dtype=float)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for q in pts:
        while len(lower) > 1 and cross(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    upper = []
    for q in reversed(pts):
        while len(upper) > 1 and cross(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    return np.array(lower[:-1] + upper[:-1], dtype=float)


def hull_repair(grid: DirectionGrid, extreme_points: np.ndarray) -> ConvexSetRepr:
    """Support function of the convex hull of the per-direction point estimates.

    The repaired value at p is the maximum of <p, thetahat(q)> over the grid;
    the touching point is the maximizing estimate.  Ordered hull vertices are
    attached for ell <= 2 (interval endpoints, or the monotone-chain polygon).
    """
    pts = np.asarray(extreme_points, dtype=float)
    inner = grid.directions @ pts.T  # (M, n_points)
    best = np.argmax(inner, axis=1)
    values = inner[np.arange(grid.size), best]
    support = SupportFunctionValues(grid, values)
    touched = pts[best]
    if grid.ell == 1:
        vertices = np.array([[pts.min()], [pts.max()]])
    elif grid.ell == 2:
        vertices = _monotone_chain(pts)
    else:
        vertices = None
    return ConvexSetRepr(support, touched, vertices)


def estimate_set(
    sample: IntervalSample,
    config: EstimatorConfig,
    tables: Optional[ScoreTables] = None,
) -> SetEstimate:
    """Extreme points over the whole grid, then hull repair.

    Classifications for all directions share the two score tables, so the
    grid sweep is a single matrix product.
    """
    t = _tables(sample, config, tables)
    P = config.grid.directions  # (M, ell)
    signs = t.at_htilde.lhat @ P.T  # (n, M)
    yhat = np.where(signs.T <= 0, sample.y_lower, sample.y_upper)  # (M, n)
    extremes = yhat @ t.at_h.lhat / sample.n  # (M, ell)
    if config.renormalize:
        A = renormalization_matrix(sample, t.at_h)
        extremes = np.linalg.solve(A, extremes.T).T
    raw = SupportFunctionValues(config.grid, np.einsum("md,md->m", extremes, P))
    return SetEstimate(raw, hull_repair(config.grid, extremes))
