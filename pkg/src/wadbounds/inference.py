"""Score-based weighted bootstrap, confidence sets, and Hausdorff metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .density import pair_gradient_field
from .errors import GridMismatch
from .estimator import EstimatorConfig, ScoreTables, estimate_set, prepare_tables
from .kernels import kernel_from_spec
from .model import ConvexSetRepr, IntervalSample, SupportFunctionValues


@dataclass(frozen=True)
class BootstrapConfig:
    n_draws: int = 200
    multiplier_law: str = "std_normal"
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.n_draws < 100:
            raise ValueError("need at least 100 bootstrap draws")
        if self.multiplier_law not in ("std_normal", "rademacher"):
            raise ValueError(f"unknown multiplier law {self.multiplier_law!r}")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")


def _draw_multipliers(rng, law: str, shape):
    if law == "std_normal":
        return rng.standard_normal(shape)
    return rng.integers(0, 2, size=shape) * 2.0 - 1.0


def _per_observation_terms(sample, config, directions, tables):
    """For each direction p, the per-i U-process summands
    sum_{j != i} (-2/((n-1) h^(ell+1))) p' grad K((Z_i - Z_j)/h) (Yhat_{p,i} - Yhat_{p,j}).

    Returns (terms, upsilon) with shapes (M, n) and (M,); the pair gradient
    field is computed once and contracted against every direction.
    """
    n, ell = sample.n, sample.ell
    h = config.kernel.bandwidth_h
    K = kernel_from_spec(config.kernel, ell)
    G = pair_gradient_field(sample, K, h)  # (n, n, ell)
    scale = -2.0 / ((n - 1) * h ** (ell + 1))
    P = np.asarray(directions, dtype=float)
    signs = tables.at_htilde.lhat @ P.T  # (n, M)
    yhat = np.where(signs.T <= 0, sample.y_lower, sample.y_upper)  # (M, n)
    terms = np.empty((P.shape[0], n))
    for m in range(P.shape[0]):
        pg = G @ P[m]  # (n, n)
        row = pg.sum(axis=1)
        terms[m] = scale * (yhat[m] * row - pg @ yhat[m])
    upsilon = np.array([np.mean((tables.at_h.lhat @ p) * y) for p, y in zip(P, yhat)])
    return terms, upsilon


def bootstrap_process(
    sample: IntervalSample,
    config: EstimatorConfig,
    weights,
    p,
    tables: Optional[ScoreTables] = None,
) -> float:
    """One realization of the weighted bootstrap process G*_n(p).

    (1/sqrt n) sum_i W_i { U-process summand_i - upsilonhat_n(p) }.
    """
    t = tables if tables is not None else prepare_tables(sample, config)
    weights = np.asarray(weights, dtype=float)
    terms, upsilon = _per_observation_terms(sample, config, np.atleast_2d(p), t)
    return float(weights @ (terms[0] - upsilon[0]) / math.sqrt(sample.n))


@dataclass(frozen=True)
class ConfidenceOutput:
    expansion_radius: float
    expanded_set: ConvexSetRepr
    coordinate_intervals: tuple  # per coordinate (lower, upper)
    coordinate_radii: tuple


def _quantile_order_statistic(stats: np.ndarray, alpha: float) -> float:
    # Right-continuous empirical quantile: the ceil((1-alpha) B)-th order statistic.
    b = stats.shape[0]
    k = max(1, math.ceil((1.0 - alpha) * b))
    return float(np.sort(stats)[k - 1])


def one_sided_confidence_set(
    sample: IntervalSample,
    config: EstimatorConfig,
    bconfig: BootstrapConfig,
    tables: Optional[ScoreTables] = None,
) -> ConfidenceOutput:
    """Level 1-alpha one-sided confidence set for the identified set.

    Expands the hull-repaired set estimate by c*/sqrt(n), where c* is the
    empirical 1-alpha quantile over bootstrap draws of
    sup_p max(-G*_n(p), 0).  Coordinate intervals use the same draws
    restricted to the two axis directions.
    """
    t = tables if tables is not None else prepare_tables(sample, config)
    est = estimate_set(sample, config, t)
    grid = config.grid
    terms, upsilon = _per_observation_terms(sample, config, grid.directions, t)
    centered = terms - upsilon[:, None]  # (M, n)
    rng = np.random.default_rng(bconfig.seed)
    W = _draw_multipliers(rng, bconfig.multiplier_law, (bconfig.n_draws, sample.n))
    gstar = centered @ W.T / math.sqrt(sample.n)  # (M, B)
    neg_part = np.clip(-gstar, 0.0, None)
    stats = neg_part.max(axis=0)
    radius = _quantile_order_statistic(stats, bconfig.alpha) / math.sqrt(sample.n)
    expanded = ConvexSetRepr(
        SupportFunctionValues(grid, est.hull.support.values + radius),
        est.hull.extreme_points + radius * grid.directions,
        est.hull.vertices,
    )
    intervals = []
    radii = []
    for j in range(sample.ell):
        idx = [grid.axis_index(j, +1), grid.axis_index(j, -1)]
        cj = _quantile_order_statistic(neg_part[idx].max(axis=0), bconfig.alpha)
        rj = cj / math.sqrt(sample.n)
        lo, hi = est.hull.coordinate_bounds(j)
        intervals.append((lo - rj, hi + rj))
        radii.append(rj)
    return ConfidenceOutput(radius, expanded, tuple(intervals), tuple(radii))


def coordinate_confidence_interval(
    sample: IntervalSample,
    config: EstimatorConfig,
    bconfig: BootstrapConfig,
    j: int,
    tables: Optional[ScoreTables] = None,
) -> tuple[float, float]:
    """Symmetric expansion of the estimated j-th coordinate bounds (0-based j).

    The bootstrap statistic uses only the directions +-iota_j.
    """
    t = tables if tables is not None else prepare_tables(sample, config)
    est = estimate_set(sample, config, t)
    axes = np.zeros((2, sample.ell))
    axes[0, j] = 1.0
    axes[1, j] = -1.0
    terms, upsilon = _per_observation_terms(sample, config, axes, t)
    centered = terms - upsilon[:, None]
    rng = np.random.default_rng(bconfig.seed)
    W = _draw_multipliers(rng, bconfig.multiplier_law, (bconfig.n_draws, sample.n))
    gstar = centered @ W.T / math.sqrt(sample.n)
    stats = np.clip(-gstar, 0.0, None).max(axis=0)
    rj = _quantile_order_statistic(stats, bconfig.alpha) / math.sqrt(sample.n)
    lo, hi = est.hull.coordinate_bounds(j)
    return (lo - rj, hi + rj)


def _check_grids(a: SupportFunctionValues, b: SupportFunctionValues):
    if not a.grid.same_grid(b.grid):
        raise GridMismatch("support functions live on different grids")


def hausdorff(a: SupportFunctionValues, b: SupportFunctionValues) -> float:
    """Hausdorff distance between convex bodies via their support functions:
    max over the grid of |a - b|."""
    _check_grids(a, b)
    return float(np.max(np.abs(a.values - b.values)))


def directed_hausdorff(a: SupportFunctionValues, b: SupportFunctionValues) -> float:
    """One-sided excess of A over B: max over the grid of (a - b)_+.

    Zero iff A fits inside B at grid resolution.
    """
    _check_grids(a, b)
    return float(np.max(np.clip(a.values - b.values, 0.0, None)))
