"""Core domain types: interval samples, direction grids, support-function containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    GridMismatch,
    NonUnitDirection,
    RowIntervalViolation,
    TooFewRows,
    UnsupportedDimension,
)

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class IntervalSample:
    """n observations (y_lower, y_upper, z) with y_lower <= y_upper.

    Attributes
    ----------
    y_lower, y_upper : ndarray, shape (n,)
        Interval endpoints of the censored outcome.
    z : ndarray, shape (n, ell)
        Continuously distributed covariates.
    """

    y_lower: np.ndarray
    y_upper: np.ndarray
    z: np.ndarray

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def ell(self) -> int:
        return self.z.shape[1]

    @property
    def is_degenerate(self) -> bool:
        """True when every interval collapses to a point (no censoring)."""
        return bool(np.all(self.y_lower == self.y_upper))


def validate_sample(raw_rows) -> IntervalSample:
    """Validate raw (y_lower, y_upper, z) rows into an immutable sample.

    ``raw_rows`` is an iterable of triples; the third element of each triple
    is the covariate vector.  The covariate dimension is inferred from the
    first row.  Already-validated samples pass through unchanged (idempotent).
    """
    if isinstance(raw_rows, IntervalSample):
        raw_rows = list(zip(raw_rows.y_lower, raw_rows.y_upper, raw_rows.z))
    rows = list(raw_rows)
    if len(rows) < 2:
        raise TooFewRows(len(rows))
    ell = len(np.atleast_1d(np.asarray(rows[0][2], dtype=float)))
    y_lo = np.empty(len(rows))
    y_hi = np.empty(len(rows))
    z = np.empty((len(rows), ell))
    for i, (lo, hi, zi) in enumerate(rows):
        zi = np.atleast_1d(np.asarray(zi, dtype=float))
        if zi.shape != (ell,):
            raise DimensionMismatch(i)
        if lo > hi:
            raise RowIntervalViolation(i)
        y_lo[i], y_hi[i], z[i] = lo, hi, zi
    y_lo.setflags(write=False)
    y_hi.setflags(write=False)
    z.setflags(write=False)
    return IntervalSample(y_lo, y_hi, z)


@dataclass(frozen=True)
class DirectionGrid:
    """Unit vectors discretizing the sphere, always containing all signed axes."""

    directions: np.ndarray  # (M, ell)

    def __post_init__(self):
        d = np.asarray(self.directions, dtype=float)
        norms = np.linalg.norm(d, axis=1)
        if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
            raise NonUnitDirection("grid contains non-unit vectors")
        d.setflags(write=False)
        object.__setattr__(self, "directions", d)

    @property
    def size(self) -> int:
        return self.directions.shape[0]

    @property
    def ell(self) -> int:
        return self.directions.shape[1]

    def axis_index(self, j: int, sign: int) -> int:
        """Index of the grid member equal to sign * iota_j (0-based j)."""
        target = np.zeros(self.ell)
        target[j] = float(np.sign(sign))
        hits = np.where(np.linalg.norm(self.directions - target, axis=1) < 1e-9)[0]
        if hits.size == 0:
            raise GridMismatch(f"axis {'+' if sign > 0 else '-'}iota_{j} missing from grid")
        return int(hits[0])

    def same_grid(self, other: "DirectionGrid") -> bool:
        return (
            self.directions.shape == other.directions.shape
            and bool(np.all(np.abs(self.directions - other.directions) < 1e-12))
        )

    def antipode_indices(self) -> np.ndarray:
        """For each direction, the index of its antipode (-1 when absent)."""
        out = np.full(self.size, -1, dtype=int)
        for i, p in enumerate(self.directions):
            hits = np.where(np.linalg.norm(self.directions + p, axis=1) < 1e-9)[0]
            if hits.size:
                out[i] = hits[0]
        return out


def _dedupe_unit(vectors: np.ndarray) -> np.ndarray:
    kept: list[np.ndarray] = []
    for v in vectors:
        if not any(np.dot(v, u) >= 1.0 - 1e-12 for u in kept):
            kept.append(v)
    return np.array(kept)


def _fibonacci_sphere(m: int) -> np.ndarray:
    # Evenly distributed points on S^2 via the golden-angle lattice.
    k = np.arange(m)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * k
    zc = 1.0 - 2.0 * (k + 0.5) / m
    r = np.sqrt(1.0 - zc**2)
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), zc])
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def make_direction_grid(ell: int, M: int = 128) -> DirectionGrid:
    """Build a unit-vector grid on the sphere in R^ell with all signed axes forced in.

    ell = 1 gives {+1, -1}; ell = 2 gives M equally spaced angles (plus the four
    axes, deduplicated); ell = 3 uses a Fibonacci lattice plus the six axes.
    """
    if ell < 1:
        raise UnsupportedDimension(ell)
    if ell > 3:
        raise UnsupportedDimension(ell)
    if M < 2 * ell:
        raise ValueError(f"M={M} too small; need at least {2 * ell}")
    if ell == 1:
        return DirectionGrid(np.array([[1.0], [-1.0]]))
    axes = np.concatenate([np.eye(ell), -np.eye(ell)])
    if ell == 2:
        ang = 2.0 * np.pi * np.arange(M) / M
        base = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        base = _fibonacci_sphere(M)
    return DirectionGrid(_dedupe_unit(np.concatenate([axes, base])))


@dataclass(frozen=True)
class SupportFunctionValues:
    """One scalar support value per grid direction."""

    grid: DirectionGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.size,):
            raise GridMismatch("values length differs from grid size")
        if not np.all(np.isfinite(v)):
            raise ValueError("support values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def value_at_axis(self, j: int, sign: int) -> float:
        return float(self.values[self.grid.axis_index(j, sign)])


@dataclass(frozen=True)
class ConvexSetRepr:
    """Hull-repaired support function together with per-direction extreme points."""

    support: SupportFunctionValues
    extreme_points: np.ndarray  # (M, ell)
    vertices: np.ndarray = field(default=None)  # hull vertices in angular order (ell = 2)

    def coordinate_bounds(self, j: int) -> tuple[float, float]:
        return (-self.support.value_at_axis(j, -1), self.support.value_at_axis(j, +1))

    def diameter(self) -> float:
        """Largest support width across antipodal grid pairs."""
        anti = self.support.grid.antipode_indices()
        ok = anti >= 0
        return float(np.max(self.support.values[ok] + self.support.values[anti[ok]]))


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family, order and the two bandwidths of the plug-in estimator."""

    family: str = "gaussian"
    order: int = 2
    bandwidth_h: float = 1.0
    bandwidth_htilde: float = 1.0

    def __post_init__(self):
        if self.family not in ("gaussian", "higher_order_gaussian"):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.order < 2:
            raise ValueError("kernel order must be >= 2")
        if self.bandwidth_h <= 0 or self.bandwidth_htilde <= 0:
            raise ValueError("bandwidths must be strictly positive")
