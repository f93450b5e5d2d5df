"""Population-level closed forms: support functions, influence functions, and
the smooth-max approximation for interval-valued covariates.

All integrals against the covariate distribution are seeded Monte Carlo with
reported standard errors; the integrands switch branches on the sign of
p'l(z), which makes smooth quadrature unreliable at the kink.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import EmptyConstraintSet, NonUnitDirection


class MonteCarloValue(NamedTuple):
    """A Monte Carlo estimate together with its standard error."""

    value: float
    se: float


def gamma_select(w1, w2, w3):
    """Branch selector: w1 where w3 <= 0, w2 where w3 > 0 (ties take w1).

    Works elementwise on arrays; scalar inputs return a scalar.
    """
    out = np.where(np.asarray(w3) <= 0, w1, w2)
    return out.item() if out.ndim == 0 else out


@dataclass(frozen=True)
class PopulationSpec:
    """Everything needed to evaluate the population formulas for one design.

    All callables are vectorized: scalar-valued ones map (n, ell) arrays to
    (n,), vector-valued ones to (n, ell).  ``grad_m_lower``/``grad_m_upper``
    are optional; central finite differences (step 1e-5, relative-scaled) are
    used when they are absent.  ``outcome_sampler(rng, z) -> (y_lower,
    y_upper)`` is only needed for influence-function diagnostics.
    """

    ell: int
    weight_kind: str  # "density_weight" | "user_weight"
    m_lower: Callable
    m_upper: Callable
    density_f: Callable
    grad_log_density: Callable
    covariate_sampler: Callable  # (rng, n) -> (n, ell)
    weight_w: Optional[Callable] = None
    grad_w: Optional[Callable] = None
    grad_m_lower: Optional[Callable] = None
    grad_m_upper: Optional[Callable] = None
    outcome_sampler: Optional[Callable] = None

    def __post_init__(self):
        if self.weight_kind not in ("density_weight", "user_weight"):
            raise ValueError(f"unknown weight_kind {self.weight_kind!r}")
        if self.weight_kind == "user_weight" and (self.weight_w is None or self.grad_w is None):
            raise ValueError("user_weight requires weight_w and grad_w")

    def score(self, z: np.ndarray) -> np.ndarray:
        """l(z): -grad w - w grad f / f in general, -2 grad f under the density weight."""
        gradf = self.density_f(z)[:, None] * self.grad_log_density(z)
        if self.weight_kind == "density_weight":
            return -2.0 * gradf
        return -self.grad_w(z) - self.weight_w(z)[:, None] * self.grad_log_density(z)

    def weight(self, z: np.ndarray) -> np.ndarray:
        return self.density_f(z) if self.weight_kind == "density_weight" else self.weight_w(z)

    def _grad_m(self, which: str, z: np.ndarray) -> np.ndarray:
        analytic = self.grad_m_lower if which == "lower" else self.grad_m_upper
        if analytic is not None:
            return analytic(z)
        fn = self.m_lower if which == "lower" else self.m_upper
        out = np.empty_like(z)
        for j in range(z.shape[1]):
            step = 1e-5 * np.maximum(1.0, np.abs(z[:, j]))
            zp = z.copy()
            zm = z.copy()
            zp[:, j] += step
            zm[:, j] -= step
            out[:, j] = (fn(zp) - fn(zm)) / (2.0 * step)
        return out


def _check_unit(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if abs(np.linalg.norm(p) - 1.0) > 1e-8:
        raise NonUnitDirection(f"|p| = {np.linalg.norm(p)}")
    return p


def population_support(
    spec: PopulationSpec, p, n_draws: int = 100_000, seed: int = 0
) -> MonteCarloValue:
    """Support function of the identified set at direction p, by Monte Carlo.

    Averages Gamma(m_L, m_U, p'l) * p'l over covariate draws; the selector
    picks the bound function that maximizes the directional integrand.
    """
    p = _check_unit(p)
    rng = np.random.default_rng(seed)
    z = spec.covariate_sampler(rng, n_draws)
    plz = spec.score(z) @ p
    vals = gamma_select(spec.m_lower(z), spec.m_upper(z), plz) * plz
    return MonteCarloValue(float(np.mean(vals)), float(np.std(vals) / np.sqrt(n_draws)))


def population_extreme_point(
    spec: PopulationSpec, p, n_draws: int = 100_000, seed: int = 0
) -> np.ndarray:
    """theta*(p) = E[m_p(Z) l(Z)], the boundary point touched at direction p."""
    p = _check_unit(p)
    rng = np.random.default_rng(seed)
    z = spec.covariate_sampler(rng, n_draws)
    lz = spec.score(z)
    mp = gamma_select(spec.m_lower(z), spec.m_upper(z), lz @ p)
    return np.mean(mp[:, None] * lz, axis=0)


def population_coordinate_bounds(
    spec: PopulationSpec, j: int, n_draws: int = 100_000, seed: int = 0
) -> tuple[MonteCarloValue, MonteCarloValue]:
    """Bounds on the j-th weighted average derivative (0-based j), as
    (-support(-iota_j), support(+iota_j))."""
    minus = np.zeros(spec.ell)
    minus[j] = -1.0
    plus = -minus
    lo = population_support(spec, minus, n_draws, seed)
    hi = population_support(spec, plus, n_draws, seed)
    return MonteCarloValue(-lo.value, lo.se), hi


def influence_centering(
    spec: PopulationSpec, p, n_draws: int = 100_000, seed: int = 0
) -> MonteCarloValue:
    """Centering constant that makes the influence function mean-zero.

    Monte Carlo estimate of E[w(Z) p' grad m_p(Z)], where grad m_p switches
    between the bound gradients on the sign of p'l(Z).  This is *not* the same
    number as the support function: integrating the selected bound m_p against
    p'l by parts leaves a residual proportional to the interval width m_U - m_L
    on the surface where p'l changes sign, so the two differ whenever the
    interval is nondegenerate there.  Pass this value as ``upsilon_p`` to
    ``efficient_influence`` (or its density-weight variant) to obtain a
    mean-zero influence whose second moment equals the variance decomposition
    Var(w p' grad m_p) + E|p'l zeta_p|^2.
    """
    p = _check_unit(p)
    rng = np.random.default_rng(seed)
    z = spec.covariate_sampler(rng, n_draws)
    plz = spec.score(z) @ p
    grad_mp = np.where(
        (plz <= 0)[:, None], spec._grad_m("lower", z), spec._grad_m("upper", z)
    )
    vals = spec.weight(z) * (grad_mp @ p)
    return MonteCarloValue(float(np.mean(vals)), float(np.std(vals) / np.sqrt(n_draws)))


def efficient_influence(spec: PopulationSpec, p, x, upsilon_p: float):
    """Efficient influence function for the support function, mean regression.

    psi_p(x) = w(z) p' grad m_p(z) - upsilon_p + p'l(z) zeta_p(x), where both
    grad m_p and zeta_p switch on the sign of p'l(z).  ``x`` is a single
    (y_lower, y_upper, z) triple or a batch of arrays.
    """
    p = _check_unit(p)
    yl, yu, z, scalar = _as_batch(x, spec.ell)
    lz = spec.score(z)
    plz = lz @ p
    grad_mp = np.where(
        (plz <= 0)[:, None], spec._grad_m("lower", z), spec._grad_m("upper", z)
    )
    zeta = gamma_select(yl - spec.m_lower(z), yu - spec.m_upper(z), plz)
    psi = spec.weight(z) * (grad_mp @ p) - upsilon_p + plz * zeta
    return float(psi[0]) if scalar else psi


def efficient_influence_density_weight(spec: PopulationSpec, p, x, upsilon_p: float):
    """Density-weight variant: 2{f p' grad m_p - upsilon_p} - 2 p' grad f (y_p - m_p)."""
    p = _check_unit(p)
    yl, yu, z, scalar = _as_batch(x, spec.ell)
    gradf = spec.density_f(z)[:, None] * spec.grad_log_density(z)
    plz = -2.0 * (gradf @ p)
    grad_mp = np.where(
        (plz <= 0)[:, None], spec._grad_m("lower", z), spec._grad_m("upper", z)
    )
    mp = gamma_select(spec.m_lower(z), spec.m_upper(z), plz)
    yp = gamma_select(yl, yu, plz)
    psi = 2.0 * (spec.density_f(z) * (grad_mp @ p) - upsilon_p) - 2.0 * (gradf @ p) * (yp - mp)
    return float(psi[0]) if scalar else psi


def _as_batch(x, ell):
    if isinstance(x, tuple) and len(x) == 3 and np.ndim(x[0]) == 0:
        yl = np.array([float(x[0])])
        yu = np.array([float(x[1])])
        z = np.asarray(x[2], dtype=float).reshape(1, ell)
        return yl, yu, z, True
    yl, yu, z = x
    return (
        np.asarray(yl, dtype=float),
        np.asarray(yu, dtype=float),
        np.asarray(z, dtype=float).reshape(len(np.atleast_1d(yl)), ell),
        False,
    )


def inverse_information(
    spec: PopulationSpec, p1, p2, n_draws: int = 100_000, seed: int = 0
) -> MonteCarloValue:
    """Covariance kernel of the efficient limit process: E[psi_{p1} psi_{p2}].

    Requires an ``outcome_sampler`` on the spec.  The influence functions are
    centered with ``influence_centering`` values computed on an independent
    substream of the same size, so each factor is mean-zero up to Monte Carlo
    error.
    """
    if spec.outcome_sampler is None:
        raise ValueError("inverse_information needs spec.outcome_sampler")
    p1 = _check_unit(p1)
    p2 = _check_unit(p2)
    ss = np.random.SeedSequence(seed)
    s_draw, s_ups = ss.spawn(2)
    ups1 = influence_centering(spec, p1, n_draws, s_ups).value
    ups2 = influence_centering(spec, p2, n_draws, s_ups).value
    rng = np.random.default_rng(s_draw)
    z = spec.covariate_sampler(rng, n_draws)
    yl, yu = spec.outcome_sampler(rng, z)
    influence = (
        efficient_influence_density_weight
        if spec.weight_kind == "density_weight"
        else efficient_influence
    )
    prod = influence(spec, p1, (yl, yu, z), ups1) * influence(spec, p2, (yl, yu, z), ups2)
    return MonteCarloValue(float(np.mean(prod)), float(np.std(prod) / np.sqrt(n_draws)))


@dataclass(frozen=True)
class IntervalCovariateSpec:
    """Discrete-support description of an interval-valued covariate.

    ``gamma(z, v_lower, v_upper)`` is the regression of the outcome on the
    fully observed covariates and the censoring pair, vectorized over z.
    """

    gamma: Callable
    support_pairs: Sequence[tuple[float, float]]
    kappa: float

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be nonnegative")
        for vl, vu in self.support_pairs:
            if vl > vu:
                raise ValueError(f"support pair ({vl}, {vu}) violates v_lower <= v_upper")

    def constraint_pairs(self, v: float, side: str) -> list[tuple[float, float]]:
        if side == "lower":
            pairs = [(vl, vu) for vl, vu in self.support_pairs if vu <= v]
        else:
            pairs = [(vl, vu) for vl, vu in self.support_pairs if v <= vl]
        if not pairs:
            raise EmptyConstraintSet(v, side)
        return pairs


def _smooth_extreme(gammas: np.ndarray, kappa: float, sign: float) -> np.ndarray:
    # Softmax-weighted average along axis 0; sign +1 approximates the max,
    # -1 the min.  Log-sum-exp shift keeps the exponentials bounded.
    a = sign * kappa * gammas
    a -= a.max(axis=0, keepdims=True)
    w = np.exp(a)
    return (gammas * w).sum(axis=0) / w.sum(axis=0)


def smooth_bounds(icspec: IntervalCovariateSpec, z, v: float):
    """Smooth-max lower and smooth-min upper bounds on the regression at (z, v).

    Weighted averages of gamma over the admissible censoring pairs, with
    softmax weights exp(+-kappa gamma); conservative approximations of the
    hard sup/inf with O(kappa^-2) bias.
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    lo_pairs = icspec.constraint_pairs(v, "lower")
    hi_pairs = icspec.constraint_pairs(v, "upper")
    g_lo = np.stack([icspec.gamma(z, vl, vu) for vl, vu in lo_pairs])
    g_hi = np.stack([icspec.gamma(z, vl, vu) for vl, vu in hi_pairs])
    lower = _smooth_extreme(g_lo, icspec.kappa, +1.0)
    upper = _smooth_extreme(g_hi, icspec.kappa, -1.0)
    if lower.shape == (1,):
        return float(lower[0]), float(upper[0])
    return lower, upper


def hard_bounds(icspec: IntervalCovariateSpec, z, v: float):
    """Exact sup/inf over the finite constraint sets (the kappa -> infinity limit)."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    g_lo = np.stack([icspec.gamma(z, vl, vu) for vl, vu in icspec.constraint_pairs(v, "lower")])
    g_hi = np.stack([icspec.gamma(z, vl, vu) for vl, vu in icspec.constraint_pairs(v, "upper")])
    lower = g_lo.max(axis=0)
    upper = g_hi.min(axis=0)
    if lower.shape == (1,):
        return float(lower[0]), float(upper[0])
    return lower, upper


def smooth_support_interval_covariate(
    icspec: IntervalCovariateSpec,
    spec: PopulationSpec,
    p,
    v: float,
    n_draws: int = 100_000,
    seed: int = 0,
) -> tuple[MonteCarloValue, float]:
    """Smoothed support function for the interval-covariate identified set.

    Returns the Monte Carlo integral of Gamma(g_L, g_U, p'l) * p'l together
    with the conservative bias bound C * E[|l|^2] / kappa^2, where C is the
    number of support pairs (a documented proxy for the unspecified constant).
    """
    p = _check_unit(p)
    rng = np.random.default_rng(seed)
    z = spec.covariate_sampler(rng, n_draws)
    lz = spec.score(z)
    plz = lz @ p
    g_lo, g_hi = smooth_bounds(icspec, z, v)
    vals = gamma_select(g_lo, g_hi, plz) * plz
    if icspec.kappa == 0:
        bias = np.inf
    else:
        bias = len(icspec.support_pairs) * float(np.mean(np.sum(lz**2, axis=1))) / icspec.kappa**2
    return (
        MonteCarloValue(float(np.mean(vals)), float(np.std(vals) / np.sqrt(n_draws))),
        bias,
    )
