"""Test statistics, decision rules, and Monte Carlo calibration."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    kolmogorov_quantile,
    kolmogorov_sf,
    normal_cdf,
    normal_quantile,
    null_inner_cdf,
    packing_gumbel_cdf,
    packing_gumbel_quantile,
)
from .errors import BadTailError, CalibrationUnavailableError, DomainError
from .points import InnerProductList, UnitPointSet, pairwise_inner_products
from .samplers import RngSeed, Uniform, sample, sample_uniform_direction

SUP_DISTANCE = "sup_distance"
RAYLEIGH = "rayleigh"
BINGHAM = "bingham"
PACKING = "packing"
PROJECTION = "projection"
METHODS = (SUP_DISTANCE, RAYLEIGH, BINGHAM, PACKING, PROJECTION)

_TWO_SIDED_OK = {RAYLEIGH, BINGHAM, PACKING}


def sup_cdf_distance(values, cdf_values) -> float:
    """Exact sup_t |F_N(t) - F(t)| for a continuous reference CDF F.

    `values` must be sorted ascending and `cdf_values` = F(values).
    Uses the one-sided pair max(i/N - F_i, F_i - (i-1)/N); ties
    contribute a single jump of combined mass automatically.
    """
    f = np.asarray(cdf_values, dtype=float)
    n = len(f)
    if n == 0:
        raise DomainError("need at least one value")
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def statistic_sup_distance(s: UnitPointSet, ip: InnerProductList | None = None) -> float:
    """Sup distance between the empirical pairwise inner-product CDF and
    the exact null CDF.  Always in [0, 1]."""
    ip = ip if ip is not None else pairwise_inner_products(s)
    return sup_cdf_distance(ip.values, null_inner_cdf(ip.values, s.p))


def statistic_rayleigh(s: UnitPointSet, ip: InnerProductList | None = None) -> float:
    """sqrt(2p)/n times the sum of pairwise inner products (N(0,1) null limit)."""
    ip = ip if ip is not None else pairwise_inner_products(s)
    return float(math.sqrt(2.0 * s.p) / s.n * np.sum(ip.values))


def statistic_bingham(s: UnitPointSet, ip: InnerProductList | None = None) -> float:
    """p/n times the centered sum of squared pairwise inner products."""
    ip = ip if ip is not None else pairwise_inner_products(s)
    v = ip.values
    return float(s.p / s.n * (np.sum(v * v) - len(v) / s.p))


def statistic_packing(s: UnitPointSet, ip: InnerProductList | None = None) -> float:
    """p max_{i<j} (X_i.X_j)^2 - 4 log n + log log n (Gumbel null limit).

    Needs n >= 3 so that log log n is defined.
    """
    if s.n < 3:
        raise DomainError("packing statistic needs n >= 3")
    ip = ip if ip is not None else pairwise_inner_products(s)
    v = ip.values
    return float(s.p * np.max(v * v) - 4.0 * math.log(s.n) + math.log(math.log(s.n)))


def statistic_projection(s: UnitPointSet, direction) -> float:
    """One-sample sup distance of the projections X_i.u against the null
    coordinate CDF (a fixed unit vector dotted with a uniform point)."""
    u = np.asarray(direction, dtype=float)
    if u.shape != (s.p,) or abs(np.linalg.norm(u) - 1.0) > 1e-8:
        raise DomainError("direction must be a unit p-vector")
    proj = np.sort(np.clip(s.data @ u, -1.0, 1.0))
    return sup_cdf_distance(proj, null_inner_cdf(proj, s.p))


_STAT_FUNCS = {
    SUP_DISTANCE: statistic_sup_distance,
    RAYLEIGH: statistic_rayleigh,
    BINGHAM: statistic_bingham,
    PACKING: statistic_packing,
}


@dataclass(frozen=True)
class TestOutcome:
    """Result of one uniformity test on one sample."""

    method: str
    statistic: float
    standardized: float
    p_value: float
    reject: bool
    alpha: float
    tail: str
    calibration: str

    def csv_row(self) -> str:
        return (
            f"{self.method},{self.statistic:.10g},{self.standardized:.10g},"
            f"{self.p_value:.10g},{int(self.reject)},{self.alpha:.10g},"
            f"{self.tail},{self.calibration}"
        )

    @staticmethod
    def csv_header() -> str:
        return "method,statistic,standardized,p_value,reject,alpha,tail,calibration"


def _asymptotic_p(method: str, stat: float, standardized: float, tail: str, n: int) -> float:
    if method == SUP_DISTANCE:
        return float(kolmogorov_sf(standardized))
    if method == PROJECTION:
        return float(kolmogorov_sf(math.sqrt(n) * stat))
    if method == RAYLEIGH or method == BINGHAM:
        if tail == "upper":
            return float(1.0 - normal_cdf(stat))
        return float(2.0 * (1.0 - normal_cdf(abs(stat))))
    if method == PACKING:
        up = float(1.0 - packing_gumbel_cdf(stat))
        if tail == "upper":
            return up
        return float(2.0 * min(up, 1.0 - up))
    raise DomainError(f"unknown method {method!r}")


def run_test(
    s: UnitPointSet,
    method: str,
    alpha: float = 0.05,
    tail: str = "upper",
    calibration: str = "asymptotic",
    direction=None,
    mc_reps: int = 2000,
    mc_seed=None,
    rng=None,
) -> TestOutcome:
    """Run one named test at level alpha and package the decision.

    For the sup-distance test the rejection rule is the exact
    asymptotic one: reject iff T_n >= sqrt(2) c_alpha / sqrt(n(n-1)).
    `calibration="monte-carlo"` replaces the critical value by the
    empirical (1-alpha) null quantile from `mc_reps` seeded draws.
    """
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; choose from {METHODS}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if tail not in ("upper", "two-sided"):
        raise BadTailError(f"tail must be 'upper' or 'two-sided', got {tail!r}")
    if tail == "two-sided" and method not in _TWO_SIDED_OK:
        raise BadTailError(f"{method} is upper-tailed only")

    if method == PROJECTION:
        if direction is None:
            direction = sample_uniform_direction(
                s.p, rng if rng is not None else np.random.default_rng()
            )
        stat = statistic_projection(s, direction)
        standardized = stat
    else:
        stat = _STAT_FUNCS[method](s)
        standardized = (
            math.sqrt(s.n * (s.n - 1) / 2.0) * stat if method == SUP_DISTANCE else stat
        )

    if calibration == "asymptotic":
        p_value = _asymptotic_p(method, stat, standardized, tail, s.n)
        reject = p_value <= alpha
        return TestOutcome(method, stat, standardized, p_value, bool(reject), alpha, tail, "asymptotic")

    if calibration != "monte-carlo":
        raise DomainError(f"calibration must be 'asymptotic' or 'monte-carlo', got {calibration!r}")
    if mc_seed is None:
        raise CalibrationUnavailableError(
            "monte-carlo calibration needs mc_seed for reproducible null draws"
        )
    null_stats = _null_statistics(s.n, s.p, method, mc_reps, mc_seed)
    obs = abs(stat) if tail == "two-sided" else stat
    ref = np.abs(null_stats) if tail == "two-sided" else null_stats
    crit = float(np.quantile(ref, 1.0 - alpha, method="higher"))
    p_value = float((1 + np.sum(ref >= obs)) / (len(ref) + 1))
    reject = obs > crit
    label = f"monte-carlo(reps={mc_reps},seed={mc_seed})"
    return TestOutcome(method, stat, standardized, p_value, bool(reject), alpha, tail, label)


def _null_statistics(n: int, p: int, method: str, reps: int, seed) -> np.ndarray:
    """Statistics of `reps` seeded null samples, one stream per replication."""
    if reps < 1:
        raise DomainError("reps must be >= 1")
    master = seed.master if isinstance(seed, RngSeed) else int(seed)
    out = np.empty(reps)
    model = Uniform(p)
    for r in range(reps):
        rng = np.random.default_rng(np.random.SeedSequence(master, spawn_key=(r,)))
        smp = sample(model, n, rng)
        if method == PROJECTION:
            out[r] = statistic_projection(smp, sample_uniform_direction(p, rng))
        else:
            out[r] = _STAT_FUNCS[method](smp)
    return out


def calibrate_critical_value_mc(
    n: int, p: int, method: str, alpha: float, reps: int, seed
) -> float:
    """Empirical (1-alpha) quantile of the null statistic over `reps`
    seeded replications; alpha = 1 returns the smallest observed value."""
    if reps < 1000:
        raise DomainError("calibration needs reps >= 1000")
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must be in (0, 1], got {alpha}")
    stats = _null_statistics(n, p, method, reps, seed)
    return float(np.quantile(stats, 1.0 - alpha, method="higher"))


def sup_distance_critical_value(n: int, alpha: float) -> float:
    """sqrt(2) c_alpha / sqrt(n(n-1)), the exact asymptotic threshold."""
    return math.sqrt(2.0) * kolmogorov_quantile(alpha) / math.sqrt(n * (n - 1.0))


def rayleigh_critical_value(alpha: float, tail: str = "upper") -> float:
    if tail == "upper":
        return float(normal_quantile(1.0 - alpha))
    return float(normal_quantile(1.0 - alpha / 2.0))


def packing_critical_value(alpha: float) -> float:
    return packing_gumbel_quantile(alpha)
