"""Exact null distributions and special functions.

Everything here is deterministic: the inner-product null CDF, the
Kolmogorov distribution, the Gumbel null of the packing statistic,
normal CDF/quantile, the FvML normalizing constant, and 1-D marginal
density handles for the tilted coordinate laws used by the
FvML/Watson samplers and quadratures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import DomainError

_CLAMP_SLACK = 1e-12


# ---------------------------------------------------------------------------
# beta / null inner-product CDF


def regularized_incomplete_beta(x, a: float, b: float):
    """Regularized incomplete beta I_x(a, b).

    Thin wrapper over scipy's continued-fraction implementation, which
    already switches to the complement for x > a/(a+b) and keeps the
    prefactor in log space, so a = b ~ 5e3 is unproblematic.
    """
    if a <= 0 or b <= 0 or a > 1e7 or b > 1e7:
        raise DomainError(f"need 0 < a, b <= 1e7, got a={a}, b={b}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > 1):
        raise DomainError("x outside [0, 1]")
    out = special.betainc(a, b, x)
    return float(out) if out.ndim == 0 else out


def null_inner_cdf(t, p: int):
    """CDF of the inner product of two independent uniform points on S^{p-1}.

    Equals I_{(1+t)/2}((p-1)/2, (p-1)/2).  Arguments within 1e-12 of
    [-1, 1] are clamped; larger deviations raise DomainError.
    """
    if p < 2:
        raise DomainError(f"need p >= 2, got {p}")
    t = np.asarray(t, dtype=float)
    if np.any(t < -1 - _CLAMP_SLACK) or np.any(t > 1 + _CLAMP_SLACK):
        raise DomainError("t outside [-1, 1]")
    x = np.clip((1.0 + t) / 2.0, 0.0, 1.0)
    a = (p - 1) / 2.0
    out = special.betainc(a, a, x)
    return float(out) if out.ndim == 0 else out


def log_coordinate_density_const(p: int) -> float:
    """log of Gamma(p/2) / (sqrt(pi) Gamma((p-1)/2)), the (density-of-
    one-coordinate) normalizing constant in dimension p."""
    return float(
        special.gammaln(p / 2.0) - special.gammaln((p - 1) / 2.0) - 0.5 * math.log(math.pi)
    )


# ---------------------------------------------------------------------------
# Kolmogorov distribution (law of sup |brownian bridge|)


def kolmogorov_sf(x):
    """P(sup_t |B_t| > x) = 2 sum_k (-1)^{k+1} exp(-2 k^2 x^2).

    The alternating series is truncated once a term drops below 1e-16,
    which bounds the truncation error by that term.  x = 0 returns 1
    by convention; negative x raises DomainError.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be >= 0")
    out = np.zeros_like(x)
    todo = x > 0
    xs = x[todo]
    acc = np.zeros_like(xs)
    for k in range(1, 200):
        term = 2.0 * math.pow(-1.0, k + 1) * np.exp(-2.0 * k * k * xs * xs)
        acc += term
        if np.all(np.abs(term) < 1e-16):
            break
    out[todo] = np.clip(acc, 0.0, 1.0)
    out[~todo] = 1.0
    return float(out) if out.ndim == 0 else out


def kolmogorov_cdf(x):
    return 1.0 - kolmogorov_sf(x)


def kolmogorov_quantile(alpha: float) -> float:
    """c with kolmogorov_sf(c) = alpha, by bracketed bisection."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    lo, hi = 1e-8, 10.0
    # sf is strictly decreasing from 1 to 0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if kolmogorov_sf(mid) > alpha:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# normal law


def normal_cdf(u):
    out = special.ndtr(np.asarray(u, dtype=float))
    return float(out) if out.ndim == 0 else out


def normal_pdf(u):
    u = np.asarray(u, dtype=float)
    out = np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    return float(out) if out.ndim == 0 else out


def normal_quantile(q):
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0.0) or np.any(q >= 1.0):
        raise DomainError("quantile argument must be inside (0, 1)")
    out = special.ndtri(q)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# packing-test Gumbel null


def packing_gumbel_cdf(x):
    """CDF exp(-(8 pi)^{-1/2} e^{-x/2}) of the packing statistic's null limit."""
    x = np.asarray(x, dtype=float)
    out = np.exp(-np.exp(-x / 2.0) / math.sqrt(8.0 * math.pi))
    return float(out) if out.ndim == 0 else out


def packing_gumbel_quantile(alpha: float) -> float:
    """x with exceedance probability alpha under the packing Gumbel null."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    return -2.0 * math.log(-math.sqrt(8.0 * math.pi) * math.log1p(-alpha))


# ---------------------------------------------------------------------------
# log-space adaptive quadrature


def log_quad(logf, lo: float, hi: float, inner_points=(), cap_nodes: int = 20000) -> float:
    """log of the integral of exp(logf) over [lo, hi].

    Shifts by the probed maximum of logf and hands the well-scaled
    integrand to an adaptive Gauss-Kronrod rule; `inner_points` should
    list density modes so concentrated peaks are not missed.
    """
    pts = [x for x in inner_points if lo < x < hi]
    probe = np.unique(np.concatenate([np.linspace(lo, hi, 257), np.asarray(pts, float)]))
    shift = float(np.max(logf(probe)))
    if not np.isfinite(shift):
        raise DomainError("log-density is not finite anywhere on the window")

    def g(t):
        return float(np.exp(logf(t) - shift))

    limit = max(50, cap_nodes // 21)
    val, _ = integrate.quad(
        g, lo, hi, points=pts or None, limit=limit, epsabs=1e-14, epsrel=1e-13
    )
    if val <= 0:
        raise DomainError("integral underflowed to zero after shifting")
    return shift + math.log(val)


def _log_norm_integral(kappa: float, power: int, p: int) -> float:
    """log of integral_{-1}^{1} exp(kappa t^power) (1-t^2)^{(p-3)/2} dt."""

    def logf(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):  # t = +-1 gives log 0 = -inf, fine
            return kappa * t**power + 0.5 * (p - 3) * np.log1p(-t * t)

    modes = _tilt_modes(kappa, power, p)
    return log_quad(logf, -1.0, 1.0, inner_points=modes)


def _tilt_modes(kappa: float, power: int, p: int) -> tuple[float, ...]:
    """Modes of exp(kappa t^power)(1-t^2)^{(p-3)/2} on (-1, 1)."""
    if kappa == 0.0:
        return (0.0,)
    if power == 1:
        # kappa (1-t^2) = (p-3) t
        c = p - 3.0
        if c <= 0:
            return (math.copysign(1.0 - 1e-9, kappa) / 2.0,)
        t = (-c + math.sqrt(c * c + 4.0 * kappa * kappa)) / (2.0 * kappa)
        return (t,)
    # power == 2: t = 0 always critical; +-sqrt(1-(p-3)/(2 kappa)) when 2k > p-3
    if 2.0 * kappa > p - 3.0 and kappa > 0:
        t = math.sqrt(1.0 - (p - 3.0) / (2.0 * kappa))
        return (-t, 0.0, t)
    return (0.0,)


def fvml_log_normalizer(kappa: float, p: int) -> float:
    """log of the FvML normalizing constant (inverse of E_0 exp(kappa mu.x)).

    Computed by adaptive log-space quadrature of the 1-D coordinate
    integral; log C_p(0) = 0 exactly.
    """
    if kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    if p < 3:
        raise DomainError(f"need p >= 3, got {p}")
    if kappa == 0.0:
        return 0.0
    return -(log_coordinate_density_const(p) + _log_norm_integral(kappa, 1, p))


# ---------------------------------------------------------------------------
# 1-D coordinate marginals (FvML / Watson tilts of the null coordinate law)


@dataclass(frozen=True)
class CoordinateMarginal:
    """Normalized law of mu.X on [-1, 1] under an exponential tilt.

    density(t)  propto  exp(kappa * t^power) * (1 - t^2)^{(p-3)/2}

    power=1 is the FvML marginal, power=2 the Watson marginal and
    kappa=0 the null coordinate law.  Provides the normalized
    log-density, the tilt normalizer E_0[exp(kappa T^power)], and
    moments E[T^k] for k <= 8, all by adaptive quadrature.
    """

    p: int
    kappa: float
    power: int
    _log_integral: float = field(repr=False)
    _modes: tuple[float, ...] = field(repr=False)

    def logpdf(self, t):
        return self.log_unnorm(t) - self._log_integral

    def log_unnorm(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):  # log 0 at t = +-1 is wanted
            return self.kappa * t**self.power + 0.5 * (self.p - 3) * np.log1p(-t * t)

    @property
    def modes(self) -> tuple[float, ...]:
        return self._modes

    @property
    def tilt_normalizer(self) -> float:
        """E under the null coordinate law of exp(kappa T^power)."""
        return math.exp(self._log_integral + log_coordinate_density_const(self.p))

    def moment(self, k: int) -> float:
        """E[T^k] with relative error <= 1e-10."""
        if not 0 <= k <= 8:
            raise DomainError(f"moments available for 0 <= k <= 8, got {k}")
        if k == 0:
            return 1.0
        if k % 2 == 1 and (self.power == 2 or self.kappa == 0.0):
            return 0.0  # symmetric density

        def g(t):
            return float(t**k * np.exp(self.logpdf(t)))

        pts = list(self._modes)
        val, _ = integrate.quad(
            g, -1.0, 1.0, points=pts, limit=500, epsabs=1e-15, epsrel=1e-12
        )
        return val

    def window(self, logdrop: float = 46.0) -> tuple[float, float]:
        """Interval outside which the density is below exp(-logdrop) x peak."""
        grid = np.linspace(-1.0 + 1e-12, 1.0 - 1e-12, 20001)
        lf = self.log_unnorm(grid)
        peak = lf.max()
        keep = np.nonzero(lf >= peak - logdrop)[0]
        lo = grid[max(keep[0] - 1, 0)]
        hi = grid[min(keep[-1] + 1, len(grid) - 1)]
        return float(lo), float(hi)


@lru_cache(maxsize=128)
def _marginal(p: int, kappa: float, power: int) -> CoordinateMarginal:
    if p < 3:
        raise DomainError(f"need p >= 3, got {p}")
    if kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    li = _log_norm_integral(kappa, power, p) if kappa != 0.0 else _log_norm_integral(0.0, 2, p)
    return CoordinateMarginal(p, kappa, power, li, _tilt_modes(kappa, power, p))


def fvml_marginal(kappa: float, p: int) -> CoordinateMarginal:
    """Marginal law of mu.X under FvML(kappa) on S^{p-1}."""
    return _marginal(p, float(kappa), 1)


def watson_marginal(kappa: float, p: int) -> CoordinateMarginal:
    """Marginal law of mu.X under Watson(kappa) on S^{p-1}."""
    return _marginal(p, float(kappa), 2)


def null_coordinate_marginal(p: int) -> CoordinateMarginal:
    """Marginal law of one coordinate of a uniform point on S^{p-1}."""
    return _marginal(p, 0.0, 2)
