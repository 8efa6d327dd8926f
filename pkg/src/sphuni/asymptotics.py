"""Deterministic distance evaluation, limiting shifted-bridge laws, and
the likelihood-ratio second-moment check."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .distributions import (
    fvml_log_normalizer,
    fvml_marginal,
    kolmogorov_quantile,
    log_coordinate_density_const,
    normal_pdf,
    normal_quantile,
    null_inner_cdf,
    watson_marginal,
)
from .errors import DomainError
from .samplers import (
    AlphaSpherical,
    CapMixture,
    Fvml,
    LowRank,
    ModelSpec,
    RngSeed,
    Uniform,
    Watson,
    sample,
)
from .statistics import sup_cdf_distance

FVML_SHIFT = "fvml"
QUADRATIC_SHIFT = "quadratic"


@dataclass(frozen=True)
class ShiftFunction:
    """Drift b(t) of the limiting shifted Brownian bridge.

    kind "fvml":       b(t) = tau^2/sqrt(2) phi(Phi^{-1}(t))
    kind "quadratic":  b(t) = tau/(2 sqrt(2)) Phi^{-1}(t) phi(Phi^{-1}(t))

    Both vanish at t = 0 and t = 1.
    """

    kind: str
    tau: float

    def __post_init__(self):
        if self.kind not in (FVML_SHIFT, QUADRATIC_SHIFT):
            raise DomainError(f"unknown shift kind {self.kind!r}")
        if self.tau < 0:
            raise DomainError("tau must be >= 0")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > 1):
            raise DomainError("t must lie in [0, 1]")
        out = np.zeros_like(t)
        inside = (t > 0) & (t < 1)
        u = normal_quantile(t[inside])
        if self.kind == FVML_SHIFT:
            out[inside] = self.tau**2 / math.sqrt(2.0) * normal_pdf(u)
        else:
            out[inside] = self.tau / (2.0 * math.sqrt(2.0)) * u * normal_pdf(u)
        return float(out) if out.ndim == 0 else out


def shift_value(shift: ShiftFunction, t):
    return shift.value(t)


# ---------------------------------------------------------------------------
# model CDF of sqrt(p) X.Y and the distance to uniformity


def _pair_nodes(marg, n_nodes: int = 96, panels: int = 4):
    """Gauss-Legendre nodes and normalized probability weights for the
    coordinate marginal, panels centered on its support window."""
    lo, hi = marg.window()
    edges = np.linspace(lo, hi, panels + 1)
    xg, wg = np.polynomial.legendre.leggauss(n_nodes // panels)
    t = np.concatenate([(b + a) / 2 + (b - a) / 2 * xg for a, b in zip(edges[:-1], edges[1:])])
    w = np.concatenate([(b - a) / 2 * wg for a, b in zip(edges[:-1], edges[1:])])
    lf = marg.log_unnorm(t)
    wt = w * np.exp(lf - lf.max())
    return t, wt / wt.sum()


@lru_cache(maxsize=32)
def _pair_grid(p: int, kappa: float, power: int, n_nodes: int = 96):
    marg = fvml_marginal(kappa, p) if power == 1 else watson_marginal(kappa, p)
    t, wt = _pair_nodes(marg, n_nodes=n_nodes)
    prod = np.multiply.outer(t, t).ravel()
    alpha = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    scale = np.multiply.outer(alpha, alpha).ravel()
    weight = np.multiply.outer(wt, wt).ravel()
    return prod, scale, weight


def model_inner_cdf(model: ModelSpec, u):
    """P_model(sqrt(p) X.Y <= u) for two i.i.d. draws from the model.

    FvML and Watson use the exact tangent decomposition
    X.Y = T T' + sqrt((1-T^2)(1-T'^2)) Xi with Xi following the null
    inner-product law one dimension down, integrated over (T, T') on a
    mode-centered Gauss-Legendre grid.  Low-rank is closed form.
    """
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    if isinstance(model, Uniform):
        out = null_inner_cdf(np.clip(u / math.sqrt(model.p), -1, 1), model.p)
    elif isinstance(model, LowRank):
        v = np.clip(u / math.sqrt(model.p), -1.0, 1.0)
        out = null_inner_cdf(v, model.k)
    elif isinstance(model, (Fvml, Watson)):
        power = 1 if isinstance(model, Fvml) else 2
        if model.kappa == 0.0:
            out = null_inner_cdf(np.clip(u / math.sqrt(model.p), -1, 1), model.p)
        else:
            out = _tilted_inner_cdf(u, model.p, model.kappa, power)
    else:
        raise DomainError(
            f"no quadrature route for {type(model).__name__}; use estimate_distance_mc"
        )
    out = np.asarray(out, dtype=float)
    return float(out[0]) if scalar else out


def _tilted_inner_cdf(u: np.ndarray, p: int, kappa: float, power: int) -> np.ndarray:
    prod, scale, weight = _pair_grid(p, float(kappa), power)
    rt_p = math.sqrt(p)
    out = np.empty(len(u))
    block = max(1, (1 << 22) // len(prod))
    for b0 in range(0, len(u), block):
        ub = u[b0 : b0 + block, None]
        arg = np.clip((ub / rt_p - prod[None, :]) / scale[None, :], -1.0, 1.0)
        out[b0 : b0 + block] = null_inner_cdf(arg, p - 1) @ weight
    return out


def _u_window(model: ModelSpec) -> tuple[float, float]:
    """Window outside which both CDFs are within 1e-12 of 0 or 1."""
    p = model.p
    # null: sqrt(p) X.Y is asymptotically N(0,1); 8 sigma covers 1e-12 tails
    lo, hi = -8.5, 8.5
    if isinstance(model, (Fvml, Watson)) and model.kappa > 0:
        marg = (
            fvml_marginal(model.kappa, p)
            if isinstance(model, Fvml)
            else watson_marginal(model.kappa, p)
        )
        wlo, whi = marg.window()
        m = max(abs(wlo), abs(whi))
        shift = math.sqrt(p) * m * m  # largest |T T'| contribution
        lo, hi = lo - shift, hi + shift
    return lo, hi


def distance_from_uniformity(
    model: ModelSpec, grid_size: int = 4096, tol: float = 1e-8
) -> float:
    """sup_u |P_model(sqrt(p) X.Y <= u) - P_uniform(sqrt(p) X.Y <= u)|.

    Evaluated on `grid_size` initial points over the union of the two
    effective supports, then refined around the running maximum until
    the improvement falls below `tol`.
    """
    if isinstance(model, (AlphaSpherical, CapMixture)):
        raise DomainError(
            f"{type(model).__name__} has no quadrature route; use estimate_distance_mc"
        )
    p = model.p

    def gap(u):
        return np.abs(
            np.asarray(model_inner_cdf(model, u))
            - null_inner_cdf(np.clip(u / math.sqrt(p), -1, 1), p)
        )

    lo, hi = _u_window(model)
    u = np.linspace(lo, hi, grid_size)
    g = gap(u)
    best_i = int(np.argmax(g))
    best, u_star = float(g[best_i]), float(u[best_i])
    h = (hi - lo) / (grid_size - 1)
    for _ in range(60):
        uu = np.linspace(u_star - h, u_star + h, 17)
        gg = gap(uu)
        j = int(np.argmax(gg))
        improved = float(gg[j]) - best
        if gg[j] > best:
            best, u_star = float(gg[j]), float(uu[j])
        h /= 4.0
        if improved < tol and h < 1e-6 * (hi - lo):
            break
    return best


def estimate_distance_mc(model: ModelSpec, pairs: int, seed) -> float:
    """Monte Carlo estimate of the distance: sup over jump points of
    |empirical CDF of `pairs` sampled inner products - null CDF|."""
    if pairs < 10**4:
        raise DomainError("need pairs >= 1e4")
    rng = seed.generator() if isinstance(seed, RngSeed) else RngSeed(int(seed)).generator()
    p = model.p
    vals = np.empty(pairs)
    block = max(1, min(pairs, (1 << 21) // p))
    for b0 in range(0, pairs, block):
        b1 = min(pairs, b0 + block)
        xs = sample(model, 2 * (b1 - b0), rng).data
        vals[b0:b1] = np.sum(xs[: b1 - b0] * xs[b1 - b0 :], axis=1)
    vals = np.sort(np.clip(vals, -1.0, 1.0))
    return sup_cdf_distance(vals, null_inner_cdf(vals, p))


# ---------------------------------------------------------------------------
# shifted Brownian bridge


@dataclass(frozen=True)
class BridgeSupLaw:
    """Empirical law of sup_t |B_t - b(t)| from seeded simulation."""

    sups: np.ndarray  # sorted
    grid_size: int
    reps: int

    def exceedance(self, c: float) -> float:
        """P(sup > c) under the simulated law."""
        return float(1.0 - np.searchsorted(self.sups, c, side="right") / len(self.sups))


def simulate_bridge_sup(
    shift: ShiftFunction | None,
    grid_size: int = 2048,
    reps: int = 20000,
    seed=0,
) -> BridgeSupLaw:
    """Simulate sup_t |B_t - b(t)| on a uniform grid.

    The bridge is sampled exactly at the grid points from its Gaussian
    increments conditioned to end at zero; the supremum is taken over
    the grid (its downward bias is Theta(1/sqrt(grid_size))).
    """
    if grid_size < 512:
        raise DomainError("grid_size must be >= 512")
    if reps < 10**3:
        raise DomainError("reps must be >= 1e3")
    rng = seed.generator() if isinstance(seed, RngSeed) else RngSeed(int(seed)).generator()
    t = np.arange(1, grid_size + 1) / grid_size
    b = shift.value(t) if shift is not None else np.zeros_like(t)
    sups = np.empty(reps)
    block = max(1, (1 << 22) // grid_size)
    for b0 in range(0, reps, block):
        b1 = min(reps, b0 + block)
        z = rng.standard_normal((b1 - b0, grid_size))
        w = np.cumsum(z, axis=1) / math.sqrt(grid_size)
        bridge = w - t[None, :] * w[:, -1][:, None]
        sups[b0:b1] = np.max(np.abs(bridge - b[None, :]), axis=1)
    sups.sort()
    return BridgeSupLaw(sups, grid_size, reps)


def predict_asymptotic_power(
    shift: ShiftFunction | None,
    alpha: float,
    reps: int = 20000,
    seed=0,
    grid_size: int = 2048,
) -> float:
    """P(sup_t |B_t - b(t)| >= c_alpha) by seeded simulation."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    law = simulate_bridge_sup(shift, grid_size=grid_size, reps=reps, seed=seed)
    c = kolmogorov_quantile(alpha)
    # >= c: searchsorted on the closed side
    return float(1.0 - np.searchsorted(law.sups, c, side="left") / len(law.sups))


# ---------------------------------------------------------------------------
# likelihood-ratio second moment (FvML, randomized location)


def fvml_llr_second_moment(n: int, p: int, kappa: float) -> float:
    """E L_n^2 for the location-mixed FvML likelihood ratio against
    uniformity, by 1-D quadrature over the null inner-product law.

    Uses E L^2 = E_U[ C_p(kappa)^{2n} / C_p(kappa sqrt(2(1+U)))^n ]
    with U the inner product of two uniform points, computed wholly in
    log space.  Raises on overflow (log integrand above 700).
    """
    if kappa < 0:
        raise DomainError("kappa must be >= 0")
    if kappa == 0.0:
        return 1.0
    lck = fvml_log_normalizer(kappa, p)
    lconst = log_coordinate_density_const(p)

    def log_integrand(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        lcs = np.array(
            [fvml_log_normalizer(kappa * math.sqrt(2.0 * (1.0 + uu)), p) for uu in u]
        )
        return n * (2.0 * lck - lcs) + lconst + 0.5 * (p - 3) * np.log1p(-u * u)

    # probe for the peak; the tilt pushes the mode to positive u of
    # order 1/sqrt(p)
    grid = np.linspace(-1.0 + 1e-9, 1.0 - 1e-9, 2049)
    lg = log_integrand(grid)
    if np.max(lg) > 700.0:
        raise DomainError("log integrand exceeds 700; signal too strong for this check")
    peak = float(grid[int(np.argmax(lg))])
    shift = float(np.max(lg))

    def g(u):
        lc = fvml_log_normalizer(kappa * math.sqrt(2.0 * (1.0 + u)), p)
        logdens = lconst + 0.5 * (p - 3) * math.log1p(-u * u) if abs(u) < 1.0 else -math.inf
        return math.exp(n * (2.0 * lck - lc) + logdens - shift)

    val, _ = integrate.quad(
        g, -1.0, 1.0, points=[peak], limit=400, epsabs=1e-13, epsrel=1e-9
    )
    return math.exp(shift + math.log(val))


# ---------------------------------------------------------------------------
# closed-form competitor power under the low-rank alternative


def competitor_low_rank_power(method: str, n: int, p: int, k: int, alpha: float) -> float:
    """Asymptotic power prediction for a classical test against the
    low-rank uniform alternative with tau = n (1 - k/p)."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if not 2 <= k <= p:
        raise DomainError(f"need 2 <= k <= p, got k={k}")
    tau = n * (1.0 - k / p)
    z = float(normal_quantile(1.0 - alpha))
    if method == "bingham":
        return float(1.0 - special.ndtr(z - tau / 2.0))
    if method == "rayleigh2sided":
        # sqrt(p/k) R_n -> N(0,1); the two-sided level-alpha test keeps
        # asymptotic power alpha at fixed k/p -> 1
        z2 = float(normal_quantile(1.0 - alpha / 2.0))
        s = math.sqrt(k / p)
        return float(1.0 - special.ndtr(z2 / s) + special.ndtr(-z2 / s))
    if method == "packing":
        # (p/k) P_n - (1-k/p)(4 log n - log log n) converges to the same
        # Gumbel family as the null limit of P_n (k = p recovers level alpha)
        from .distributions import packing_gumbel_cdf, packing_gumbel_quantile

        drift = (1.0 - k / p) * (4.0 * math.log(n) - math.log(math.log(n)))
        crit = packing_gumbel_quantile(alpha)
        return float(1.0 - packing_gumbel_cdf((p / k) * crit - drift))
    raise DomainError(f"unknown method {method!r}")
