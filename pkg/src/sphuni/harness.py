"""Seeded Monte Carlo experiment engine: size, null-law checks, power
curves, non-local experiments, and CSV/JSON persistence."""

from __future__ import annotations

import hashlib
import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .distributions import (
    kolmogorov_cdf,
    kolmogorov_quantile,
    normal_quantile,
    null_inner_cdf,
    packing_gumbel_quantile,
)
from .errors import ConfigError, InRegimeError, ParseError
from .points import UnitPointSet, pairwise_inner_products
from .samplers import AlphaSpherical, CapMixture, Fvml, LowRank, Uniform, Watson, sample
from .statistics import (
    BINGHAM,
    METHODS,
    PACKING,
    PROJECTION,
    RAYLEIGH,
    SUP_DISTANCE,
    statistic_projection,
    sup_cdf_distance,
)
from .samplers import sample_uniform_direction

_FAMILIES = ("uniform", "fvml", "watson", "lowrank", "alphaspherical", "capmixture")
_FAMILY_ID = {name: i for i, name in enumerate(_FAMILIES)}
_POWER_FAMILIES = ("uniform", "fvml", "watson", "lowrank")


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    p: int
    alpha: float
    reps: int
    model_family: str
    signal_grid: tuple[float, ...]
    methods: tuple[str, ...]
    seed: int
    tails: dict | None = None
    calibration: str = "asymptotic"
    output_path: str | None = None

    def __post_init__(self):
        if self.n < 2 or self.p < 2:
            raise ConfigError(f"field n/p: need n >= 2 and p >= 2, got ({self.n}, {self.p})")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"field alpha: must be in (0, 1), got {self.alpha}")
        if self.reps < 100:
            raise ConfigError(f"field reps: need >= 100, got {self.reps}")
        if self.model_family not in _FAMILIES:
            raise ConfigError(f"field model_family: unknown family {self.model_family!r}")
        grid = tuple(float(t) for t in self.signal_grid)
        if not grid:
            raise ConfigError("field signal_grid: must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("field signal_grid: must be strictly increasing")
        object.__setattr__(self, "signal_grid", grid)
        methods = tuple(self.methods)
        if not methods or any(m not in METHODS for m in methods):
            raise ConfigError(f"field methods: must be a nonempty subset of {METHODS}")
        object.__setattr__(self, "methods", methods)
        if self.calibration not in ("asymptotic", "monte-carlo"):
            raise ConfigError(f"field calibration: got {self.calibration!r}")
        # mapped parameters must be in-regime for every grid point
        if self.model_family in _POWER_FAMILIES:
            for tau in grid:
                signal_model(self.model_family, self.n, self.p, tau)

    def tail_for(self, method: str) -> str:
        if self.tails and method in self.tails:
            return self.tails[method]
        return "upper"

    def to_json(self) -> str:
        d = {
            "n": self.n,
            "p": self.p,
            "alpha": self.alpha,
            "reps": self.reps,
            "model_family": self.model_family,
            "signal_grid": list(self.signal_grid),
            "methods": list(self.methods),
            "seed": self.seed,
            "tails": self.tails,
            "calibration": self.calibration,
            "output_path": self.output_path,
        }
        return json.dumps(d, indent=2, sort_keys=True)

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


_CONFIG_FIELDS = {
    "n": int,
    "p": int,
    "alpha": float,
    "reps": int,
    "model_family": str,
    "signal_grid": list,
    "methods": list,
    "seed": int,
    "tails": (dict, type(None)),
    "calibration": str,
    "output_path": (str, type(None)),
}
_REQUIRED_FIELDS = ("n", "p", "alpha", "reps", "model_family", "signal_grid", "methods", "seed")


def load_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig from JSON, naming the offending field on error."""
    with open(path) as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno} col {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be an object")
    for key in _REQUIRED_FIELDS:
        if key not in raw:
            raise ParseError(f"{path}: missing field {key!r}")
    for key, val in raw.items():
        want = _CONFIG_FIELDS.get(key)
        if want is None:
            raise ParseError(f"{path}: unknown field {key!r}")
        if not isinstance(val, want if isinstance(want, tuple) else (want,)):
            raise ParseError(f"{path}: field {key!r} has wrong type {type(val).__name__}")
    kwargs = {k: raw[k] for k in raw}
    kwargs["signal_grid"] = tuple(float(x) for x in raw["signal_grid"])
    kwargs["methods"] = tuple(raw["methods"])
    return ExperimentConfig(**kwargs)


def signal_model(family: str, n: int, p: int, tau: float):
    """Map a signal value tau to a concrete model of the family.

    fvml:    kappa = tau p^{3/4} / sqrt(n)
    watson:  kappa = p^{3/2} sqrt(tau) / (2 (sqrt(n) + sqrt(tau p)))
    lowrank: k = round(p (1 - tau/n))
    """
    if tau < 0:
        raise ConfigError(f"field signal_grid: tau must be >= 0, got {tau}")
    if family == "uniform":
        return Uniform(p)
    if family == "fvml":
        kappa = tau * p**0.75 / math.sqrt(n)
        return Fvml(p, kappa) if kappa > 0 else Uniform(p)
    if family == "watson":
        if tau == 0:
            return Uniform(p)
        kappa = p**1.5 * math.sqrt(tau) / (2.0 * (math.sqrt(n) + math.sqrt(tau * p)))
        if kappa >= p / 2.0:
            raise InRegimeError(f"watson kappa={kappa:.2f} >= p/2 at tau={tau}")
        if p < 5.0 * n ** (2.0 / 3.0):
            warnings.warn(
                f"watson regime is marginal at n={n}, p={p}; local-limit "
                "approximations may be loose",
                stacklevel=2,
            )
        return Watson(p, kappa)
    if family == "lowrank":
        k = int(round(p * (1.0 - tau / n)))
        if tau > 0 and k >= p:
            k = p - 1
        if k < 2:
            raise InRegimeError(f"lowrank k={k} < 2 at tau={tau}")
        return LowRank(p, min(k, p))
    raise ConfigError(f"family {family!r} has no signal map; use run_nonlocal_experiment")


# ---------------------------------------------------------------------------
# per-replication statistics


def _rep_statistics(smp: UnitPointSet, methods, rng) -> dict[str, float]:
    ip = pairwise_inner_products(smp)
    v = ip.values
    n, p = smp.n, smp.p
    out: dict[str, float] = {}
    for meth in methods:
        if meth == SUP_DISTANCE:
            f = null_inner_cdf(v, p)
            out[meth] = sup_cdf_distance(v, f)
        elif meth == RAYLEIGH:
            out[meth] = math.sqrt(2.0 * p) / n * float(np.sum(v))
        elif meth == BINGHAM:
            out[meth] = p / n * float(np.sum(v * v) - len(v) / p)
        elif meth == PACKING:
            out[meth] = float(p * np.max(v * v) - 4.0 * math.log(n) + math.log(math.log(n)))
        elif meth == PROJECTION:
            out[meth] = statistic_projection(smp, sample_uniform_direction(p, rng))
    return out


def _critical_values(
    n: int,
    p: int,
    alpha: float,
    methods,
    tails: dict | None = None,
    calibration: str = "asymptotic",
    seed: int = 0,
    mc_reps: int = 2000,
) -> dict[str, float]:
    """Per-method rejection thresholds on the raw-statistic scale."""
    crit: dict[str, float] = {}
    tails = tails or {}
    if calibration == "monte-carlo":
        from .statistics import calibrate_critical_value_mc

        for meth in methods:
            crit[meth] = calibrate_critical_value_mc(
                n, p, meth, alpha, max(1000, mc_reps), _calibration_seed(seed)
            )
        return crit
    for meth in methods:
        tail = tails.get(meth, "upper")
        if meth == SUP_DISTANCE:
            crit[meth] = math.sqrt(2.0) * kolmogorov_quantile(alpha) / math.sqrt(n * (n - 1.0))
        elif meth == PROJECTION:
            crit[meth] = kolmogorov_quantile(alpha) / math.sqrt(n)
        elif meth in (RAYLEIGH, BINGHAM):
            q = 1.0 - alpha / 2.0 if tail == "two-sided" else 1.0 - alpha
            crit[meth] = float(normal_quantile(q))
        elif meth == PACKING:
            crit[meth] = packing_gumbel_quantile(alpha)
    return crit


def _reject(meth: str, stat: float, crit: float, tail: str) -> bool:
    if tail == "two-sided" and meth in (RAYLEIGH, BINGHAM, PACKING):
        return abs(stat) >= crit
    return stat >= crit


def _calibration_seed(master: int) -> int:
    return int.from_bytes(hashlib.sha256(f"calib:{master}".encode()).digest()[:6], "big")


def _cell_rng(master: int, family: str, tau_idx: int, rep: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(master, spawn_key=(_FAMILY_ID[family], tau_idx, rep))
    )


def _pmap(fn, items, threads: int):
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class PowerCell:
    family: str
    tau: float
    method: str
    rate: float
    se: float
    reps: int


@dataclass(frozen=True)
class PowerCurve:
    cells: tuple[PowerCell, ...]
    seed: int
    config_hash: str
    wall_clock: float = field(compare=False, default=0.0)

    def rate(self, tau: float, method: str) -> float:
        for c in self.cells:
            if c.method == method and math.isclose(c.tau, tau):
                return c.rate
        raise KeyError((tau, method))

    def csv_rows(self):
        for c in self.cells:
            yield f"{c.family},{c.tau:.10g},{c.method},{c.rate:.10g},{c.se:.10g},{c.reps},{self.seed}"

    @staticmethod
    def csv_header() -> str:
        return "family,tau,method,rate,se,reps,seed"


def export_csv(result, path) -> None:
    """Write a result (anything with csv_rows/csv_header) as CSV."""
    lines = [result.csv_header()]
    lines.extend(result.csv_rows())
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# experiments


def run_power_curve(cfg: ExperimentConfig, threads: int = 1) -> PowerCurve:
    """Rejection rate per (tau, method) over cfg.reps fresh samples each."""
    if cfg.model_family not in _POWER_FAMILIES:
        raise ConfigError(
            f"field model_family: power curves support {_POWER_FAMILIES}, "
            f"got {cfg.model_family!r}"
        )
    t0 = time.monotonic()
    crit = _critical_values(
        cfg.n, cfg.p, cfg.alpha, cfg.methods, cfg.tails, cfg.calibration,
        cfg.seed, cfg.reps,
    )
    cells = []
    for tau_idx, tau in enumerate(cfg.signal_grid):
        model = signal_model(cfg.model_family, cfg.n, cfg.p, tau)

        def one_rep(rep, _model=model, _ti=tau_idx):
            rng = _cell_rng(cfg.seed, cfg.model_family, _ti, rep)
            smp = sample(_model, cfg.n, rng)
            return _rep_statistics(smp, cfg.methods, rng)

        stats = _pmap(one_rep, range(cfg.reps), threads)
        for meth in cfg.methods:
            tail = cfg.tail_for(meth)
            hits = sum(_reject(meth, s[meth], crit[meth], tail) for s in stats)
            rate = hits / cfg.reps
            se = math.sqrt(rate * (1.0 - rate) / cfg.reps)
            cells.append(PowerCell(cfg.model_family, tau, meth, rate, se, cfg.reps))
    curve = PowerCurve(tuple(cells), cfg.seed, cfg.config_hash(), time.monotonic() - t0)
    if cfg.output_path:
        export_csv(curve, cfg.output_path)
    return curve


def run_size_experiment(cfg: ExperimentConfig, threads: int = 1) -> PowerCurve:
    """Null rejection rates: the power curve of the uniform model at tau=0."""
    null_cfg = ExperimentConfig(
        n=cfg.n,
        p=cfg.p,
        alpha=cfg.alpha,
        reps=cfg.reps,
        model_family="uniform",
        signal_grid=(0.0,),
        methods=cfg.methods,
        seed=cfg.seed,
        tails=cfg.tails,
        calibration=cfg.calibration,
        output_path=cfg.output_path,
    )
    return run_power_curve(null_cfg, threads=threads)


def run_null_distribution_check(n: int, p: int, reps: int, seed, threads: int = 1) -> float:
    """KS distance between the law of the standardized sup statistic over
    `reps` null replications and its Brownian-bridge limit."""
    if reps < 100:
        raise ConfigError(f"field reps: need >= 100, got {reps}")
    master = int(seed)
    scale = math.sqrt(n * (n - 1) / 2.0)

    def one_rep(rep):
        rng = _cell_rng(master, "uniform", 0, rep)
        smp = sample(Uniform(p), n, rng)
        ip = pairwise_inner_products(smp)
        return scale * sup_cdf_distance(ip.values, null_inner_cdf(ip.values, p))

    vals = np.sort(np.asarray(_pmap(one_rep, range(reps), threads)))
    return sup_cdf_distance(vals, kolmogorov_cdf(vals))


@dataclass(frozen=True)
class NonlocalResult:
    kind: str
    n: int
    p: int
    alpha: float
    reps: int
    seed: int
    rates: dict[str, float]
    mean_rayleigh: float
    mean_abs_rayleigh: float
    se_abs_rayleigh: float
    share_bingham_negative: float
    share_packing_below_alpha_quantile: float

    def csv_rows(self):
        for meth, rate in self.rates.items():
            se = math.sqrt(rate * (1.0 - rate) / self.reps)
            yield f"{self.kind},0,{meth},{rate:.10g},{se:.10g},{self.reps},{self.seed}"

    @staticmethod
    def csv_header() -> str:
        return "family,tau,method,rate,se,reps,seed"


def run_nonlocal_experiment(
    kind: str,
    n: int,
    p: int,
    alpha: float,
    reps: int,
    seed,
    model_param: float | None = None,
    threads: int = 1,
) -> NonlocalResult:
    """All four tests against a non-local alternative, plus diagnostics.

    kind "capmixture" requires p >= 2 n^2 (the regime where the cap
    construction defeats the moment-based tests); `model_param` is the
    cap width (default 1/(4p)).  kind "alphaspherical" takes the tail
    index as `model_param` (default 1.0).
    """
    if kind == "capmixture":
        if p < 2 * n * n:
            raise ConfigError(f"capmixture needs p >= 2 n^2, got n={n}, p={p}")
        model = CapMixture(p, model_param)
    elif kind == "alphaspherical":
        model = AlphaSpherical(p, 1.0 if model_param is None else model_param)
    else:
        raise ConfigError(f"unknown nonlocal kind {kind!r}")
    master = int(seed)
    methods = (SUP_DISTANCE, RAYLEIGH, BINGHAM, PACKING)
    crit = _critical_values(n, p, alpha, methods)
    fam = "capmixture" if kind == "capmixture" else "alphaspherical"

    def one_rep(rep):
        rng = _cell_rng(master, fam, 0, rep)
        smp = sample(model, n, rng)
        return _rep_statistics(smp, methods, rng)

    stats = _pmap(one_rep, range(reps), threads)
    rates = {
        meth: sum(s[meth] >= crit[meth] for s in stats) / reps for meth in methods
    }
    r_vals = np.array([s[RAYLEIGH] for s in stats])
    b_vals = np.array([s[BINGHAM] for s in stats])
    p_vals = np.array([s[PACKING] for s in stats])
    packing_low = packing_gumbel_quantile(1.0 - alpha)  # lower alpha-quantile
    return NonlocalResult(
        kind=kind,
        n=n,
        p=p,
        alpha=alpha,
        reps=reps,
        seed=master,
        rates=rates,
        mean_rayleigh=float(np.mean(r_vals)),
        mean_abs_rayleigh=float(np.mean(np.abs(r_vals))),
        se_abs_rayleigh=float(np.std(np.abs(r_vals), ddof=1) / math.sqrt(reps)),
        share_bingham_negative=float(np.mean(b_vals < 0)),
        share_packing_below_alpha_quantile=float(np.mean(p_vals < packing_low)),
    )
