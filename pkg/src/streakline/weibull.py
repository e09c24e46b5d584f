"""Translated three-parameter Weibull, its integer discretization, and a
least-squares fit of the discretized pmf to observed run frequencies.

    f(x) = (shape/scale) * z**(shape-1) * exp(-z**shape),  z = (x - location)/scale

for x >= location, and 0 below. The discrete model assigns
P(r) = F(r+1) - F(r) to r runs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

log = logging.getLogger(__name__)

MAX_RUNS = 30


class InvalidParamsError(ValueError):
    pass


class NegativeRunsError(ValueError):
    pass


@dataclass(frozen=True)
class WeibullParams:
    scale: float
    location: float
    shape: float

    def __post_init__(self):
        for name in ("scale", "location", "shape"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParamsError(f"{name} must be finite")
        if self.scale <= 0:
            raise InvalidParamsError(f"scale must be positive, got {self.scale}")
        if self.shape <= 0:
            raise InvalidParamsError(f"shape must be positive, got {self.shape}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "WeibullParams":
        return cls(float(d["scale"]), float(d["location"]), float(d["shape"]))


def _check(p) -> WeibullParams:
    if not isinstance(p, WeibullParams):
        raise InvalidParamsError(f"expected WeibullParams, got {type(p).__name__}")
    return p


def pdf(x, p: WeibullParams):
    _check(p)
    x = np.asarray(x, dtype=float)
    z = np.clip((x - p.location) / p.scale, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = (p.shape / p.scale) * z ** (p.shape - 1) * np.exp(-(z**p.shape))
    val = np.where(x >= p.location, val, 0.0)
    # z == 0 with shape < 1 is a pole; report it as inf rather than nan
    val = np.nan_to_num(val, nan=0.0, posinf=np.inf)
    return val if val.ndim else float(val)


def cdf(x, p: WeibullParams):
    _check(p)
    x = np.asarray(x, dtype=float)
    z = np.clip((x - p.location) / p.scale, 0.0, None)
    with np.errstate(over="ignore"):
        val = -np.expm1(-(z**p.shape))
    val = np.where(x > p.location, val, 0.0)
    return val if val.ndim else float(val)


def discrete_pmf(r, p: WeibullParams):
    r = np.asarray(r)
    if np.any(r < 0):
        raise NegativeRunsError("run count must be non-negative")
    # F(r+1) - F(r) computed as a difference of survival terms keeps tail precision
    _check(p)
    lo = np.clip((r - p.location) / p.scale, 0.0, None)
    hi = np.clip((r + 1 - p.location) / p.scale, 0.0, None)
    with np.errstate(over="ignore"):
        val = np.exp(-(lo**p.shape)) - np.exp(-(hi**p.shape))
    val = np.clip(val, 0.0, None)
    return val if val.ndim else float(val)


def pmf_vector(p: WeibullParams, max_runs: int = MAX_RUNS) -> np.ndarray:
    """P(0..max_runs) without renormalization."""
    return discrete_pmf(np.arange(max_runs + 1), p)


def truncated_pmf(p: WeibullParams, lo: int = 0, hi: int = MAX_RUNS) -> np.ndarray:
    """Discretized pmf restricted to lo..hi and renormalized there.

    Returned array is indexed 0..hi with zeros below ``lo``.
    """
    out = np.zeros(hi + 1)
    out[lo:] = discrete_pmf(np.arange(lo, hi + 1), p)
    total = out.sum()
    if total <= 0:
        # all mass outside the window: put it on the nearest end
        out[lo if p.location < lo else hi] = 1.0
        return out
    return out / total


@dataclass(frozen=True)
class EmpiricalRunPmf:
    """Observed frequencies of 0..30 runs.

    Frequencies built from observed games sum to one. ``from_counts`` with an
    explicit ``total`` larger than the counted games gives a sub-normalized
    vector, used when draws outside 0..30 belong to the denominator.
    """

    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (MAX_RUNS + 1,):
            raise ValueError(f"expected {MAX_RUNS + 1} entries, got {probs.shape}")
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValueError("frequencies must lie in [0, 1]")
        if probs.sum() > 1 + 1e-9:
            raise ValueError(f"frequencies sum to {probs.sum()} > 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def is_normalized(self) -> bool:
        return abs(self.probs.sum() - 1.0) <= 1e-9

    @classmethod
    def from_runs(cls, runs) -> "EmpiricalRunPmf":
        runs = np.asarray(runs, dtype=np.int64)
        if runs.size == 0:
            raise ValueError("no run values")
        if np.any(runs < 0):
            raise NegativeRunsError("run count must be non-negative")
        over = int((runs > MAX_RUNS).sum())
        if over:
            log.warning("folding %d game(s) above %d runs into %d", over, MAX_RUNS, MAX_RUNS)
        counts = np.bincount(np.minimum(runs, MAX_RUNS), minlength=MAX_RUNS + 1)
        return cls(counts / runs.size)

    @classmethod
    def from_counts(cls, counts, total: float | None = None) -> "EmpiricalRunPmf":
        counts = np.asarray(counts, dtype=float)
        if total is None:
            total = counts.sum()
        if total <= 0:
            raise ValueError("total count must be positive")
        return cls(counts / total)

    def mean(self) -> float:
        r = np.arange(MAX_RUNS + 1)
        return float((r * self.probs).sum() / self.probs.sum())

    def std(self) -> float:
        r = np.arange(MAX_RUNS + 1)
        w = self.probs / self.probs.sum()
        m = (r * w).sum()
        return float(np.sqrt(((r - m) ** 2 * w).sum()))


def objective(p: WeibullParams, emp: EmpiricalRunPmf) -> float:
    """Sum of squared gaps between model and observed frequencies over 0..30."""
    diff = pmf_vector(_check(p)) - emp.probs
    return float(diff @ diff)


@dataclass(frozen=True)
class FitOptions:
    tol: float = 1e-10
    # objective spread across the simplex; tol**2 would sit below float precision
    ftol: float = 1e-16
    max_evals: int = 10_000
    restarts: int = 5
    perturbation: float = 0.25
    seed: int = 20190610


@dataclass(frozen=True)
class FitResult:
    params: WeibullParams
    objective: float
    converged: bool
    evaluations: int

    def __iter__(self):
        # unpacks as (params, objective)
        return iter((self.params, self.objective))

    def to_dict(self) -> dict:
        return {**self.params.to_dict(), "objective": self.objective}


def default_init(emp: EmpiricalRunPmf) -> WeibullParams:
    return WeibullParams(scale=max(emp.std(), 0.5), location=-0.5, shape=1.7)


def _to_theta(p: WeibullParams) -> np.ndarray:
    return np.array([math.log(p.scale), p.location, math.log(p.shape)])


def _from_theta(theta) -> WeibullParams:
    return WeibullParams(math.exp(theta[0]), float(theta[1]), math.exp(theta[2]))


def _theta_objective(theta: np.ndarray, target: np.ndarray) -> float:
    if not np.all(np.isfinite(theta)) or abs(theta[0]) > 50 or abs(theta[2]) > 50:
        return math.inf
    scale, loc, shape = math.exp(theta[0]), theta[1], math.exp(theta[2])
    r = np.arange(MAX_RUNS + 2)
    z = np.clip((r - loc) / scale, 0.0, None)
    with np.errstate(over="ignore", invalid="ignore"):
        surv = np.exp(-(z**shape))
    diff = (surv[:-1] - surv[1:]) - target
    val = float(diff @ diff)
    return val if math.isfinite(val) else math.inf


def fit(emp: EmpiricalRunPmf, init: WeibullParams | None = None, opts: FitOptions = FitOptions()) -> FitResult:
    """Least-squares fit of the discretized Weibull to ``emp``.

    Nelder-Mead over (log scale, location, log shape), started from ``init``
    and from ``opts.restarts - 1`` jittered copies of it, then polished from
    the best vertex. Never returns something worse than ``init``.
    """
    if init is None:
        init = default_init(emp)
    _check(init)
    target = np.asarray(emp.probs, dtype=float)
    rng = np.random.default_rng(opts.seed)

    theta0 = _to_theta(init)
    starts = [theta0]
    for _ in range(max(opts.restarts, 1) - 1):
        starts.append(theta0 + rng.normal(scale=opts.perturbation, size=3))

    best_theta, best_val = theta0, _theta_objective(theta0, target)
    evaluations = 1
    converged = False

    def run(x0):
        res = minimize(
            _theta_objective, x0, args=(target,), method="Nelder-Mead",
            options={"xatol": opts.tol, "fatol": opts.ftol, "maxfev": opts.max_evals,
                     "adaptive": False},
        )
        return res

    for x0 in starts:
        res = run(x0)
        evaluations += res.nfev
        converged |= bool(res.success)
        if res.fun < best_val:
            best_theta, best_val = res.x, float(res.fun)

    # restart from the best point with a fresh simplex
    res = run(best_theta)
    evaluations += res.nfev
    if res.fun <= best_val:
        best_theta, best_val = res.x, float(res.fun)
        converged |= bool(res.success)

    if not converged:
        log.warning("Weibull fit did not converge in any restart; returning best so far")
    params = _from_theta(best_theta)
    return FitResult(params, objective(params, emp), converged, evaluations)
