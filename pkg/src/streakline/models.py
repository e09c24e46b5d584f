"""Score generators for simulated games.

Two models share one interface (``sample(rng, size)``, ``pmf_table()``):

* ``SimpleWeibullModel`` draws home and away runs independently from
  truncated discretized Weibulls and redraws the whole pair on a tie.
* ``BivariateScoreModel`` draws a run difference k = home - away from
  per-diagonal weights, then the away score from that diagonal's pmf.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .core import GameRecord
from .weibull import (
    MAX_RUNS,
    EmpiricalRunPmf,
    FitOptions,
    WeibullParams,
    fit,
    truncated_pmf,
)

log = logging.getLogger(__name__)

REJECTION_LIMIT = 10**6
STRUCTURAL_DIAGONALS = 58


class RejectionLimitError(RuntimeError):
    pass


class TieQueryError(ValueError):
    pass


def _inverse_cdf(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    # scaling by the last entry keeps rounding slack off zero-mass tail cells
    return np.searchsorted(cdf, u * cdf[-1], side="right")


@dataclass(frozen=True)
class SimpleWeibullModel:
    home: WeibullParams
    away: WeibullParams
    max_runs: int = MAX_RUNS

    def __post_init__(self):
        p_home = truncated_pmf(self.home, 0, self.max_runs)
        p_away = truncated_pmf(self.away, 0, self.max_runs)
        object.__setattr__(self, "_p_home", p_home)
        object.__setattr__(self, "_p_away", p_away)
        object.__setattr__(self, "_c_home", np.cumsum(p_home))
        object.__setattr__(self, "_c_away", np.cumsum(p_away))

    @property
    def home_pmf(self) -> np.ndarray:
        return self._p_home

    @property
    def away_pmf(self) -> np.ndarray:
        return self._p_away

    def tie_probability(self) -> float:
        return float(self._p_home @ self._p_away)

    def pmf_table(self) -> np.ndarray:
        """Exact joint pmf, indexed [home_runs, away_runs]."""
        table = np.outer(self._p_home, self._p_away)
        np.fill_diagonal(table, 0.0)
        return table / (1.0 - self.tie_probability())

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        if self.tie_probability() >= 1.0:
            raise RejectionLimitError("every draw is a tie")
        home = _inverse_cdf(self._c_home, rng.random(size))
        away = _inverse_cdf(self._c_away, rng.random(size))
        ties = np.flatnonzero(home == away)
        attempts = 0
        while ties.size:
            attempts += 1
            if attempts >= REJECTION_LIMIT:
                raise RejectionLimitError(f"{REJECTION_LIMIT} consecutive tied draws")
            home[ties] = _inverse_cdf(self._c_home, rng.random(ties.size))
            away[ties] = _inverse_cdf(self._c_away, rng.random(ties.size))
            ties = ties[home[ties] == away[ties]]
        return home, away

    def to_dict(self) -> dict:
        return {"kind": "simple", "max_runs": self.max_runs,
                "home": self.home.to_dict(), "away": self.away.to_dict()}


@dataclass(frozen=True)
class Diagonal:
    """One run-difference diagonal: weight plus away-score distribution."""

    k: int
    weight: float
    params: WeibullParams | None = None
    empirical_pmf: tuple[float, ...] | None = None
    count: int = 0
    objective: float | None = None

    def __post_init__(self):
        if self.k == 0:
            raise ValueError("diagonal k=0 would produce ties")
        if (self.params is None) == (self.empirical_pmf is None):
            raise ValueError("a diagonal needs exactly one of params / empirical_pmf")
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError(f"weight {self.weight} outside [0, 1]")

    def away_range(self, max_runs: int) -> tuple[int, int]:
        return max(0, -self.k), min(max_runs, max_runs - self.k)

    def away_pmf(self, max_runs: int) -> np.ndarray:
        """Away-score pmf on this diagonal, zero outside the valid range."""
        lo, hi = self.away_range(max_runs)
        if self.params is not None:
            return truncated_pmf(self.params, lo, hi)
        emp = np.zeros(hi + 1)
        src = np.asarray(self.empirical_pmf, dtype=float)
        n = min(len(src), hi + 1)
        emp[lo:n] = src[lo:n]
        if emp.sum() <= 0:
            raise ValueError(f"diagonal {self.k} has no mass in its valid range")
        return emp / emp.sum()

    def to_dict(self) -> dict:
        d = {"k": self.k, "weight": self.weight, "count": self.count}
        if self.params is not None:
            d["params"] = self.params.to_dict()
            d["objective"] = self.objective
        else:
            d["empirical_pmf"] = list(self.empirical_pmf)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Diagonal":
        params = WeibullParams.from_dict(d["params"]) if d.get("params") else None
        emp = tuple(float(x) for x in d["empirical_pmf"]) if d.get("empirical_pmf") else None
        return cls(int(d["k"]), float(d["weight"]), params, emp,
                   int(d.get("count", 0)), d.get("objective"))


@dataclass(frozen=True)
class BivariateScoreModel:
    diagonals: tuple[Diagonal, ...]
    max_runs: int = MAX_RUNS
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        diags = tuple(sorted(self.diagonals, key=lambda d: d.k))
        object.__setattr__(self, "diagonals", diags)
        if not diags:
            raise ValueError("model has no diagonals")
        if len(diags) > STRUCTURAL_DIAGONALS:
            raise ValueError(f"at most {STRUCTURAL_DIAGONALS} diagonals")
        ks = [d.k for d in diags]
        if len(set(ks)) != len(ks):
            raise ValueError("duplicate diagonal")
        if any(abs(k) >= self.max_runs for k in ks):
            raise ValueError("diagonal outside the score grid")
        weights = np.array([d.weight for d in diags])
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"diagonal weights sum to {weights.sum()}")
        n = self.max_runs + 1
        cond = np.zeros((len(diags), n))
        for i, d in enumerate(diags):
            p = d.away_pmf(self.max_runs)
            cond[i, : len(p)] = p
        object.__setattr__(self, "_k", np.array(ks))
        weights = weights / weights.sum()
        object.__setattr__(self, "_w", weights)
        object.__setattr__(self, "_wcdf", np.cumsum(weights))
        object.__setattr__(self, "_cond", cond)
        object.__setattr__(self, "_ccdf", np.cumsum(cond, axis=1))

    def weight(self, k: int) -> float:
        for d in self.diagonals:
            if d.k == k:
                return d.weight
        return 0.0

    def pmf_table(self) -> np.ndarray:
        n = self.max_runs + 1
        table = np.zeros((n, n))
        a = np.arange(n)
        for k, w, cond in zip(self._k, self._w, self._cond):
            ok = (a + k >= 0) & (a + k < n)
            table[a[ok] + k, a[ok]] += w * cond[ok]
        return table

    def sample(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        di = _inverse_cdf(self._wcdf, rng.random(size))
        u = rng.random(size)
        rows = self._ccdf[di]
        away = (rows <= (u * rows[:, -1])[:, None]).sum(axis=1)
        home = away + self._k[di]
        return home, away

    def to_dict(self) -> dict:
        return {"kind": "bivariate", "max_runs": self.max_runs,
                "diagonals": [d.to_dict() for d in self.diagonals],
                "diagnostics": self.diagnostics}


def sample_simple(m: SimpleWeibullModel, rng: np.random.Generator) -> tuple[int, int]:
    """One (home, away) draw; the whole pair is redrawn after a tie."""
    if m.tie_probability() >= 1.0:
        raise RejectionLimitError("every draw is a tie")
    for _ in range(REJECTION_LIMIT):
        h = int(_inverse_cdf(m._c_home, rng.random()))
        a = int(_inverse_cdf(m._c_away, rng.random()))
        if h != a:
            return h, a
    raise RejectionLimitError(f"{REJECTION_LIMIT} consecutive tied draws")


def sample_bivariate(m: BivariateScoreModel, rng: np.random.Generator) -> tuple[int, int]:
    h, a = m.sample(rng, 1)
    return int(h[0]), int(a[0])


def model_pmf(m, h: int, a: int) -> float:
    if h == a:
        raise TieQueryError("ties have probability zero by construction")
    if not (0 <= h <= m.max_runs and 0 <= a <= m.max_runs):
        raise ValueError(f"score ({h}, {a}) outside 0..{m.max_runs}")
    return float(m.pmf_table()[h, a])


def fit_simple(games: Iterable[GameRecord], max_runs: int = MAX_RUNS,
               opts: FitOptions = FitOptions()) -> tuple[SimpleWeibullModel, dict]:
    """Fit home and away Weibulls; returns the model and per-side objectives."""
    games = list(games)
    if not games:
        raise ValueError("no games to fit")
    home = fit(EmpiricalRunPmf.from_runs([g.home_runs for g in games]), opts=opts)
    away = fit(EmpiricalRunPmf.from_runs([g.away_runs for g in games]), opts=opts)
    info = {"home_objective": home.objective, "away_objective": away.objective,
            "converged": home.converged and away.converged, "games": len(games)}
    return SimpleWeibullModel(home.params, away.params, max_runs), info


def fit_bivariate(games: Iterable[GameRecord], max_runs: int = MAX_RUNS,
                  min_count: int = 20, opts: FitOptions = FitOptions()) -> BivariateScoreModel:
    """Per-diagonal fit of the away score on each populated run difference.

    Diagonals with fewer than ``min_count`` games keep their empirical pmf.
    Games with either score above ``max_runs`` are clipped onto the grid
    edge along their diagonal.
    """
    by_k: dict[int, list[int]] = {}
    total = 0
    for g in games:
        a = min(g.away_runs, max_runs)
        k = max(1 - max_runs, min(max_runs - 1, g.home_runs - g.away_runs))
        a = min(a, max_runs - k) if k > 0 else max(a, -k)
        by_k.setdefault(k, []).append(a)
        total += 1
    if total == 0:
        raise ValueError("no games to fit")

    diagonals = []
    fallback = []
    for k in sorted(by_k):
        runs = np.asarray(by_k[k])
        counts = np.bincount(runs, minlength=max_runs + 1)[: max_runs + 1]
        weight = len(runs) / total
        if len(runs) < min_count:
            diagonals.append(Diagonal(k, weight, empirical_pmf=tuple(counts / counts.sum()),
                                      count=len(runs)))
            fallback.append(k)
            continue
        emp = EmpiricalRunPmf.from_counts(counts)
        lo = max(0, -k)
        init = WeibullParams(scale=max(emp.std(), 0.5), location=lo - 0.5, shape=1.7)
        res = fit(emp, init, opts)
        diagonals.append(Diagonal(k, weight, params=res.params, count=len(runs),
                                  objective=res.objective))

    diagnostics = {
        "games": total,
        "populated_diagonals": len(diagonals),
        "structural_diagonals": STRUCTURAL_DIAGONALS,
        "empirical_fallback": fallback,
        "max_objective": max((d.objective for d in diagonals if d.objective is not None),
                             default=None),
    }
    if len(diagonals) != STRUCTURAL_DIAGONALS:
        log.info("populated %d of %d structural diagonals", len(diagonals), STRUCTURAL_DIAGONALS)
    return BivariateScoreModel(tuple(diagonals), max_runs, diagnostics)


def model_from_dict(d: Mapping):
    kind = d.get("kind")
    if kind == "simple":
        return SimpleWeibullModel(WeibullParams.from_dict(d["home"]),
                                  WeibullParams.from_dict(d["away"]),
                                  int(d.get("max_runs", MAX_RUNS)))
    if kind == "bivariate":
        return BivariateScoreModel(tuple(Diagonal.from_dict(x) for x in d["diagonals"]),
                                   int(d.get("max_runs", MAX_RUNS)),
                                   dict(d.get("diagnostics", {})))
    raise ValueError(f"unknown model kind {kind!r}")


def load_model(path) -> SimpleWeibullModel | BivariateScoreModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
