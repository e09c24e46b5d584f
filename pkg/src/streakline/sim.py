"""Monte Carlo season ensembles and their comparison with history.

Every (year, replicate) pair gets its own random stream derived from the
root seed, so results do not depend on how work is split across workers.
A replicate draws a fresh schedule, scores every game, and counts
league-wide streaks for each requested order.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .core import GameRecord, TeamGameView, TeamId, TeamSeason, YearConfig
from .schedule import Schedule, SeriesDistribution, basic_schedule, realistic_schedule, team_slots
from .streaks import count_streaks_array

SCORE_CODE = 128


class ModelKind(str, enum.Enum):
    SIMPLE = "simple"
    BIVARIATE = "bivariate"


class ScheduleKind(str, enum.Enum):
    BASIC = "basic"
    REALISTIC = "realistic"


class DisjointYearsError(ValueError):
    pass


class InvalidRangeError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    years: tuple[YearConfig, ...]
    reps: int = 10_000
    model: ModelKind = ModelKind.BIVARIATE
    schedule: ScheduleKind = ScheduleKind.REALISTIC
    series_dist: SeriesDistribution = field(default_factory=SeriesDistribution)
    orders: tuple[int, ...] = (2, 3, 4)
    seed: int = 0
    per_year_refit: bool = False

    def __post_init__(self):
        object.__setattr__(self, "years", tuple(self.years))
        object.__setattr__(self, "orders", tuple(int(n) for n in self.orders))
        object.__setattr__(self, "model", ModelKind(self.model))
        object.__setattr__(self, "schedule", ScheduleKind(self.schedule))
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not self.orders or min(self.orders) < 2:
            raise ValueError("streak orders must all be >= 2")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        return {
            "years": [asdict(y) for y in self.years],
            "reps": self.reps,
            "model": self.model.value,
            "schedule": self.schedule.value,
            "series_dist": self.series_dist.to_dict(),
            "orders": list(self.orders),
            "seed": self.seed,
            "per_year_refit": self.per_year_refit,
        }


@dataclass(frozen=True)
class YearStats:
    year: int
    order: int
    min: float
    mean: float
    max: float
    p05: float
    p95: float
    historic: int | None = None

    def __post_init__(self):
        if not (self.min <= self.p05 <= self.p95 <= self.max and self.min <= self.mean <= self.max):
            raise ValueError(f"inconsistent summary for {self.year}: {self}")


@dataclass(frozen=True)
class EraHistogram:
    order: int
    counts: dict[int, float]
    reps: int
    years: int
    occurrence_probability: float

    def fraction(self, k: int) -> float:
        return self.counts.get(k, 0.0)


def replicate_rng(seed: int, year: int, rep: int) -> np.random.Generator:
    """Independent stream for one (year, replicate) cell."""
    ss = np.random.SeedSequence(seed, spawn_key=(int(year), int(rep)))
    return np.random.Generator(np.random.PCG64(ss))


def schedule_games(cfg: YearConfig, kind: ScheduleKind) -> int:
    """Games per team actually simulated; basic schedules need an even count."""
    G = cfg.games_per_team
    if ScheduleKind(kind) is ScheduleKind.BASIC and G % 2:
        return G - 1
    return G


def make_schedule(cfg: YearConfig, sim: SimConfig, rng: np.random.Generator) -> Schedule:
    G = schedule_games(cfg, sim.schedule)
    if sim.schedule is ScheduleKind.BASIC:
        return basic_schedule(cfg.num_teams, G, rng)
    return realistic_schedule(cfg.num_teams, G, sim.series_dist, rng)


def season_views(schedule: Schedule, home_runs: np.ndarray, away_runs: np.ndarray):
    """Per-team (scored, allowed) arrays of shape (T, G) in schedule order."""
    slots, is_home = team_slots(schedule)
    h, a = home_runs[slots], away_runs[slots]
    return np.where(is_home, h, a), np.where(is_home, a, h)


def season_streak_counts(schedule: Schedule, home_runs, away_runs, orders: Sequence[int]) -> np.ndarray:
    scored, allowed = season_views(schedule, np.asarray(home_runs), np.asarray(away_runs))
    return count_streaks_array(scored * SCORE_CODE + allowed, orders).sum(axis=0)


def simulate_season(schedule: Schedule, model, rng: np.random.Generator, year: int = 2000) -> list[TeamSeason]:
    """Score every scheduled game and assemble the teams' seasons.

    Teams are named T00, T01, ...; games carry a fixed date and their slot
    index as ``seq`` so season order equals schedule order.
    """
    home, away = model.sample(rng, len(schedule))
    names = [TeamId(f"T{t:02d}") for t in range(schedule.num_teams)]
    date = dt.date(year, 1, 1)
    views: list[list[TeamGameView]] = [[] for _ in names]
    for slot, ((h, a), hr, ar) in enumerate(zip(schedule.games.tolist(), home.tolist(), away.tolist())):
        views[h].append(TeamGameView(hr, ar, names[a], True, date, slot))
        views[a].append(TeamGameView(ar, hr, names[h], False, date, slot))
    return [TeamSeason(names[t], year, views[t]) for t in range(schedule.num_teams)]


def synthetic_game_log(years: Iterable[YearConfig], model, schedule: ScheduleKind = ScheduleKind.REALISTIC,
                       seed: int = 0, series_dist: SeriesDistribution | None = None) -> list[GameRecord]:
    """Simulated league history as GameRecords, one scheduled slot per day.

    Teams are named T00, T01, ... Useful as stand-in input when no real
    game log is at hand.
    """
    sim = SimConfig(tuple(years), 1, schedule=schedule, seed=seed,
                    series_dist=series_dist or SeriesDistribution())
    names = [TeamId(f"T{t:02d}") for t in range(max(c.num_teams for c in sim.years))]
    out = []
    for cfg in sim.years:
        rng = replicate_rng(seed, cfg.year, 0)
        sched = make_schedule(cfg, sim, rng)
        home, away = _model_for(model, cfg.year).sample(rng, len(sched))
        per_day = max(cfg.num_teams // 2, 1)
        start = dt.date(cfg.year, 4, 1)
        for slot, ((h, a), hr, ar) in enumerate(zip(sched.games.tolist(), home.tolist(), away.tolist())):
            day = start + dt.timedelta(days=slot // per_day)
            out.append(GameRecord(day, slot % per_day, names[h], names[a], hr, ar))
    return out


def _run_chunk(args) -> np.ndarray:
    cfg, sim, model, start, stop = args
    out = np.empty((stop - start, len(sim.orders)), dtype=np.int64)
    for k, rep in enumerate(range(start, stop)):
        rng = replicate_rng(sim.seed, cfg.year, rep)
        sched = make_schedule(cfg, sim, rng)
        h, a = model.sample(rng, len(sched))
        out[k] = season_streak_counts(sched, h, a, sim.orders)
    return out


def _model_for(model, year: int):
    return model[year] if isinstance(model, Mapping) else model


def default_threads() -> int:
    env = os.environ.get("STREAKLINE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_replicates(sim: SimConfig, model, threads: int = 1, chunk: int = 250) -> dict[int, np.ndarray]:
    """Streak counts for every year and replicate.

    Returns ``{year: array(reps, len(orders))}``. ``model`` is a score model
    or a ``{year: model}`` mapping. Results are identical for any ``threads``.
    """
    tasks = []
    for cfg in sim.years:
        m = _model_for(model, cfg.year)
        for start in range(0, sim.reps, chunk):
            tasks.append((cfg, sim, m, start, min(start + chunk, sim.reps)))
    if threads <= 1 or len(tasks) == 1:
        parts = [_run_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    out: dict[int, list[np.ndarray]] = {}
    for t, part in zip(tasks, parts):
        out.setdefault(t[0].year, []).append(part)
    return {year: np.concatenate(chunks) for year, chunks in out.items()}


def nearest_rank(sorted_values: np.ndarray, pct: int) -> float:
    """The ceil(pct/100 * N)-th smallest value (1-based)."""
    n = len(sorted_values)
    idx = max((pct * n + 99) // 100 - 1, 0)
    return float(sorted_values[idx])


def summarize(year: int, order: int, counts: np.ndarray, historic: int | None = None) -> YearStats:
    v = np.sort(np.asarray(counts))
    return YearStats(year, order, float(v[0]), float(v.mean()), float(v[-1]),
                     nearest_rank(v, 5), nearest_rank(v, 95), historic)


def year_stats(results: Mapping[int, np.ndarray], sim: SimConfig,
               historic: Mapping[int, Mapping[int, int]] | None = None) -> list[YearStats]:
    """Summaries for every (year, order); ``historic`` is ``{order: {year: count}}``."""
    out = []
    for j, order in enumerate(sim.orders):
        hist = (historic or {}).get(order, {})
        for year in sorted(results):
            out.append(summarize(year, order, results[year][:, j], hist.get(year)))
    return out


def simulate_year(cfg: YearConfig, sim: SimConfig, order: int, model, threads: int = 1) -> YearStats:
    one = SimConfig((cfg,), sim.reps, sim.model, sim.schedule, sim.series_dist, (order,),
                    sim.seed, sim.per_year_refit)
    res = run_replicates(one, model, threads)
    return summarize(cfg.year, order, res[cfg.year][:, 0])


def era_histogram(results: Mapping[int, np.ndarray], sim: SimConfig, order: int) -> EraHistogram:
    """Histogram of per-replicate totals summed across all simulated years.

    Replicate r of the era is the sum of replicate r of each year.
    """
    j = sim.orders.index(order)
    stacked = np.stack([results[y][:, j] for y in sorted(results)])
    totals = stacked.sum(axis=0)
    values, freq = np.unique(totals, return_counts=True)
    counts = {int(v): float(f) / len(totals) for v, f in zip(values, freq)}
    occurrence = float((stacked > 0).mean())
    return EraHistogram(order, counts, len(totals), stacked.shape[0], occurrence)


def simulate_era(sim: SimConfig, order: int, model, threads: int = 1) -> EraHistogram:
    one = SimConfig(sim.years, sim.reps, sim.model, sim.schedule, sim.series_dist, (order,),
                    sim.seed, sim.per_year_refit)
    return era_histogram(run_replicates(one, model, threads), one, order)


@dataclass(frozen=True)
class Comparison:
    order: int
    years: int
    exceeds_mean: int
    exceeds_p95: int
    below_p05: int
    exceeds_max: int
    below_min: int

    def fraction(self, name: str) -> float:
        return getattr(self, name) / self.years

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("exceeds_mean", "exceeds_p95", "below_p05", "exceeds_max", "below_min"):
            d[k + "_pct"] = 100.0 * self.fraction(k)
        return d


def compare_to_history(stats: Iterable[YearStats], historic: Mapping[int, int]) -> Comparison:
    """Count years where the historic value falls outside each band (strictly)."""
    rows = [s for s in stats if s.year in historic]
    if not rows:
        raise DisjointYearsError("no overlap between simulated and historic years")
    orders = {s.order for s in rows}
    if len(orders) != 1:
        raise ValueError(f"stats mix several orders: {sorted(orders)}")
    h = {s.year: historic[s.year] for s in rows}
    return Comparison(
        order=orders.pop(),
        years=len(rows),
        exceeds_mean=sum(h[s.year] > s.mean for s in rows),
        exceeds_p95=sum(h[s.year] > s.p95 for s in rows),
        below_p05=sum(h[s.year] < s.p05 for s in rows),
        exceeds_max=sum(h[s.year] > s.max for s in rows),
        below_min=sum(h[s.year] < s.min for s in rows),
    )


def naive_estimate(score_min: int, score_max: int, repeats: int) -> float:
    """Chance that a fixed score repeats ``repeats`` times in a row when both
    teams' scores are uniform on [score_min, score_max]; the first game is free.
    """
    if score_max < score_min:
        raise InvalidRangeError(f"score_max {score_max} < score_min {score_min}")
    if repeats < 2:
        raise InvalidRangeError("need at least two games")
    span = score_max - score_min + 1
    return 1.0 / span ** (2 * (repeats - 1))


def _g(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.6g}"


def write_year_stats_csv(stats: Iterable[YearStats], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["year", "order", "min", "p05", "mean", "p95", "max", "historic"])
    for s in stats:
        w.writerow([s.year, s.order, _g(s.min), _g(s.p05), _g(s.mean), _g(s.p95), _g(s.max),
                    "" if s.historic is None else s.historic])


def write_era_csv(hist: EraHistogram, out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["count", "fraction"])
    for k in sorted(hist.counts):
        w.writerow([k, _g(hist.counts[k])])


def stats_to_json(stats: Iterable[YearStats]) -> str:
    return json.dumps([asdict(s) for s in stats], indent=1)


def era_to_json(hist: EraHistogram) -> str:
    d = asdict(hist)
    d["counts"] = {str(k): v for k, v in sorted(hist.counts.items())}
    return json.dumps(d, indent=1)
