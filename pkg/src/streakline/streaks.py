"""Same-score streak detection and the descriptive statistics built on it.

A streak of order n is a window of n consecutive games in one team's
season with identical (scored, allowed) pairs. Windows overlap: a run of
k identical games holds k - n + 1 spans of order n.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import TeamId, TeamSeason


class InvalidOrderError(ValueError):
    pass


class EmptySelectionError(ValueError):
    pass


@dataclass(frozen=True)
class StreakSpan:
    team: TeamId
    year: int
    start_index: int
    order: int
    scored: int
    allowed: int


@dataclass(frozen=True)
class RunTotalStats:
    mean: float
    std_dev: float
    count: int


@dataclass(frozen=True)
class AllGames:
    pass


@dataclass(frozen=True)
class InStreakOfOrder:
    n: int


def _check_order(n: int) -> None:
    if n < 2:
        raise InvalidOrderError(f"streak order must be >= 2, got {n}")


def run_lengths(scores: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Maximal runs of identical consecutive scores as (start, length)."""
    runs = []
    start = 0
    for i in range(1, len(scores) + 1):
        if i == len(scores) or scores[i] != scores[start]:
            runs.append((start, i - start))
            start = i
    return runs


def find_streaks(season: TeamSeason, n: int) -> list[StreakSpan]:
    _check_order(n)
    scores = [g.score for g in season.games]
    spans = []
    for start, length in run_lengths(scores):
        s, a = scores[start]
        for i in range(start, start + length - n + 1):
            spans.append(StreakSpan(season.team, season.year, i, n, s, a))
    return spans


def count_streaks(season: TeamSeason, n: int) -> int:
    _check_order(n)
    scores = [g.score for g in season.games]
    return sum(max(length - n + 1, 0) for _, length in run_lengths(scores))


def count_streaks_array(codes: np.ndarray, orders: Iterable[int]) -> np.ndarray:
    """Vectorized streak counts over the last axis of an integer array.

    ``codes`` holds one encoded (scored, allowed) value per game, shape
    ``(..., G)``. Returns shape ``(..., len(orders))``: for each leading
    index, the number of order-n windows.
    """
    orders = list(orders)
    for n in orders:
        _check_order(n)
    codes = np.asarray(codes)
    eq = (codes[..., 1:] == codes[..., :-1]).astype(np.int32)
    pad = np.zeros(eq.shape[:-1] + (1,), dtype=np.int32)
    csum = np.concatenate([pad, np.cumsum(eq, axis=-1)], axis=-1)
    out = np.empty(codes.shape[:-1] + (len(orders),), dtype=np.int64)
    G = codes.shape[-1]
    for j, n in enumerate(orders):
        w = n - 1
        if G < n:
            out[..., j] = 0
            continue
        windows = csum[..., w:] - csum[..., :-w]
        out[..., j] = (windows == w).sum(axis=-1)
    return out


def league_streak_counts(seasons: Iterable[TeamSeason], n: int) -> dict[int, int]:
    _check_order(n)
    counts: dict[int, int] = defaultdict(int)
    for season in seasons:
        counts[season.year] += count_streaks(season, n)
    return dict(sorted(counts.items()))


def streak_spans_by_year(seasons: Iterable[TeamSeason], n: int) -> dict[int, list[StreakSpan]]:
    out: dict[int, list[StreakSpan]] = defaultdict(list)
    for season in seasons:
        out[season.year].extend(find_streaks(season, n))
    return dict(sorted(out.items()))


def pair_count(seasons: Iterable[TeamSeason]) -> int:
    return sum(max(len(s) - 1, 0) for s in seasons)


def pair_probability(seasons: Iterable[TeamSeason]) -> float:
    seasons = list(seasons)
    pairs = pair_count(seasons)
    if pairs == 0:
        raise ZeroDivisionError("no consecutive-game pairs in input")
    return sum(count_streaks(s, 2) for s in seasons) / pairs


def run_total_stats(seasons: Iterable[TeamSeason], selector=AllGames()) -> RunTotalStats:
    """Mean and population std of total runs over distinct selected games.

    A game sits in an order-n streak when any order-n span of either team
    covers it; each game counts once however many spans cover it.
    """
    totals: dict[tuple, int] = {}
    for season in seasons:
        if isinstance(selector, AllGames):
            idx = range(len(season))
        elif isinstance(selector, InStreakOfOrder):
            _check_order(selector.n)
            idx = set()
            for span in find_streaks(season, selector.n):
                idx.update(range(span.start_index, span.start_index + span.order))
        else:
            raise TypeError(f"unknown selector {selector!r}")
        for i in idx:
            g = season.games[i]
            totals[season.game_key(i)] = g.scored + g.allowed
    if not totals:
        raise EmptySelectionError("no games selected")
    values = np.fromiter(totals.values(), dtype=float, count=len(totals))
    return RunTotalStats(float(values.mean()), float(values.std()), len(values))


def streak_table(seasons: Sequence[TeamSeason], orders: Sequence[int]) -> dict[int, dict[int, int]]:
    """``{order: {year: count}}`` with every year present for every order."""
    years = sorted({s.year for s in seasons})
    table = {}
    for n in orders:
        counts = league_streak_counts(seasons, n)
        table[n] = {y: counts.get(y, 0) for y in years}
    return table
