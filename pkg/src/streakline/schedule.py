"""Synthetic season schedules.

A schedule is an ordered array of (home, away) team indices. Each team's
season is the subsequence of slots it appears in, so only the relative
order of a team's own games matters for streak counting.
"""

from __future__ import annotations

import csv
import random
from collections import Counter
from itertools import chain
from dataclasses import dataclass, field
from typing import Mapping, TextIO

import numpy as np

SERIES_LENGTHS = (2, 3, 4)
ENDGAME_REMAINING = 12
DFS_BUDGET = 5_000
GREEDY_ATTEMPTS = 64
HOME_TOLERANCE = 2
MATCH_JITTER = 6.0
HOST_SWEEPS = 200
DRIFT_LIMIT = 1.5


class InfeasibleConfigError(ValueError):
    pass


class OddGamesError(InfeasibleConfigError):
    pass


class PartitionInfeasibleError(InfeasibleConfigError):
    pass


class PairingFailureError(RuntimeError):
    pass


@dataclass(frozen=True)
class Schedule:
    games: np.ndarray
    num_teams: int
    kind: str = "basic"

    def __post_init__(self):
        games = np.asarray(self.games, dtype=np.int64).reshape(-1, 2)
        games.setflags(write=False)
        object.__setattr__(self, "games", games)

    def __len__(self):
        return len(self.games)

    def to_csv(self, out: TextIO) -> None:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["slot", "home_index", "away_index"])
        for slot, (h, a) in enumerate(self.games):
            w.writerow([slot, int(h), int(a)])


@dataclass(frozen=True)
class SeriesDistribution:
    weights: Mapping[int, float] = field(default_factory=lambda: {2: 0.2, 3: 0.6, 4: 0.2})

    def __post_init__(self):
        w = {int(k): float(v) for k, v in dict(self.weights).items()}
        if set(w) - set(SERIES_LENGTHS):
            raise ValueError(f"series lengths must be in {SERIES_LENGTHS}")
        if any(v < 0 for v in w.values()):
            raise ValueError("series weights must be non-negative")
        total = sum(w.values())
        if total <= 0:
            raise ValueError("series weights are all zero")
        object.__setattr__(self, "weights", {L: w.get(L, 0.0) / total for L in SERIES_LENGTHS})

    @property
    def probs(self) -> np.ndarray:
        return np.array([self.weights[L] for L in SERIES_LENGTHS])

    def mean(self) -> float:
        return float(np.dot(SERIES_LENGTHS, self.probs))

    def to_dict(self) -> dict:
        return {str(k): v for k, v in self.weights.items()}


def _check_teams(T: int) -> None:
    if T < 2:
        raise InfeasibleConfigError(f"need at least two teams, got {T}")


def basic_schedule(T: int, G: int, rng: np.random.Generator) -> Schedule:
    """Random game order with every team hosting exactly G/2 games."""
    _check_teams(T)
    if G < 1:
        raise InfeasibleConfigError(f"need at least one game, got {G}")
    if G % 2:
        raise OddGamesError(f"a basic schedule needs an even game count, got {G}")
    half = G // 2
    home = rng.permutation(np.repeat(np.arange(T), half))
    away = rng.permutation(np.repeat(np.arange(T), half))
    for i in np.flatnonzero(home == away):
        if home[i] != away[i]:
            continue
        t = home[i]
        # swapping away slots i and j must not create a new self-pairing;
        # random probes almost always find a partner, the scan is a fallback
        for j in rng.integers(len(home), size=16).tolist():
            if home[j] != t and away[j] != t:
                break
        else:
            cand = np.flatnonzero((home != t) & (away != t))
            if cand.size == 0:
                raise InfeasibleConfigError(f"cannot place team {t} without self-play")
            j = cand[rng.integers(cand.size)]
        away[i], away[j] = away[j], away[i]
    return Schedule(np.column_stack([home, away]), T, "basic")


# a single leftover game cannot form a series, so never leave exactly one
_ALLOWED = {r: tuple(L for L in SERIES_LENGTHS if L <= r and r - L != 1) for r in range(6)}


def _allowed_lengths(r: int) -> tuple[int, ...]:
    """Series lengths a team with r games left may still play."""
    return _ALLOWED[r] if r < 6 else SERIES_LENGTHS


def _lazy_sorted(partners, rem, rand):
    # most games left first, random among ties; sorted only when iterated
    yield from sorted(partners, key=lambda j: (-rem[j], rand()))


class _DeadEnd(Exception):
    pass


class _RealisticBuilder:
    def __init__(self, T, G, dist: SeriesDistribution, rng):
        self.T, self.G, self.rng = T, G, rng
        self.probs = dist.probs
        self.remaining = np.full(T, G, dtype=np.int64)
        self.last = np.full(T, -1, dtype=np.int64)
        self.blocks: list[np.ndarray] = []
        self.strict = T >= 3

    def _matching(self):
        """Pair teams with similar remaining counts, jittered for variety.

        Sorting on remaining + uniform jitter keeps the league in step; with
        odd T the team furthest ahead sits out.
        """
        T, last = self.T, self.last
        for _ in range(100):
            key = self.remaining + self.rng.uniform(0, MATCH_JITTER, T)
            order = np.argsort(-key, kind="stable")
            pairs = order[: 2 * (T // 2)].reshape(-1, 2)
            i, j = pairs[:, 0], pairs[:, 1]
            if not self.strict:
                return i, j
            # with an idle team the relation is not symmetric; test both sides
            bad = np.flatnonzero((last[i] == j) | (last[j] == i))
            if bad.size == 0:
                return i, j
            # swap the partner of a repeat pairing with a neighbouring pair's
            i, j = i.copy(), j.copy()
            n = len(i)
            for p in bad.tolist():
                for q in ((p + 1) % n, (p - 1) % n):
                    if q != p and self._fresh(i[p], j[q]) and self._fresh(i[q], j[p]):
                        j[p], j[q] = j[q], j[p]
                        break
            if not np.any((last[i] == j) | (last[j] == i)):
                return i, j
        raise _DeadEnd

    def _fresh(self, a, b) -> bool:
        return self.last[a] != b and self.last[b] != a

    def block_phase(self):
        support = [L for L in SERIES_LENGTHS if self.probs[L - 2] > 0]
        short, long_ = min(support), max(support)
        rem = self.remaining
        while rem.min() > ENDGAME_REMAINING:
            i, j = self._matching()
            L = self.rng.choice(SERIES_LENGTHS, size=len(i), p=self.probs)
            drift = (rem[i] + rem[j]) / 2 - rem.mean()
            # pairs that fell behind the league catch up with a long series
            L[drift > DRIFT_LIMIT] = long_
            L[drift < -DRIFT_LIMIT] = short
            rem[i] -= L
            rem[j] -= L
            self.last[i] = j
            self.last[j] = i
            self.blocks.append(np.column_stack([i, j, L]))

    def _pick_length(self, options, rng) -> list[int]:
        """Options ordered by a weighted shuffle; zero-weight lengths go last."""
        pos = [L for L in options if self.probs[L - 2] > 0]
        zero = [L for L in options if self.probs[L - 2] == 0]
        keyed = sorted(pos, key=lambda L: rng.random() ** (1.0 / self.probs[L - 2]), reverse=True)
        return keyed + zero

    def _greedy(self, rng) -> list[tuple[int, int, int]] | None:
        rem, last = self.remaining.tolist(), self.last.tolist()
        T, strict = self.T, self.strict
        out = []
        while True:
            top = max(rem)
            if top == 0:
                return out
            cands = [t for t in range(T) if rem[t] == top]
            i = cands[int(rng.random() * len(cands))]
            partners = [j for j in range(T)
                        if j != i and rem[j] > 0 and (not strict or (last[i] != j and last[j] != i))]
            if not partners:
                return None
            # try a random partner with the most games left; fall back to the
            # full ordering only when it has no compatible series length
            best = max(rem[j] for j in partners)
            top_j = [j for j in partners if rem[j] == best]
            first = top_j[int(rng.random() * len(top_j))]
            for j in chain([first], _lazy_sorted(partners, rem, rng.random)):
                options = [L for L in _allowed_lengths(rem[i]) if L in _allowed_lengths(rem[j])]
                if options:
                    L = self._pick_length(options, rng)[0]
                    rem[i] -= L
                    rem[j] -= L
                    last[i], last[j] = j, i
                    out.append((i, j, L))
                    break
            else:
                return None

    def _search(self, rng, budget) -> list[tuple[int, int, int]] | None:
        rem, last = self.remaining.tolist(), self.last.tolist()
        T, strict = self.T, self.strict
        out: list[tuple[int, int, int]] = []
        nodes = 0

        def rec() -> bool:
            nonlocal nodes
            nodes += 1
            if nodes > budget:
                raise _DeadEnd
            top = max(rem)
            if top == 0:
                return True
            cands = [t for t in range(T) if rem[t] == top]
            i = cands[int(rng.random() * len(cands))]
            partners = [j for j in range(T)
                        if j != i and rem[j] > 0 and (not strict or (last[i] != j and last[j] != i))]
            rand = rng.random
            # most games left first, ties in random order
            partners.sort(key=lambda j: (-rem[j], rand()))
            for j in partners:
                options = [L for L in _allowed_lengths(rem[i]) if L in _allowed_lengths(rem[j])]
                for L in self._pick_length(options, rng):
                    saved = last[i], last[j]
                    rem[i] -= L
                    rem[j] -= L
                    last[i], last[j] = j, i
                    out.append((i, j, L))
                    if rec():
                        return True
                    out.pop()
                    rem[i] += L
                    rem[j] += L
                    last[i], last[j] = saved
            return False

        try:
            return out if rec() else None
        except _DeadEnd:
            return None

    def endgame(self):
        """Finish every team's season exactly; greedy tries first, then search."""
        rng = random.Random(int(self.rng.integers(2**63)))
        for _ in range(GREEDY_ATTEMPTS):
            tail = self._greedy(rng)
            if tail is not None:
                break
        else:
            tail = self._search(rng, DFS_BUDGET)
            if tail is None:
                raise _DeadEnd
        if tail:
            self.blocks.append(np.array(tail, dtype=np.int64).reshape(-1, 3))
        self.remaining[:] = 0

    def assign_hosts(self) -> np.ndarray:
        """Series rows (host, guest, length).

        Hosts go to whichever side has hosted less than its share so far;
        a flip pass then pulls every team toward G/2 home games.
        """
        series = np.concatenate(self.blocks) if self.blocks else np.zeros((0, 3), np.int64)
        rows = series.tolist()
        coins = self.rng.random(len(rows)).tolist()
        home = [0.0] * self.T
        played = [0.0] * self.T
        for s, (i, j, L) in enumerate(rows):
            di, dj = home[i] - played[i] / 2, home[j] - played[j] / 2
            if dj < di or (di == dj and coins[s] < 0.5):
                rows[s] = [j, i, L]
                i = j
            home[i] += L
            played[rows[s][0]] += L
            played[rows[s][1]] += L
        dev = [h - self.G / 2 for h in home]
        tol = HOME_TOLERANCE + 1e-9
        for sweep in range(HOST_SWEEPS):
            changed = False
            for s in self.rng.permutation(len(rows)).tolist():
                h, g, L = rows[s]
                # flipping lowers the sum of squared deviations iff gap > L;
                # gap == L leaves it unchanged, taken sometimes to leave plateaus
                gap = dev[h] - dev[g]
                if gap > L or (gap == L and dev[h] > tol and coins[s] < 0.5):
                    dev[h] -= L
                    dev[g] += L
                    rows[s] = [g, h, L]
                    changed = True
            coins = self.rng.random(len(rows)).tolist()
            if max(abs(d) for d in dev) <= tol and not changed:
                break
        if max(abs(d) for d in dev) > tol:
            raise _DeadEnd
        return np.array(rows, dtype=np.int64).reshape(-1, 3)


def realistic_schedule(T: int, G: int, dist: SeriesDistribution | None, rng: np.random.Generator,
                       max_restarts: int = 50) -> Schedule:
    """Season built from 2-, 3- and 4-game series with a single host each.

    Series are laid down in blocks of random pairings, with lengths drawn
    from ``dist``; the last few series per team are chosen by a small
    search so every team's lengths add up to exactly G. No team meets the
    same opponent in two consecutive series (unless T == 2).
    """
    _check_teams(T)
    if G < 2:
        raise PartitionInfeasibleError(f"{G} games cannot be split into 2-4 game series")
    if (T * G) % 2:
        raise InfeasibleConfigError(f"T*G = {T}*{G} is odd; games cannot pair up")
    if G == 2 and T % 2:
        raise InfeasibleConfigError(f"a single series per team needs an even team count, got {T}")
    dist = dist or SeriesDistribution()
    for _ in range(max_restarts):
        b = _RealisticBuilder(T, G, dist, rng)
        try:
            b.block_phase()
            b.endgame()
            series = b.assign_hosts()
        except _DeadEnd:
            continue
        games = np.repeat(series[:, :2], series[:, 2], axis=0)
        return Schedule(games, T, "realistic")
    raise PairingFailureError(f"no realistic schedule for T={T}, G={G} after {max_restarts} attempts")


def team_slots(s: Schedule) -> tuple[np.ndarray, np.ndarray]:
    """Per-team slot indices in season order, plus a home flag.

    Both arrays have shape (T, G); every team must play the same number of
    games.
    """
    T = s.num_teams
    flat = s.games.reshape(-1)
    order = np.argsort(flat, kind="stable")
    counts = np.bincount(flat, minlength=T)
    if counts.min() != counts.max():
        raise ValueError("teams play unequal numbers of games")
    G = int(counts[0])
    slots = (order // 2).reshape(T, G)
    is_home = (order % 2 == 0).reshape(T, G)
    return slots, is_home


def opponent_runs(s: Schedule) -> dict[int, list[int]]:
    """Maximal same-opponent run lengths in each team's season."""
    seqs: dict[int, list[int]] = {t: [] for t in range(s.num_teams)}
    for h, a in s.games:
        seqs[int(h)].append(int(a))
        seqs[int(a)].append(int(h))
    runs = {}
    for t, opps in seqs.items():
        lens = []
        for k, opp in enumerate(opps):
            if k and opp == opps[k - 1]:
                lens[-1] += 1
            else:
                lens.append(1)
        runs[t] = lens
    return runs


@dataclass
class ValidationReport:
    games_per_team: list[int]
    home_per_team: list[int]
    self_play: list[int]
    wrong_game_count: list[int]
    home_imbalance: list[int]
    series_histogram: dict[int, int]
    bad_series: list[int]

    @property
    def violations(self) -> list[str]:
        out = []
        if self.self_play:
            out.append(f"self-play in slots {self.self_play}")
        if self.wrong_game_count:
            out.append(f"wrong game count for teams {self.wrong_game_count}")
        if self.home_imbalance:
            out.append(f"home/away imbalance for teams {self.home_imbalance}")
        if self.bad_series:
            out.append(f"series outside 2-4 games for teams {self.bad_series}")
        return out

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_schedule(s: Schedule, T: int, G: int, home_tolerance: float | None = None) -> ValidationReport:
    """Check per-team totals, home balance, self-play, and series structure.

    ``home_tolerance`` defaults to 0 for basic schedules and 2 for realistic
    ones. Series structure is only enforced on realistic schedules.
    """
    if home_tolerance is None:
        home_tolerance = 0 if s.kind == "basic" else HOME_TOLERANCE
    games = s.games
    self_play = [int(i) for i in np.flatnonzero(games[:, 0] == games[:, 1])] if len(games) else []
    valid = games[(games >= 0).all(axis=1) & (games < T).all(axis=1)] if len(games) else games
    total = np.bincount(valid.reshape(-1), minlength=T)[:T] if len(valid) else np.zeros(T, int)
    home = np.bincount(valid[:, 0], minlength=T)[:T] if len(valid) else np.zeros(T, int)
    wrong = [t for t in range(T) if total[t] != G]
    imbalance = [t for t in range(T) if abs(home[t] - G / 2) > home_tolerance + 1e-9]

    hist: Counter = Counter()
    bad = []
    if s.kind == "realistic":
        for t, lens in opponent_runs(s).items():
            hist.update(lens)
            if T >= 3 and any(L not in SERIES_LENGTHS for L in lens):
                bad.append(t)
    return ValidationReport(
        games_per_team=[int(x) for x in total],
        home_per_team=[int(x) for x in home],
        self_play=self_play,
        wrong_game_count=wrong,
        home_imbalance=imbalance,
        series_histogram=dict(sorted(hist.items())),
        bad_series=sorted(bad),
    )
