"""Domain types shared across the package."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import NewType

MAX_RUNS_SANITY = 99

TeamId = NewType("TeamId", str)


class TeamNotInGameError(ValueError):
    pass


class InvalidGameError(ValueError):
    pass


class TieScoreError(InvalidGameError):
    pass


def team_id(token: str) -> TeamId:
    """Normalize a raw team token ("laa ", "LAA") to its canonical form."""
    norm = token.strip().upper()
    if not norm:
        raise ValueError("team id must be non-empty")
    return TeamId(norm)


@dataclass(frozen=True, order=True)
class GameRecord:
    date: dt.date
    seq: int
    home: TeamId
    away: TeamId
    home_runs: int
    away_runs: int

    def __post_init__(self):
        if self.home == self.away:
            raise InvalidGameError(f"team {self.home} cannot play itself")
        for runs in (self.home_runs, self.away_runs):
            if not 0 <= runs <= MAX_RUNS_SANITY:
                raise InvalidGameError(f"run total {runs} outside 0..{MAX_RUNS_SANITY}")
        if self.home_runs == self.away_runs:
            raise TieScoreError(f"tied score {self.home_runs}-{self.away_runs}")

    @property
    def year(self) -> int:
        return self.date.year

    @property
    def key(self) -> tuple:
        return (self.date, self.seq, self.home, self.away)

    @property
    def total_runs(self) -> int:
        return self.home_runs + self.away_runs


@dataclass(frozen=True)
class TeamGameView:
    scored: int
    allowed: int
    opponent: TeamId
    is_home: bool
    date: dt.date
    seq: int

    def __post_init__(self):
        if self.scored == self.allowed:
            raise TieScoreError("a team view cannot be a tie")

    @property
    def score(self) -> tuple[int, int]:
        return (self.scored, self.allowed)


@dataclass(frozen=True)
class TeamSeason:
    team: TeamId
    year: int
    games: tuple[TeamGameView, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "games", tuple(self.games))
        keys = [(g.date, g.seq) for g in self.games]
        if keys != sorted(keys):
            raise ValueError(f"{self.team} {self.year}: games not in (date, seq) order")

    def __len__(self):
        return len(self.games)

    def game_key(self, i: int) -> tuple:
        """Identity of the i-th game, shared by both participants' views."""
        g = self.games[i]
        home, away = (self.team, g.opponent) if g.is_home else (g.opponent, self.team)
        return (g.date, g.seq, home, away)


@dataclass(frozen=True)
class YearConfig:
    year: int
    num_teams: int
    games_per_team: int

    def __post_init__(self):
        if self.num_teams < 2:
            raise ValueError("need at least two teams")
        if self.games_per_team < 1:
            raise ValueError("need at least one game per team")
        if (self.num_teams * self.games_per_team) % 2:
            raise ValueError(
                f"{self.year}: T*G = {self.num_teams}*{self.games_per_team} is odd"
            )

    @property
    def total_games(self) -> int:
        return self.num_teams * self.games_per_team // 2


def team_perspective(game: GameRecord, team: TeamId) -> TeamGameView:
    if team == game.home:
        return TeamGameView(game.home_runs, game.away_runs, game.away, True, game.date, game.seq)
    if team == game.away:
        return TeamGameView(game.away_runs, game.home_runs, game.home, False, game.date, game.seq)
    raise TeamNotInGameError(f"{team} did not play in {game.away} @ {game.home} on {game.date}")
