"""Game-log parsing and assembly of per-team seasons."""

from __future__ import annotations

import csv
import datetime as dt
import enum
import io
import logging
import math
from collections import Counter, defaultdict
from pathlib import Path
from typing import BinaryIO, Iterable, TextIO

from .core import (
    GameRecord,
    InvalidGameError,
    TeamSeason,
    TieScoreError,
    YearConfig,
    team_id,
    team_perspective,
)

log = logging.getLogger(__name__)

SIMPLE_CSV_HEADER = ("date", "seq", "home", "away", "home_runs", "away_runs")


class GameLogFormat(str, enum.Enum):
    SIMPLE_CSV = "simple"
    RETROSHEET = "retrosheet"

    @classmethod
    def parse(cls, name: str) -> "GameLogFormat":
        aliases = {"simple": cls.SIMPLE_CSV, "simplecsv": cls.SIMPLE_CSV, "csv": cls.SIMPLE_CSV,
                   "retrosheet": cls.RETROSHEET, "retrosheetgamelog": cls.RETROSHEET,
                   "gamelog": cls.RETROSHEET}
        try:
            return aliases[name.strip().lower().replace("-", "").replace("_", "")]
        except KeyError:
            raise UnknownFormatError(f"unknown game-log format {name!r}") from None


class GameLogError(ValueError):
    """Parse failure tied to a source line (1-based)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MalformedLineError(GameLogError):
    pass


class TieLineError(GameLogError):
    pass


class UnknownFormatError(ValueError):
    pass


class EmptyInputError(ValueError):
    pass


def _as_text(source: BinaryIO | TextIO | bytes | str, encoding: str) -> TextIO:
    if isinstance(source, bytes):
        return io.StringIO(source.decode(encoding))
    if isinstance(source, str):
        return io.StringIO(source)
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding=encoding, newline="")


def _parse_simple(reader, on_tie: str) -> tuple[list[GameRecord], int]:
    records: list[GameRecord] = []
    ties = 0
    next_seq: Counter = Counter()
    header_seen = False
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if not header_seen:
            if tuple(c.strip().lower() for c in row) != SIMPLE_CSV_HEADER:
                raise MalformedLineError(
                    f"expected header {','.join(SIMPLE_CSV_HEADER)}, got {','.join(row)}", lineno)
            header_seen = True
            continue
        if len(row) != 6:
            raise MalformedLineError(f"expected 6 fields, got {len(row)}", lineno)
        try:
            date = dt.date.fromisoformat(row[0].strip())
            home, away = team_id(row[2]), team_id(row[3])
            hr, ar = int(row[4]), int(row[5])
            seq = int(row[1]) if row[1].strip() else next_seq[(date, home)]
        except ValueError as exc:
            raise MalformedLineError(str(exc), lineno) from None
        next_seq[(date, home)] = seq + 1
        if hr == ar:
            if on_tie == "error":
                raise TieLineError(f"tied score {hr}-{ar}", lineno)
            ties += 1
            continue
        try:
            records.append(GameRecord(date, seq, home, away, hr, ar))
        except InvalidGameError as exc:
            raise MalformedLineError(str(exc), lineno) from None
    return records, ties


def _retrosheet_seq(code: str, date: dt.date, home, counter: Counter) -> int:
    code = code.strip()
    if code.isdigit():
        return int(code)
    # some old logs carry letters or nothing; fall back to file order
    seq = counter[(date, home)] + 1
    return seq


def _parse_retrosheet(reader, on_tie: str) -> tuple[list[GameRecord], int]:
    records: list[GameRecord] = []
    ties = 0
    seen: Counter = Counter()
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 11:
            raise MalformedLineError(f"expected at least 11 fields, got {len(row)}", lineno)
        try:
            date = dt.datetime.strptime(row[0].strip(), "%Y%m%d").date()
            away, home = team_id(row[3]), team_id(row[6])
            ar, hr = int(row[9]), int(row[10])
        except ValueError as exc:
            raise MalformedLineError(str(exc), lineno) from None
        seq = _retrosheet_seq(row[1], date, home, seen)
        seen[(date, home)] += 1
        if hr == ar:
            if on_tie == "error":
                raise TieLineError(f"tied score {hr}-{ar}", lineno)
            ties += 1
            continue
        try:
            records.append(GameRecord(date, seq, home, away, hr, ar))
        except InvalidGameError as exc:
            raise MalformedLineError(str(exc), lineno) from None
    return records, ties


def parse_game_log(
    source: BinaryIO | TextIO | bytes | str,
    fmt: GameLogFormat | str,
    on_tie: str | None = None,
) -> list[GameRecord]:
    """Parse one game log into records, preserving source order.

    ``on_tie`` is ``"error"`` or ``"drop"``. Simple CSV files default to
    ``"error"``; Retrosheet logs default to ``"drop"`` because the raw
    archives contain a few called/tied games. Dropped ties are logged.
    """
    if not isinstance(fmt, GameLogFormat):
        fmt = GameLogFormat.parse(fmt)
    if on_tie is None:
        on_tie = "error" if fmt is GameLogFormat.SIMPLE_CSV else "drop"
    if on_tie not in ("error", "drop"):
        raise ValueError(f"on_tie must be 'error' or 'drop', not {on_tie!r}")

    encoding = "utf-8" if fmt is GameLogFormat.SIMPLE_CSV else "latin-1"
    reader = csv.reader(_as_text(source, encoding))
    if fmt is GameLogFormat.SIMPLE_CSV:
        records, ties = _parse_simple(reader, on_tie)
    else:
        records, ties = _parse_retrosheet(reader, on_tie)
    if ties:
        log.warning("dropped %d tied game(s)", ties)
    return records


def sniff_format(path: str | Path) -> GameLogFormat:
    with open(path, "r", encoding="latin-1") as fh:
        for line in fh:
            if not line.strip():
                continue
            first = line.strip().split(",")
            if tuple(c.strip().lower() for c in first) == SIMPLE_CSV_HEADER:
                return GameLogFormat.SIMPLE_CSV
            if first[0].strip('"').isdigit() and len(first) >= 11:
                return GameLogFormat.RETROSHEET
            break
    raise UnknownFormatError(f"cannot detect game-log format of {path}")


def read_game_logs(paths: Iterable[str | Path], fmt: GameLogFormat | str | None = None) -> list[GameRecord]:
    """Read several files; without ``fmt`` every file must sniff to the same format."""
    paths = [Path(p) for p in paths]
    if not paths:
        raise EmptyInputError("no input files")
    expanded: list[Path] = []
    for p in paths:
        if p.is_dir():
            expanded.extend(sorted(q for q in p.iterdir() if q.is_file()))
        else:
            expanded.append(p)
    if fmt is None:
        found = {sniff_format(p) for p in expanded}
        if len(found) != 1:
            raise UnknownFormatError(
                "input files have mixed formats; pass an explicit format")
        fmt = found.pop()
    records: list[GameRecord] = []
    for p in expanded:
        with open(p, "rb") as fh:
            try:
                records.extend(parse_game_log(fh, fmt))
            except GameLogError as exc:
                raise type(exc)(f"{p}: {exc}") from None
    return records


def write_simple_csv(records: Iterable[GameRecord], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SIMPLE_CSV_HEADER)
    for g in records:
        w.writerow([g.date.isoformat(), g.seq, g.home, g.away, g.home_runs, g.away_runs])


def build_team_seasons(games: Iterable[GameRecord]) -> list[TeamSeason]:
    by_team_year: dict[tuple, list] = defaultdict(list)
    for g in games:
        for t in (g.home, g.away):
            by_team_year[(g.year, t)].append(team_perspective(g, t))
    seasons = []
    for (year, team), views in sorted(by_team_year.items()):
        views.sort(key=lambda v: (v.date, v.seq, v.opponent))
        seasons.append(TeamSeason(team, year, views))
    return seasons


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def year_configs_from_data(games: Iterable[GameRecord], games_rule: str = "mean") -> list[YearConfig]:
    """One YearConfig per calendar year present in ``games``.

    ``games_rule`` picks ``"mean"`` (rounded mean season length) or ``"max"``.
    When T*G comes out odd, G is lowered by one so the league total is whole.
    """
    lengths: dict[int, Counter] = defaultdict(Counter)
    for g in games:
        lengths[g.year][g.home] += 1
        lengths[g.year][g.away] += 1
    if not lengths:
        raise EmptyInputError("no games to derive year configurations from")
    if games_rule not in ("mean", "max"):
        raise ValueError(f"games_rule must be 'mean' or 'max', not {games_rule!r}")
    out = []
    for year in sorted(lengths):
        counts = lengths[year]
        T = len(counts)
        if games_rule == "mean":
            G = _round_half_up(sum(counts.values()) / T)
        else:
            G = max(counts.values())
        if (T * G) % 2:
            G -= 1
        out.append(YearConfig(year, T, max(G, 2)))
    return out


def default_year_config(year: int) -> YearConfig:
    """Era-rule configuration for a modern-era year when no data is at hand.

    Games per team: 140 (1901-1903), 154 (1904-1960), 162 after. Team
    counts follow the league expansions.
    """
    if year <= 1903:
        G = 140
    elif year <= 1960:
        G = 154
    else:
        G = 162
    for first_year, teams in ((1998, 30), (1993, 28), (1977, 26), (1969, 24), (1962, 20), (1961, 18)):
        if year >= first_year:
            T = teams
            break
    else:
        T = 16
    return YearConfig(year, T, G)
