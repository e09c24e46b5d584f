import datetime as dt

import pytest
from hypothesis import given
from hypothesis import strategies as st

from streakline.core import (
    GameRecord,
    InvalidGameError,
    TeamNotInGameError,
    TeamSeason,
    TieScoreError,
    YearConfig,
    team_id,
    team_perspective,
)

from conftest import G

teams = st.sampled_from(["LAA", "LAD", "TBA", "NYN", "SDN"])


@st.composite
def games(draw):
    home, away = draw(st.lists(teams, min_size=2, max_size=2, unique=True))
    hr = draw(st.integers(0, 30))
    ar = draw(st.integers(0, 30).filter(lambda x: x != hr))
    return GameRecord(dt.date(2019, 6, 10), 0, team_id(home), team_id(away), hr, ar)


def test_perspective_home_team():
    g = G("2019-06-13", "LAA", "TBA", 5, 3)
    v = team_perspective(g, team_id("LAA"))
    assert (v.scored, v.allowed, v.is_home, v.opponent) == (5, 3, True, "TBA")


def test_perspective_other_side():
    g = G("2019-06-10", "LAA", "LAD", 5, 3)
    v = team_perspective(g, team_id("LAD"))
    assert (v.scored, v.allowed, v.is_home) == (3, 5, False)


def test_perspective_non_participant():
    with pytest.raises(TeamNotInGameError):
        team_perspective(G("2019-06-10", "AAA", "BBB", 2, 3), team_id("CCC"))


@given(games())
def test_perspective_conserves_runs(g):
    for t in (g.home, g.away):
        v = team_perspective(g, t)
        assert v.scored + v.allowed == g.home_runs + g.away_runs
    assert team_perspective(g, g.home).scored == team_perspective(g, g.away).allowed


def test_team_id_normalizes():
    assert team_id(" laa ") == "LAA"
    with pytest.raises(ValueError):
        team_id("  ")


@pytest.mark.parametrize("kwargs, err", [
    (dict(home="A", away="A", home_runs=1, away_runs=2), InvalidGameError),
    (dict(home="A", away="B", home_runs=2, away_runs=2), TieScoreError),
    (dict(home="A", away="B", home_runs=100, away_runs=2), InvalidGameError),
    (dict(home="A", away="B", home_runs=-1, away_runs=2), InvalidGameError),
])
def test_game_record_invariants(kwargs, err):
    with pytest.raises(err):
        GameRecord(dt.date(2019, 1, 1), 0, **kwargs)


def test_season_must_be_ordered():
    a = team_perspective(G("2019-06-11", "A", "B", 1, 2), team_id("A"))
    b = team_perspective(G("2019-06-10", "A", "B", 1, 2), team_id("A"))
    with pytest.raises(ValueError):
        TeamSeason(team_id("A"), 2019, [a, b])


def test_year_config():
    assert YearConfig(2019, 30, 162).total_games == 2430
    with pytest.raises(ValueError):
        YearConfig(2019, 3, 3)
    with pytest.raises(ValueError):
        YearConfig(2019, 1, 4)
