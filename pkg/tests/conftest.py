import datetime as dt
import os
from pathlib import Path

import pytest

from streakline.core import GameRecord, YearConfig, team_id
from streakline.models import SimpleWeibullModel
from streakline.weibull import WeibullParams

ACCEPTANCE_LINES: list[str] = []

# Stand-in parameters near published baseball run fits; used where a
# fitted 1901-2019 model would be needed but no game log is available.
AWAY = WeibullParams(scale=5.564, location=-0.231, shape=1.674)
HOME = WeibullParams(scale=5.787, location=-0.287, shape=1.832)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def gamelog_path() -> Path | None:
    p = os.environ.get("STREAKLINE_GAMELOG")
    return Path(p) if p else None


@pytest.fixture
def stand_in_model():
    return SimpleWeibullModel(HOME, AWAY)


def point_params(r: int) -> WeibullParams:
    """Parameters whose discretized pmf is a point mass at r."""
    return WeibullParams(scale=0.01, location=r + 0.3, shape=2.0)


@pytest.fixture
def fixed_model():
    return SimpleWeibullModel(point_params(5), point_params(3))


def G(date, home, away, hr, ar, seq=0):
    return GameRecord(dt.date.fromisoformat(date), seq, team_id(home), team_id(away), hr, ar)


@pytest.fixture
def angels_fragment():
    """June 2019: three straight 5-3 Angels wins, two at Dodger Stadium."""
    return [
        G("2019-06-10", "LAD", "LAA", 3, 5),
        G("2019-06-11", "LAD", "LAA", 3, 5),
        G("2019-06-13", "LAA", "TBA", 5, 3),
    ]


@pytest.fixture
def small_years():
    return [YearConfig(2001, 8, 40), YearConfig(2002, 8, 40)]


def synthetic_emp(params, n: int, seed: int = 0):
    """Frequencies of floor(x) over n continuous draws; draws below 0 stay in the denominator."""
    import numpy as np
    from streakline.weibull import MAX_RUNS, EmpiricalRunPmf

    rng = np.random.default_rng(seed)
    x = params.location + params.scale * rng.weibull(params.shape, size=n)
    r = np.floor(x).astype(np.int64)
    r = r[(r >= 0) & (r <= MAX_RUNS)]
    return EmpiricalRunPmf.from_counts(np.bincount(r, minlength=MAX_RUNS + 1), total=n)


def chi2_pvalue(model, home, away) -> float:
    """Goodness of fit of drawn pairs to model.pmf_table(); sparse cells pooled."""
    import numpy as np
    from scipy.stats import chisquare

    table = model.pmf_table()
    n = table.shape[0]
    observed = np.bincount(home * n + away, minlength=n * n).astype(float)
    expected = table.ravel() * len(home)
    big = expected >= 5
    obs = np.append(observed[big], observed[~big].sum())
    exp = np.append(expected[big], expected[~big].sum())
    if exp[-1] == 0:
        obs, exp = obs[:-1], exp[:-1]
    return float(chisquare(obs, exp * obs.sum() / exp.sum()).pvalue)


@pytest.fixture(scope="session")
def bivariate_model():
    """Bivariate model fitted to 200k games drawn from the stand-in simple model."""
    import numpy as np
    from streakline.models import fit_bivariate

    h, a = SimpleWeibullModel(HOME, AWAY).sample(np.random.default_rng(7), 200_000)
    d = dt.date(2000, 6, 1)
    games = [GameRecord(d, 0, team_id("A"), team_id("B"), int(x), int(y)) for x, y in zip(h, a)]
    return fit_bivariate(games)
