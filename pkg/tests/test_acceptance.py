"""Acceptance criteria, one test each, each reporting a single PASS/FAIL/SKIP line.

Criteria 5-8 need a real 1901-2019 game log. Point STREAKLINE_GAMELOG at a
simple-CSV or Retrosheet file (or a directory of them) to run them;
otherwise they skip. Their code path is exercised on synthetic data by
``test_data_pipeline_smoke``.
"""

import math
import time
from functools import lru_cache

import numpy as np
import pytest
from scipy.integrate import quad

from streakline.cli import main
from streakline.core import TeamGameView, TeamSeason, YearConfig, team_id
from streakline.ingest import build_team_seasons, read_game_logs, year_configs_from_data
from streakline.models import fit_bivariate, fit_simple
from streakline.sim import (
    ModelKind,
    ScheduleKind,
    SimConfig,
    compare_to_history,
    default_threads,
    era_histogram,
    naive_estimate,
    run_replicates,
    synthetic_game_log,
    year_stats,
)
from streakline.streaks import (
    AllGames,
    EmptySelectionError,
    InStreakOfOrder,
    find_streaks,
    league_streak_counts,
    pair_count,
    pair_probability,
    run_total_stats,
    streak_spans_by_year,
    streak_table,
)
from streakline.weibull import WeibullParams, cdf, discrete_pmf, fit, pdf

from conftest import ACCEPTANCE_LINES, chi2_pvalue, gamelog_path, synthetic_emp

DATA_REPS = 10_000


def report(num: int, ok: bool | None, detail: str) -> None:
    status = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
    line = f"criterion {num:>2} {status}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def check(num: int, ok: bool, detail: str) -> None:
    report(num, ok, detail)
    assert ok, detail


def need_gamelog(num: int, what: str):
    path = gamelog_path()
    if path is None:
        report(num, None, f"{what}: set STREAKLINE_GAMELOG to a 1901-2019 game log")
        pytest.skip("STREAKLINE_GAMELOG not set")
    return path


@lru_cache(maxsize=None)
def _history(path):
    games = read_game_logs([path])
    games = [g for g in games if 1901 <= g.year <= 2019]
    return games, build_team_seasons(games)


@lru_cache(maxsize=None)
def _simulation(path, model_kind: str, schedule_kind: str, reps: int):
    games, seasons = _history(path)
    sim = SimConfig(tuple(year_configs_from_data(games)), reps=reps, model=model_kind,
                    schedule=schedule_kind, orders=(2, 3, 4), seed=20190610)
    model = fit_simple(games)[0] if model_kind == "simple" else fit_bivariate(games)
    results = run_replicates(sim, model, threads=default_threads())
    historic = streak_table(seasons, sim.orders)
    return sim, results, historic


# -- 1 ---------------------------------------------------------------------


def _brute_force(scores, n):
    return [i for i in range(len(scores) - n + 1) if all(scores[i + k] == scores[i] for k in range(n))]


def test_criterion_01_streak_oracle():
    rng = np.random.default_rng(1)
    opp = team_id("OPP")
    t0 = time.perf_counter()
    mismatches = 0
    import datetime as dt

    day0 = dt.date(2019, 4, 1)
    for _ in range(10_000):
        length = int(rng.integers(0, 21))
        scores = []
        while len(scores) < length:
            s, a = (int(x) for x in rng.integers(0, 6, size=2))
            if s != a:
                scores.append((s, a))
        views = [TeamGameView(s, a, opp, True, day0 + dt.timedelta(days=i), 0) for i, (s, a) in enumerate(scores)]
        season = TeamSeason(team_id("AAA"), 2019, views)
        for n in range(2, 6):
            if [sp.start_index for sp in find_streaks(season, n)] != _brute_force(scores, n):
                mismatches += 1
    elapsed = time.perf_counter() - t0
    check(1, mismatches == 0 and elapsed < 10,
          f"streak oracle: {mismatches} mismatches over 10,000 seasons x orders 2-5 in {elapsed:.1f}s (< 10s)")


# -- 2 ---------------------------------------------------------------------


def test_criterion_02_weibull_math():
    rng = np.random.default_rng(2)
    worst_cdf = worst_tel = 0.0
    for _ in range(1000):
        p = WeibullParams(rng.uniform(0.5, 10), rng.uniform(-2, 2), rng.uniform(0.8, 6))
        x = p.location + rng.uniform(0, 4) * p.scale
        val, _ = quad(pdf, p.location, x, args=(p,), epsabs=1e-12, epsrel=1e-12, limit=200)
        worst_cdf = max(worst_cdf, abs(cdf(x, p) - val))
        n = int(rng.integers(0, 31))
        tel = discrete_pmf(np.arange(n + 1), p).sum() - (cdf(n + 1.0, p) - cdf(0.0, p))
        worst_tel = max(worst_tel, abs(tel))
    p0 = discrete_pmf(0, WeibullParams(1.0, 0.0, 1.0))
    exp_err = abs(p0 - (1 - math.exp(-1)))
    ok = worst_cdf <= 1e-6 and worst_tel <= 1e-12 and exp_err <= 1e-12
    check(2, ok, f"weibull math: cdf vs quadrature max err {worst_cdf:.1e} (<= 1e-6), "
                 f"telescoping max err {worst_tel:.1e} (<= 1e-12), exponential P(0) err {exp_err:.1e}")


# -- 3 ---------------------------------------------------------------------


def test_criterion_03_fit_recovery():
    truth = WeibullParams(4.0, -0.5, 1.7)
    t0 = time.perf_counter()
    emp = synthetic_emp(truth, 10**6, seed=0)
    res = fit(emp)
    elapsed = time.perf_counter() - t0
    p = res.params
    errs = (abs(p.scale - 4.0), abs(p.location + 0.5), abs(p.shape - 1.7))
    ok = max(errs) <= 0.05 and res.objective < 1e-6 and elapsed < 30
    check(3, ok, f"fit recovery: scale {p.scale:.4f} location {p.location:.4f} shape {p.shape:.4f} "
                 f"(max err {max(errs):.4f} <= 0.05), objective {res.objective:.2e} (< 1e-6), {elapsed:.1f}s")


# -- 4 ---------------------------------------------------------------------


def test_criterion_04_sampler_consistency(stand_in_model, bivariate_model):
    parts, ok = [], True
    for name, model, seed in (("simple", stand_in_model, 40), ("bivariate", bivariate_model, 41)):
        h, a = model.sample(np.random.default_rng(seed), 10**6)
        ties = int((h == a).sum())
        pv = chi2_pvalue(model, h, a)
        ok &= ties == 0 and pv > 0.001
        parts.append(f"{name} p={pv:.3f} ties={ties}")
    check(4, ok, "sampler/pmf chi-squared at alpha=0.001: " + ", ".join(parts))


# -- 5 ---------------------------------------------------------------------

HISTORY_TARGETS = {
    "games": 199_692, "order2": 5_313, "order3": 134, "order4": 3, "order2_2019": 56,
}


def historical_checks(games, seasons):
    """Return (hard failures, flagged deviations, summary) against the published counts."""
    fail, flag = [], []
    orders = {n: sum(league_streak_counts(seasons, n).values()) for n in (2, 3, 4)}
    o4_years = sorted(streak_spans_by_year(seasons, 4))
    got = {"games": len(games), "order2": orders[2], "order3": orders[3], "order4": orders[4],
           "order2_2019": league_streak_counts(seasons, 2).get(2019, 0)}
    for key, want in HISTORY_TARGETS.items():
        if got[key] != want:
            # alternative sources differ by a handful of games; flag small gaps
            (flag if abs(got[key] - want) <= max(0.02 * want, 1) else fail).append(f"{key} {got[key]} vs {want}")
    if o4_years != [1958, 1961, 2008]:
        flag.append(f"order-4 years {o4_years}")
    pp = pair_probability(seasons)
    if abs(pp - 0.0376) > 0.0005:
        fail.append(f"pair probability {pp:.4f}")
    for sel, m, s in ((AllGames(), 8.81, 4.60), (InStreakOfOrder(2), 6.84, 3.29), (InStreakOfOrder(3), 5.79, 2.70)):
        try:
            st = run_total_stats(seasons, sel)
        except EmptySelectionError:
            fail.append(f"{sel}: no games")
            continue
        if abs(st.mean - m) > 0.02 or abs(st.std_dev - s) > 0.02:
            fail.append(f"{sel}: mean {st.mean:.2f} std {st.std_dev:.2f} vs {m}/{s}")
    summary = (f"games {got['games']}, order-2/3/4 {orders[2]}/{orders[3]}/{orders[4]}, "
               f"pairs {pair_count(seasons)}, pair prob {pp:.4f}, 2019 order-2 {got['order2_2019']}")
    return fail, flag, summary


@pytest.mark.data
def test_criterion_05_historical_reproduction():
    path = need_gamelog(5, "historical reproduction")
    t0 = time.perf_counter()
    games, seasons = _history(path)
    fail, flag, summary = historical_checks(games, seasons)
    elapsed = time.perf_counter() - t0
    if elapsed >= 60:
        fail.append(f"runtime {elapsed:.0f}s")
    note = f"; flagged: {'; '.join(flag)}" if flag else ""
    note += f"; failed: {'; '.join(fail)}" if fail else ""
    check(5, not fail, f"history: {summary}, {elapsed:.0f}s{note}")


# -- 6 / 7 -----------------------------------------------------------------


def band_checks(cmp, targets):
    """targets: {field: (expected, tolerance, unit)} with unit 'pct' or 'years'."""
    bad, parts = [], []
    for name, (want, tol, unit) in targets.items():
        got = 100 * cmp.fraction(name) if unit == "pct" else getattr(cmp, name)
        parts.append(f"{name} {got:.1f}{'%' if unit == 'pct' else ' yrs'} (target {want}+/-{tol})")
        if abs(got - want) > tol:
            bad.append(name)
    return bad, ", ".join(parts)


@pytest.mark.data
@pytest.mark.slow
def test_criterion_06_simple_basic_simulation():
    path = need_gamelog(6, "simple+basic simulation")
    sim, results, historic = _simulation(path, "simple", "basic", DATA_REPS)
    stats = [s for s in year_stats(results, sim, historic) if s.order == 2]
    cmp = compare_to_history(stats, historic[2])
    bad, text = band_checks(cmp, {"exceeds_mean": (75, 10, "pct"), "exceeds_max": (10, 5, "years")})
    check(6, not bad, f"simple+basic over {cmp.years} years: {text}")


@pytest.mark.data
@pytest.mark.slow
def test_criterion_07_bivariate_realistic_simulation():
    path = need_gamelog(7, "bivariate+realistic simulation")
    sim, results, historic = _simulation(path, "bivariate", "realistic", DATA_REPS)
    stats = [s for s in year_stats(results, sim, historic) if s.order == 2]
    cmp = compare_to_history(stats, historic[2])
    bad, text = band_checks(cmp, {"exceeds_mean": (56, 10, "pct"), "exceeds_p95": (17, 8, "pct"),
                                  "below_p05": (4, 4, "pct"), "exceeds_max": (0, 0, "years")})
    check(7, not bad, f"bivariate+realistic over {cmp.years} years: {text}")


# -- 8 ---------------------------------------------------------------------


def era_checks(hist):
    targets = {0: 0.144, 1: 0.247, 2: 0.248, 3: 0.172}
    bad = [k for k, v in targets.items() if abs(hist.fraction(k) - v) > 0.03]
    if abs(hist.occurrence_probability - 0.017) > 0.005:
        bad.append("occurrence")
    text = ", ".join(f"P({k})={hist.fraction(k):.3f} (target {v})" for k, v in targets.items())
    return bad, f"{text}, per-year occurrence {100 * hist.occurrence_probability:.2f}% (target 1.7+/-0.5)"


@pytest.mark.data
@pytest.mark.slow
def test_criterion_08_order4_era_histogram():
    path = need_gamelog(8, "order-4 era histogram")
    sim, results, _ = _simulation(path, "bivariate", "realistic", DATA_REPS)
    bad, text = era_checks(era_histogram(results, sim, 4))
    check(8, not bad, f"era of {len(sim.years)} years x {sim.reps} replicates: {text}")


# -- 9 ---------------------------------------------------------------------


def test_criterion_09_determinism(tmp_path, stand_in_model):
    import json

    cfg = {
        "years": [{"year": y, "num_teams": 16, "games_per_team": 154} for y in (1958, 1959, 1960)],
        "reps": 24, "model": "simple", "schedule": "realistic", "orders": [2, 3, 4],
        "seed": 4242, "model_params": stand_in_model.to_dict(), "era": [4],
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    n = max(default_threads(), 2)
    outs = []
    for threads in (1, n):
        out = tmp_path / f"t{threads}"
        assert main(["simulate", str(path), "--output-dir", str(out), "--threads", str(threads)]) == 0
        outs.append(out)
    files = ("year_stats.csv", "era_order4.csv")
    same = all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes() for f in files)
    check(9, same, f"cmd_simulate at 1 and {n} workers: {', '.join(files)} byte-identical={same}")


# -- 10 --------------------------------------------------------------------


def test_criterion_10_naive_estimate():
    got = naive_estimate(50, 89, 3)
    check(10, got == (1 / 1600) ** 2, f"naive estimate span 40, 3 games: {got!r} == (1/1600)^2")


# -- synthetic run of the data-dependent path ------------------------------


def test_data_pipeline_smoke(stand_in_model):
    """Criteria 5-8 code path on a tiny synthetic history; paper targets not asserted."""
    years = [YearConfig(y, 8, 30) for y in (2017, 2018, 2019)]
    games = synthetic_game_log(years, stand_in_model, seed=3)
    seasons = build_team_seasons(games)
    fail, flag, summary = historical_checks(games, seasons)
    assert summary.startswith(f"games {len(games)}")
    assert fail  # synthetic data cannot hit the published counts
    sim = SimConfig(tuple(year_configs_from_data(games)), reps=20, model=ModelKind.SIMPLE,
                    schedule=ScheduleKind.BASIC, orders=(2, 3, 4))
    results = run_replicates(sim, stand_in_model)
    historic = streak_table(seasons, sim.orders)
    stats = [s for s in year_stats(results, sim, historic) if s.order == 2]
    bad, text = band_checks(compare_to_history(stats, historic[2]),
                            {"exceeds_mean": (75, 10, "pct"), "exceeds_max": (10, 5, "years")})
    assert "exceeds_mean" in text
    bad, text = era_checks(era_histogram(results, sim, 4))
    assert "P(0)=" in text
