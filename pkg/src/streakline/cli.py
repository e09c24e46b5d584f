"""Command-line entry point: ``streakline {ingest,streaks,fit,simulate,estimate}``.

Exit codes: 0 success, 2 input error, 3 numerical failure, 4 infeasible
configuration.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import os
import shutil
import sys
import tempfile
import time
from collections import Counter
from pathlib import Path

from . import __version__
from .core import YearConfig
from .ingest import (
    EmptyInputError,
    GameLogError,
    GameLogFormat,
    UnknownFormatError,
    build_team_seasons,
    default_year_config,
    read_game_logs,
    write_simple_csv,
    year_configs_from_data,
)
from .models import fit_bivariate, fit_simple, load_model, model_from_dict
from .schedule import InfeasibleConfigError, PairingFailureError, SeriesDistribution
from .sim import (
    InvalidRangeError,
    SimConfig,
    compare_to_history,
    default_threads,
    era_histogram,
    era_to_json,
    naive_estimate,
    run_replicates,
    stats_to_json,
    write_era_csv,
    write_year_stats_csv,
    year_stats,
)
from .streaks import (
    AllGames,
    InStreakOfOrder,
    InvalidOrderError,
    pair_count,
    pair_probability,
    run_total_stats,
    streak_spans_by_year,
    streak_table,
)
from .weibull import FitOptions

log = logging.getLogger("streakline")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_INFEASIBLE = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _parse_orders(text: str) -> list[int]:
    try:
        orders = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"bad --orders value {text!r}") from None
    if not orders or min(orders) < 2:
        raise CliError(f"streak orders must be >= 2, got {text!r}")
    return orders


def _load_games(paths, fmt=None):
    try:
        return read_game_logs(paths, GameLogFormat.parse(fmt) if fmt else None)
    except (GameLogError, UnknownFormatError, EmptyInputError, OSError) as exc:
        raise CliError(str(exc)) from None


def one_in(p: float) -> str:
    """'1 in N' text; thousands separators only from five digits up."""
    n = round(1 / p)
    return f"1 in {n:,}" if n >= 10_000 else f"1 in {n}"


def format_probability(p: float) -> str:
    mant, _, exp = f"{p:.6g}".partition("e")
    text = f"{mant}e{int(exp)}" if exp else mant
    return f"{text} ({one_in(p)})"


def cmd_ingest(args) -> int:
    games = _load_games(args.inputs, args.format)
    out = Path(args.output)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        write_simple_csv(games, fh)
    per_year = Counter(g.year for g in games)
    teams: dict[int, set] = {}
    for g in games:
        teams.setdefault(g.year, set()).update((g.home, g.away))
    print("year,games,teams")
    for year in sorted(per_year):
        print(f"{year},{per_year[year]},{len(teams[year])}")
    print(f"total,{len(games)},")
    return EXIT_OK


def cmd_streaks(args) -> int:
    orders = _parse_orders(args.orders)
    games = _load_games([args.gamelog], args.format)
    if not games:
        raise CliError("game log is empty")
    seasons = build_team_seasons(games)
    table = streak_table(seasons, orders)

    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["year", "order", "count"])
        for n in orders:
            for year, count in table[n].items():
                w.writerow([year, n, count])
        for n in orders:
            w.writerow(["total", n, sum(table[n].values())])
    finally:
        if out is not sys.stdout:
            out.close()

    report = sys.stderr if not args.output else sys.stdout
    print(f"games: {len(games)}  team-seasons: {len(seasons)}  pairs: {pair_count(seasons)}", file=report)
    try:
        print(f"order-2 pair probability: {pair_probability(seasons):.4f}", file=report)
    except ZeroDivisionError:
        pass
    print("selection,mean,std,games", file=report)
    for label, sel in (("all", AllGames()), ("order-2", InStreakOfOrder(2)), ("order-3", InStreakOfOrder(3))):
        try:
            st = run_total_stats(seasons, sel)
        except ValueError:
            continue
        print(f"{label},{st.mean:.6g},{st.std_dev:.6g},{st.count}", file=report)
    for n in orders:
        if n >= 4:
            for year, spans in streak_spans_by_year(seasons, n).items():
                for sp in spans:
                    print(f"order-{n}: {year} {sp.team} {sp.scored}-{sp.allowed} from game {sp.start_index + 1}",
                          file=report)
    return EXIT_OK


def cmd_fit(args) -> int:
    games = _load_games([args.gamelog], args.format)
    if not games:
        raise CliError("game log is empty")
    opts = FitOptions()
    if args.mode == "simple":
        model, info = fit_simple(games, opts=opts)
        doc = model.to_dict()
        doc["home"]["objective"] = info["home_objective"]
        doc["away"]["objective"] = info["away_objective"]
        doc["diagnostics"] = info
        converged = info["converged"]
    else:
        model = fit_bivariate(games, min_count=args.min_count, opts=opts)
        doc = model.to_dict()
        converged = True
    with open(args.output, "w") as fh:
        json.dump(doc, fh, indent=1)
    if not converged:
        raise CliError("optimizer did not converge in any restart", EXIT_NUMERIC)
    print(f"wrote {args.mode} model to {args.output}")
    return EXIT_OK


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _resolve(base: Path, value) -> Path | None:
    if not value:
        return None
    p = Path(value)
    return p if p.is_absolute() else base / p


def load_sim_config(path: Path) -> tuple[dict, SimConfig, object, dict | None, list[Path]]:
    """Parse a simulation config JSON.

    Returns (raw config, SimConfig, model or {year: model}, historic counts
    {order: {year: count}} or None, input files used).
    """
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read config: {exc}") from None
    base = Path(path).resolve().parent
    inputs = [Path(path)]
    games = None
    gamelog = _resolve(base, raw.get("gamelog"))
    if gamelog:
        games = _load_games([gamelog])
        inputs.append(gamelog)

    years_spec = raw.get("years", "from_gamelog")
    if years_spec == "from_gamelog":
        if games is None:
            raise CliError("years: 'from_gamelog' needs a gamelog")
        years = year_configs_from_data(games)
    elif isinstance(years_spec, dict):
        years = [default_year_config(y) for y in range(int(years_spec["first"]), int(years_spec["last"]) + 1)]
    else:
        try:
            years = [YearConfig(int(y["year"]), int(y["num_teams"]), int(y["games_per_team"])) for y in years_spec]
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError(f"bad years entry: {exc}", EXIT_INFEASIBLE) from None

    try:
        sim = SimConfig(
            years=tuple(years),
            reps=int(raw.get("reps", 10_000)),
            model=raw.get("model", "bivariate"),
            schedule=raw.get("schedule", "realistic"),
            series_dist=SeriesDistribution(raw["series_dist"]) if raw.get("series_dist") else SeriesDistribution(),
            orders=tuple(raw.get("orders", (2, 3, 4))),
            seed=int(raw.get("seed", 0)),
            per_year_refit=bool(raw.get("per_year_refit", False)),
        )
    except ValueError as exc:
        raise CliError(f"bad simulation config: {exc}") from None

    model_path = _resolve(base, raw.get("model_path"))
    if isinstance(raw.get("model_params"), dict):
        model = model_from_dict(raw["model_params"])
    elif model_path:
        model = load_model(model_path)
        inputs.append(model_path)
    elif games is not None:
        if sim.model.value == "simple":
            model = fit_simple(games)[0]
        else:
            model = fit_bivariate(games)
    else:
        raise CliError("config needs model_path, model_params, or a gamelog to fit from")
    if model.to_dict()["kind"] != sim.model.value:
        raise CliError(f"model file holds a {model.to_dict()['kind']} model, config asks for {sim.model.value}")

    if sim.per_year_refit:
        if games is None:
            raise CliError("per_year_refit needs a gamelog")
        by_year: dict[int, list] = {}
        for g in games:
            by_year.setdefault(g.year, []).append(g)
        fitter = (lambda gs: fit_simple(gs)[0]) if sim.model.value == "simple" else fit_bivariate
        model = {cfg.year: fitter(by_year[cfg.year]) if cfg.year in by_year else model for cfg in sim.years}

    historic = streak_table(build_team_seasons(games), sim.orders) if games is not None else None
    return raw, sim, model, historic, inputs


def cmd_simulate(args) -> int:
    t0 = time.time()
    raw, sim, model, historic, inputs = load_sim_config(Path(args.config))
    out_dir = Path(args.output_dir or raw.get("output_dir") or "sim_output")
    threads = args.threads if args.threads else default_threads()
    if os.environ.get("STREAKLINE_THREADS"):
        threads = default_threads()
    era_orders = raw.get("era", [])
    if era_orders is True:
        era_orders = list(sim.orders)
    era_orders = [int(n) for n in era_orders or []]
    for n in era_orders:
        if n not in sim.orders:
            raise CliError(f"era order {n} is not among the simulated orders")

    out_dir.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".streakline-", dir=out_dir.parent))
    try:
        try:
            results = run_replicates(sim, model, threads=threads)
        except (InfeasibleConfigError, PairingFailureError) as exc:
            raise CliError(f"infeasible schedule configuration: {exc}", EXIT_INFEASIBLE) from None
        stats = year_stats(results, sim, historic)
        with open(tmp / "year_stats.csv", "w", newline="") as fh:
            write_year_stats_csv(stats, fh)
        (tmp / "year_stats.json").write_text(stats_to_json(stats))
        for n in era_orders:
            hist = era_histogram(results, sim, n)
            with open(tmp / f"era_order{n}.csv", "w", newline="") as fh:
                write_era_csv(hist, fh)
            (tmp / f"era_order{n}.json").write_text(era_to_json(hist))
        if historic:
            report = {}
            for n in sim.orders:
                try:
                    cmp = compare_to_history([s for s in stats if s.order == n], historic[n])
                except ValueError:
                    continue
                report[str(n)] = cmp.to_dict()
            (tmp / "comparison.json").write_text(json.dumps(report, indent=1, sort_keys=True))
        manifest = {
            "tool": "streakline",
            "version": __version__,
            "config": raw,
            "resolved_config": sim.to_dict(),
            "inputs": {str(p): _sha256(p) for p in inputs},
            "seed": sim.seed,
            "threads": threads,
            "duration_s": round(time.time() - t0, 3),
        }
        (tmp / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
        if out_dir.exists():
            shutil.rmtree(out_dir)
        tmp.rename(out_dir)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    print(f"wrote {out_dir}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    try:
        p = naive_estimate(args.min, args.max, args.repeats)
    except InvalidRangeError as exc:
        raise CliError(str(exc)) from None
    print(format_probability(p))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="streakline", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize game logs to the simple CSV format")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--format", choices=["simple", "retrosheet"])
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("streaks", help="count historical same-score streaks")
    p.add_argument("gamelog")
    p.add_argument("--orders", default="2,3,4")
    p.add_argument("--format", choices=["simple", "retrosheet"])
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_streaks)

    p = sub.add_parser("fit", help="fit a score model")
    p.add_argument("gamelog")
    p.add_argument("--mode", choices=["simple", "bivariate"], default="simple")
    p.add_argument("--min-count", type=int, default=20)
    p.add_argument("--format", choices=["simple", "retrosheet"])
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="run Monte Carlo season ensembles")
    p.add_argument("config")
    p.add_argument("--output-dir")
    p.add_argument("--threads", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="uniform-score back-of-envelope probability")
    p.add_argument("min", type=int)
    p.add_argument("max", type=int)
    p.add_argument("repeats", type=int)
    p.set_defaults(func=cmd_estimate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"streakline: error: {exc}", file=sys.stderr)
        return exc.code
    except InvalidOrderError as exc:
        print(f"streakline: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
