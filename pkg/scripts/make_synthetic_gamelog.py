"""Write a simulated 1901-2019 league history as a simple-CSV game log.

The real game log is not redistributed with this package. This stand-in
runs every downstream tool end to end; its streak counts are whatever the
chosen model produces, not the historical ones.

    python scripts/make_synthetic_gamelog.py -o synthetic_games.csv
"""

import argparse
from dataclasses import dataclass

from streakline.ingest import default_year_config, write_simple_csv
from streakline.models import SimpleWeibullModel, load_model
from streakline.sim import ScheduleKind, synthetic_game_log
from streakline.weibull import WeibullParams


@dataclass
class Config:
    first: int = 1901
    last: int = 2019
    seed: int = 1
    schedule: str = "realistic"
    model_path: str | None = None


# near published baseball fits; good enough for a plausible-looking log
HOME = WeibullParams(scale=5.787, location=-0.287, shape=1.832)
AWAY = WeibullParams(scale=5.564, location=-0.231, shape=1.674)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-o", "--output", required=True)
    ap.add_argument("--first", type=int, default=Config.first)
    ap.add_argument("--last", type=int, default=Config.last)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--schedule", choices=["basic", "realistic"], default=Config.schedule)
    ap.add_argument("--model", dest="model_path", help="model JSON from `streakline fit`")
    cfg = Config(**{k: v for k, v in vars(ap.parse_args()).items() if k != "output"})
    out = ap.parse_args().output

    model = load_model(cfg.model_path) if cfg.model_path else SimpleWeibullModel(HOME, AWAY)
    years = [default_year_config(y) for y in range(cfg.first, cfg.last + 1)]
    games = synthetic_game_log(years, model, ScheduleKind(cfg.schedule), seed=cfg.seed)
    with open(out, "w", newline="") as fh:
        write_simple_csv(games, fh)
    print(f"wrote {len(games)} games for {len(years)} seasons to {out}")


if __name__ == "__main__":
    main()
