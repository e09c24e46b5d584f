"""Historical streak table from a game log, next to the published figures.

    python scripts/reproduce_history.py GL1901.TXT ... GL2019.TXT
    python scripts/reproduce_history.py games.csv --per-year years.csv
"""

import argparse
import csv

from streakline.ingest import build_team_seasons, read_game_logs
from streakline.streaks import (
    AllGames,
    InStreakOfOrder,
    league_streak_counts,
    pair_count,
    pair_probability,
    run_total_stats,
    streak_spans_by_year,
    streak_table,
)

PUBLISHED = {
    "games": 199_692,
    "pairs": 141_397,
    "order-2 streaks": 5_313,
    "order-3 streaks": 134,
    "order-4 streaks": 3,
    "order-2 streaks in 2019": 56,
    "pair probability": 0.0376,
}
PUBLISHED_RUNS = {"all": (8.81, 4.60), "order-2": (6.84, 3.29), "order-3": (5.79, 2.70)}


def same_opponent_pairs(seasons) -> int:
    """Consecutive games against the same opponent, each game pair counted once."""
    keys = set()
    for season in seasons:
        for k in range(1, len(season)):
            if season.games[k].opponent == season.games[k - 1].opponent:
                keys.add((season.game_key(k - 1), season.game_key(k)))
    return len(keys)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("inputs", nargs="+", help="game-log files or directories")
    ap.add_argument("--first", type=int, default=1901)
    ap.add_argument("--last", type=int, default=2019)
    ap.add_argument("--per-year", help="write per-year order 2/3/4 counts to this CSV")
    args = ap.parse_args()

    games = [g for g in read_game_logs(args.inputs) if args.first <= g.year <= args.last]
    seasons = build_team_seasons(games)
    totals = {n: sum(league_streak_counts(seasons, n).values()) for n in (2, 3, 4)}
    ours = {
        "games": len(games),
        "pairs": pair_count(seasons),
        "order-2 streaks": totals[2],
        "order-3 streaks": totals[3],
        "order-4 streaks": totals[4],
        "order-2 streaks in 2019": league_streak_counts(seasons, 2).get(2019, 0),
        "pair probability": round(pair_probability(seasons), 4),
    }
    print(f"{'quantity':<26}{'ours':>12}{'published':>12}")
    for key, pub in PUBLISHED.items():
        print(f"{key:<26}{ours[key]:>12}{pub:>12}")

    # the published pair total is far below one per consecutive team game;
    # this alternative count is printed to help reconcile the two
    print(f"{'same-opponent pairs':<26}{same_opponent_pairs(seasons):>12}")

    print(f"\n{'run totals':<12}{'mean':>8}{'std':>8}{'pub mean':>10}{'pub std':>9}")
    for label, sel in (("all", AllGames()), ("order-2", InStreakOfOrder(2)), ("order-3", InStreakOfOrder(3))):
        st = run_total_stats(seasons, sel)
        pm, ps = PUBLISHED_RUNS[label]
        print(f"{label:<12}{st.mean:>8.2f}{st.std_dev:>8.2f}{pm:>10.2f}{ps:>9.2f}")

    print("\norder-4 streaks:")
    for year, spans in streak_spans_by_year(seasons, 4).items():
        for sp in spans:
            print(f"  {year} {sp.team} {sp.scored}-{sp.allowed} starting game {sp.start_index + 1}")

    if args.per_year:
        table = streak_table(seasons, (2, 3, 4))
        with open(args.per_year, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["year", "order2", "order3", "order4"])
            for year in table[2]:
                w.writerow([year, table[2][year], table[3][year], table[4][year]])


if __name__ == "__main__":
    main()
