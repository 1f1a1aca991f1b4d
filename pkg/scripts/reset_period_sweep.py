"""Final error against the oracle as a function of the Bregman reset period.

Fewer Dykstra cycles between plane projections give a cheaper but biased
intersection projection, so the limit drifts from the true optimum.

    python scripts/reset_period_sweep.py --periods 5 10 20 50 100 200 --interactions 20000
"""

import argparse
import csv
import sys

from cone_rendezvous import RendezvousProblem, ScenarioConfig, consensus_estimate, oracle_solve, run_ring

FIVE = RendezvousProblem.from_arrays(
    [(0, 0), (100, 20), (150, 200), (50, 50), (20, 170)], [5, 7, 10, 6, 4]
)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--periods", type=int, nargs="+", default=[5, 10, 20, 50, 100, 200])
    parser.add_argument("--interactions", type=int, default=20_000)
    parser.add_argument("--csv", help="also write the table here")
    args = parser.parse_args()

    point, time = oracle_solve(FIVE)
    rows = []
    for period in args.periods:
        trace = run_ring(ScenarioConfig(FIVE, (period,) * FIVE.n, args.interactions), point)
        try:
            agreed, agreed_time, spread = consensus_estimate(trace)
        except ValueError:
            print(f"period {period}: no reset within {args.interactions} interactions", file=sys.stderr)
            continue
        rows.append((period, agreed.distance_to(point), agreed_time - time, spread))

    print(f"{'period':>7} {'error_m':>12} {'time_err_s':>12} {'spread_m':>10}")
    for period, err, dt, spread in rows:
        print(f"{period:>7} {err:>12.3e} {dt:>12.3e} {spread:>10.1e}")
    if args.csv:
        with open(args.csv, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["period", "error_m", "time_error_s", "spread_m"])
            writer.writerows(rows)


if __name__ == "__main__":
    main()
