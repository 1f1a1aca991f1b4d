"""How often the table-style cone case split disagrees with the exact projection.

    python scripts/case_split_divergence.py --samples 100000
"""

import argparse

import numpy as np

from cone_rendezvous import PlanePoint, ReachabilityCone, SpaceTimePoint, contains
from cone_rendezvous.geometry import project_cone, project_cone_paper


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--speeds", type=float, nargs="+", default=[0.25, 0.5, 1.0, 2.0, 4.0, 10.0])
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'speed':>6} {'differ':>8} {'infeasible':>11} {'worst_extra_m':>14}")
    for speed in args.speeds:
        cone = ReachabilityCone(PlanePoint(0, 0), speed)
        differ = infeasible = 0
        worst = 0.0
        for x, y, t in rng.uniform(-100, 100, (args.samples, 3)):
            q = SpaceTimePoint(x, y, t)
            exact, table = project_cone(cone, q), project_cone_paper(cone, q)
            if exact != table:
                differ += 1
                if not contains(cone, table, 1e-9):
                    infeasible += 1
                else:
                    worst = max(worst, q.distance_to(table) - q.distance_to(exact))
        print(f"{speed:>6g} {differ:>8} {infeasible:>11} {worst:>14.4f}")


if __name__ == "__main__":
    main()
