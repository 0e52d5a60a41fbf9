"""Replicated-foreign-feature sweeps: vary d_r at a high and a low tuple ratio.

Replication inflates the number of distinct foreign keys relative to
distinct foreign rows, probing whether that confuses a model that leans on
the key alone.

    python3 scripts/reponexr_panels.py --family rbf_svm --runs 100 --out out/reponexr
"""

import argparse
from pathlib import Path

from joinsafe.montecarlo import run_monte_carlo
from joinsafe.simulate import ScenarioSpec, SimConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="tree_gini")
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="out/reponexr")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for tag, n_r in (("ratio25", 40), ("ratio5", 200)):
        base = SimConfig(1000, n_r, 4, 4)
        report = run_monte_carlo(
            base, ScenarioSpec("reponexr", p=0.1), "d_r", [1, 2, 4, 6, 8],
            approaches=("JoinAll", "NoJoin", "NoFK"),
            family=args.family, runs=args.runs, master_seed=args.seed,
            jobs=args.jobs,
        )
        path = out / f"reponexr_{tag}_{args.family}.csv"
        report.write_csv(path)
        print(path)


if __name__ == "__main__":
    main()
