"""Dense-pattern-table scenario sweeps (zero Bayes error, all features relevant).

Same four data-property panels as the lone-feature scenario.

    python3 scripts/xsxr_panels.py --runs 100 --out out/xsxr
"""

import argparse
from pathlib import Path

from joinsafe.montecarlo import run_monte_carlo
from joinsafe.simulate import ScenarioSpec, SimConfig

PANELS = {
    "n_s": [50, 100, 200, 500, 1000, 2000],
    "n_r": [10, 20, 40, 100, 200, 333],
    "d_s": [1, 2, 4, 6, 8],
    "d_r": [1, 2, 4, 6, 8],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="tree_gini")
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="out/xsxr")
    ap.add_argument("--panels", nargs="*", default=list(PANELS))
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = SimConfig(1000, 40, 4, 4)
    for param in args.panels:
        report = run_monte_carlo(
            base, ScenarioSpec("xsxr"), param, PANELS[param],
            approaches=("JoinAll", "NoJoin", "NoFK"),
            family=args.family, runs=args.runs, master_seed=args.seed,
            jobs=args.jobs,
        )
        path = out / f"xsxr_{args.family}_{param}.csv"
        report.write_csv(path)
        print(path)


if __name__ == "__main__":
    main()
