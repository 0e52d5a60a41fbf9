"""Six-panel sweep for the lone-relevant-foreign-feature scenario.

Varies one data property at a time around the fixed point
(n_s, n_r, d_s, d_r) = (1000, 40, 4, 4), p = 0.1, and writes one tidy CSV
per panel with the average test error and net variance of each approach.

    python3 scripts/onexr_panels.py --family tree_gini --runs 100 --out out/onexr
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
    "p": [0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5],
    "xr_domain_size": [2, 4, 8, 16],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="tree_gini")
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="out/onexr")
    ap.add_argument("--panels", nargs="*", default=list(PANELS))
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = SimConfig(1000, 40, 4, 4)
    scenario = ScenarioSpec("onexr", p=0.1)
    for param in args.panels:
        report = run_monte_carlo(
            base, scenario, param, PANELS[param],
            approaches=("JoinAll", "NoJoin", "NoFK"),
            family=args.family, runs=args.runs, master_seed=args.seed,
            jobs=args.jobs,
        )
        path = out / f"onexr_{args.family}_{param}.csv"
        report.write_csv(path)
        print(path)


if __name__ == "__main__":
    main()
