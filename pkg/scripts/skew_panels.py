"""Foreign-key skew sweeps: Zipf and needle-and-thread.

Panels A/C vary the skew parameter at the fixed point; panels B/D vary the
training size under a fixed skew (Zipf exponent 2, needle probability 0.5).

    python3 scripts/skew_panels.py --runs 100 --out out/skew
"""

import argparse
from pathlib import Path

from joinsafe.montecarlo import run_monte_carlo
from joinsafe.simulate import ScenarioSpec, SimConfig, SkewSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="tree_gini")
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="out/skew")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    base = SimConfig(1000, 40, 4, 4)
    approaches = ("JoinAll", "NoJoin", "NoFK")
    jobs = dict(runs=args.runs, master_seed=args.seed, jobs=args.jobs,
                approaches=approaches, family=args.family)

    panels = [
        ("zipf_param", ScenarioSpec("onexr", p=0.1), "zipf_s", [0.0, 1.0, 2.0, 3.0]),
        ("zipf_ns", ScenarioSpec("onexr", p=0.1, fk_skew=SkewSpec("zipf", s=2.0)),
         "n_s", [50, 100, 200, 500, 1000, 2000]),
        ("needle_param", ScenarioSpec("onexr", p=0.1), "needle_prob",
         [0.1, 0.3, 0.5, 0.7, 0.9]),
        ("needle_ns",
         ScenarioSpec("onexr", p=0.1, fk_skew=SkewSpec("needle_thread", needle_prob=0.5)),
         "n_s", [50, 100, 200, 500, 1000, 2000]),
    ]
    for tag, scenario, param, values in panels:
        report = run_monte_carlo(base, scenario, param, values, **jobs)
        path = out / f"skew_{tag}_{args.family}.csv"
        report.write_csv(path)
        print(path)


if __name__ == "__main__":
    main()
