"""Foreign-key practicality experiments on simulated data.

Part 1 sweeps the compression budget and reports the conditional label
entropy (and, with --evaluate, the holdout accuracy) of sort-based
compression against random hashing averaged over five seeds.  Part 2 sweeps
the unseen-FK fraction and compares no smoothing, random reassignment, and
foreign-row (l0) reassignment.

    python3 scripts/fk_practicality.py --out out/fk --evaluate
"""

import argparse
import csv
from pathlib import Path

from joinsafe.experiments import compression_trial, smoothing_trial
from joinsafe.simulate import ScenarioSpec, SimConfig, gen_onexr
from joinsafe.star import NO_JOIN, apply_feature_view


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budgets", nargs="*", type=int, default=[2, 4, 8, 16])
    ap.add_argument("--fractions", nargs="*", type=float, default=[0.1, 0.3, 0.5, 0.7, 0.9])
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--evaluate", action="store_true")
    ap.add_argument("--out", default="out/fk")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = SimConfig(1000, 40, 4, 4, seed=args.seed)
    scenario = ScenarioSpec("onexr", p=0.1)

    tr, va, te = gen_onexr(cfg, scenario)
    train = apply_feature_view(tr, NO_JOIN)
    val = apply_feature_view(va, NO_JOIN)
    test = apply_feature_view(te, NO_JOIN)
    results = compression_trial(train, val, test, "fk", args.budgets,
                                evaluate=args.evaluate)
    path = out / "compression.csv"
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["budget", "method", "conditional_entropy_bits", "test_accuracy"])
        for r in results:
            w.writerow([r.budget, r.method, repr(r.conditional_entropy_bits),
                        "" if r.test_accuracy is None else repr(r.test_accuracy)])
    print(path)

    path = out / "smoothing.csv"
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["unseen_fraction", "method", "test_error", "trials"])
        for gamma in args.fractions:
            for r in smoothing_trial(cfg, scenario, gamma, trials=args.trials,
                                     master_seed=args.seed):
                w.writerow([r.unseen_fraction, r.method, repr(r.test_error), r.trials])
    print(path)


if __name__ == "__main__":
    main()
