"""Invariant state of the noisy standard map next to the classical attractor."""

import argparse
import json

from torusnoise.experiments import ExperimentConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/attractor")
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    common = dict(n=args.n, seed=args.seed, grid=(128, 128),
                  map={"type": "standard", "k": 0.065},
                  channel={"type": "sdc", "eps": 0.4, "alpha": 1 / args.n},
                  classical={"k": 0.065, "delta": 0.6})
    q = run(ExperimentConfig("invariant", out=f"{args.out}/quantum", **common))
    c = run(ExperimentConfig("classical", out=f"{args.out}/classical", **common))
    cmp = run(ExperimentConfig("compare", out=args.out, **common,
                               inputs={"quantum": f"{args.out}/quantum/invariant.csv",
                                       "classical": f"{args.out}/classical/classical.csv"}))
    print(json.dumps({"iterations": q["report"]["iterations"], "eta": q["eta"],
                      "occupied_fraction": c["occupied_fraction"],
                      "pearson": cmp["pearson"], "top_overlap": cmp["top_overlap"]}, indent=2))


if __name__ == "__main__":
    main()
