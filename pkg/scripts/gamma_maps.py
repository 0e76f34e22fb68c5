"""Husimi images of Gamma for the simple dissipation channel and sloppy noise."""

import argparse
import json

from torusnoise.experiments import ExperimentConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/gamma_maps")
    ap.add_argument("--n", type=int, default=64)
    args = ap.parse_args()
    jobs = {f"sdc_alpha{a:g}": {"type": "sdc", "eps": 0.5, "alpha": a} for a in (0.1, 0.25, 0.5, 0.75, 0.9)}
    jobs["sloppy_delta0.25"] = {"type": "sloppy", "delta": 0.25}
    for name, spec in jobs.items():
        s = run(ExperimentConfig("gamma-map", n=args.n, out=f"{args.out}/{name}", channel=spec))
        print(name, json.dumps({k: s[k] for k in ("eta", "light_fraction")}))


if __name__ == "__main__":
    main()
