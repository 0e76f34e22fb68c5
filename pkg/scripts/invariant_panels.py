"""Montage of invariant states of the noisy standard map over an (eps, alpha) grid."""

import argparse

from torusnoise.experiments import ExperimentConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/invariant_panels")
    ap.add_argument("--n", type=int, default=64)
    args = ap.parse_args()
    N = args.n
    cfg = ExperimentConfig("invariant", n=N, out=args.out, grid=(128, 128),
                           map={"type": "standard", "k": 0.065},
                           sweep={"eps": [0.1, 0.4, 0.8], "alpha": [1 / N, 0.25, 0.5, 0.9]})
    s = run(cfg)
    for p in s["panels"]:
        r = p["report"]
        print(f"eps={p['eps']:<4} alpha={p['alpha']:<8.4g} eta={p['eta']:<10.4g} "
              f"iterations={r['iterations']:<5} converged={r['converged']} "
              f"purity={r['purity_trace'][-1]:.4f}")


if __name__ == "__main__":
    main()
