"""eta against alpha for eps = 0.5 and 0.75, including the saturated alpha = 1/(2N) point."""

import argparse

from torusnoise import io
from torusnoise.experiments import ExperimentConfig, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/eta_sweep")
    ap.add_argument("--n", type=int, default=32)
    args = ap.parse_args()
    N = args.n
    alphas = [1 / (2 * N)] + [k / N for k in range(1, N + 1)]
    run(ExperimentConfig("eta-sweep", n=N, eps=[0.5, 0.75], alphas=alphas, out=args.out))
    for e in (0.5, 0.75):
        header, rows = io.read_csv(f"{args.out}/eta_sweep_eps{e:g}.csv")
        print(f"eps={e}")
        print("  " + "  ".join(f"{h:>14}" for h in header))
        for r in rows:
            print("  " + "  ".join(f"{float(x):14.6g}" for x in r))


if __name__ == "__main__":
    main()
