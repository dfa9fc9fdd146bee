"""Seeded benchmark harness at desk scale.

Runs a few replicates of the outlier-detection and signal-restoration
experiments with the deterministic splitmix64 generator (replicate r
always draws from spawn(r) of the root stream, so reports do not depend
on the thread count) and writes the aggregated method/metric tables as
CSV.
"""

import argparse
import os

from stcf.bench import run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="demo_out")
    ap.add_argument("--replicates", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)

    rep = run_experiment("outliers", replicates=args.replicates, seed=args.seed,
                         threads=args.threads, n=60, fracs=(0.1, 0.6), lam=6.25)
    print("outliers (%d replicates, %.1fs): masking at 60%%: exact %.1f%%, ipod %.1f%%"
          % (rep.replicates, rep.elapsed,
             rep.mean_of("exact", "masking_o60"), rep.mean_of("ipod", "masking_o60")))
    path = os.path.join(args.outdir, "bench_outliers.csv")
    rep.to_csv(path)
    print("wrote", path)

    rep = run_experiment("signal", replicates=args.replicates, seed=args.seed,
                         threads=args.threads)
    print("signal (%d replicates, %.1fs): rmse ccd %.3f, imo %.3f, dc %.3f"
          % (rep.replicates, rep.elapsed, rep.mean_of("ccd", "rmse"),
             rep.mean_of("imo", "rmse"), rep.mean_of("dc", "rmse")))
    path = os.path.join(args.outdir, "bench_signal.csv")
    rep.to_csv(path)
    print("wrote", path)


if __name__ == "__main__":
    main()
