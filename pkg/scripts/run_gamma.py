#!/usr/bin/env python3
"""Discrete-vs-continuum energy ratio experiment for both test cases.

For i.i.d. uniform samples on the unit square, evaluates the graph energy of a
fixed function and compares it to the predicted continuum limit; the ratio
should approach 1 as the sample size grows.
"""

import argparse
import statistics

from gms.continuum import SmoothCase, StepCase, gamma_experiment
from gms.core import ZetaSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", default="1000,4000,16000,64000")
    ap.add_argument("--seeds", default="0,1,2,3,4")
    ap.add_argument("--cases", default="smooth,step")
    args = ap.parse_args()

    n_list = [int(s) for s in args.n.split(",")]
    seeds = [int(s) for s in args.seeds.split(",")]
    spec = ZetaSpec("ms_arctan")
    for name in args.cases.split(","):
        case = SmoothCase() if name == "smooth" else StepCase()
        ratios = {n: [] for n in n_list}
        for seed in seeds:
            for row in gamma_experiment(case, n_list, spec, seed=seed):
                ratios[row["n"]].append(row["ratio"])
        print(f"case={name}")
        for n in n_list:
            med = statistics.median(ratios[n])
            print(f"  n={n:>6d}  median ratio={med:.4f}  (seeds: "
                  + " ".join(f"{r:.3f}" for r in ratios[n]) + ")")


if __name__ == "__main__":
    main()
