"""Median wall time per algorithm and tau, relative to tau=1.

    python scripts/bench_tau.py --size 300 --repeats 3 --threads 4
"""
import argparse
import time

import numpy as np

from concurgraph import Params, symmetrize
from concurgraph.bcc import run_bcc
from concurgraph.connectivity import run_cc
from concurgraph.generators import LatticeSpec, gen_lattice
from concurgraph.lelists import run_lelists
from concurgraph.scc import run_scc


def median_time(fn, repeats):
    fn()  # compile and warm
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=300)
    ap.add_argument("--taus", default="1,8,64,512")
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--threads", type=int, default=0)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    taus = [int(t) for t in args.taus.split(",")]

    g = gen_lattice(LatticeSpec(args.size, args.size, seed=args.seed))
    u = symmetrize(g)
    algos = {
        "scc": lambda p: run_scc(g, p),
        "cc": lambda p: run_cc(u, p),
        "bcc": lambda p: run_bcc(u, p),
        "lelists": lambda p: run_lelists(u, None, p),
    }
    print(f"{'algo':8}" + "".join(f"{'tau=' + str(t):>11}" for t in taus))
    for name, fn in algos.items():
        secs = [median_time(lambda: fn(Params(threads=args.threads, seed=args.seed).replace(tau=t)),
                            args.repeats) for t in taus]
        base = secs[taus.index(1)] if 1 in taus else secs[0]
        print(f"{name:8}" + "".join(f"{s / base:>11.2f}" for s in secs)
              + f"   (tau={taus[0]}: {secs[0]:.3f}s)")


if __name__ == "__main__":
    main()
