"""Search rounds with and without local search on lattices and a long path.

    python scripts/rounds_vs_tau.py --size 500 --taus 1,8,64,512
"""
import argparse

import numpy as np

from concurgraph import Params, build_csr, symmetrize
from concurgraph.connectivity import run_cc
from concurgraph.generators import LatticeSpec, Scheme, gen_lattice
from concurgraph.reach import single_reach
from concurgraph.scc import run_scc


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=500)
    ap.add_argument("--taus", default="1,8,64,512")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--path", type=int, default=10_000)
    args = ap.parse_args()
    taus = [int(t) for t in args.taus.split(",")]

    graphs = {
        "oriented": gen_lattice(LatticeSpec(args.size, args.size, seed=args.seed)),
        "sampled": gen_lattice(LatticeSpec(args.size, args.size, scheme=Scheme.SAMPLED,
                                           p_forward=0.3, p_backward=0.3, seed=args.seed)),
    }
    und = {name: symmetrize(g) for name, g in graphs.items()}
    n = args.path
    path = build_csr(n, np.stack([np.arange(n - 1), np.arange(1, n)], axis=1))

    print(f"{'graph':10} {'tau':>5} {'scc_fw':>7} {'scc_multi':>10} {'cc_ldd':>7} {'path':>6}")
    for name, g in graphs.items():
        for tau in taus:
            p = Params(threads=1, seed=args.seed).replace(tau=tau)
            scc = run_scc(g, p)
            multi = sum(a + b for a, b in scc.rounds["multi_search"])
            cc = run_cc(und[name], p)
            pr = single_reach(path, 0, params=p).rounds
            print(f"{name:10} {tau:>5} {scc.rounds['first_scc_forward']:>7} {multi:>10} "
                  f"{cc.ldd_rounds:>7} {pr:>6}")


if __name__ == "__main__":
    main()
