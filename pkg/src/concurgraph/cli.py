"""Command-line front end.

Every algorithm subcommand prints one JSON report (or, with ``--stream``, one
JSON record per line). The ``result`` part of a report depends only on the
graph and the seeds; timings live under ``timings``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import hashbag, oracles
from .bcc import articulation_points, bridges, run_bcc
from .config import MODES, Params, VgcParams
from .connectivity import run_cc
from .formats import ParseError, load_graph, save_graph
from .generators import PRESETS, LatticeSpec, Scheme, gen_lattice, gen_random_digraph, gen_random_graph
from .graph import Graph, GraphError, symmetrize
from .lelists import LeLists, random_priority, run_lelists
from .reach import single_reach
from .scc import PIVOTS, SccLabels, pick_pivot, run_scc, trim

SCHEMA = "concurgraph.report/1"


class CliError(Exception):
    pass


def _digest(arr) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr, np.int64).tobytes()).hexdigest()[:16]


def _set_digest(sets) -> str:
    rows = sorted(tuple(sorted(s)) for s in sets)
    return hashlib.sha256(json.dumps(rows).encode()).hexdigest()[:16]


def _params(args) -> Params:
    return Params(
        vgc=VgcParams(tau=args.tau, enabled=not args.no_vgc),
        lam=args.lam, sigma=args.sigma, alpha=args.alpha, kappa=args.kappa,
        beta=args.beta, theta=args.theta, mode=args.mode,
        threads=args.threads or 0, seed=args.seed,
    )


def _load(path: str, undirected: bool) -> Graph:
    try:
        g = load_graph(path)
    except (OSError, ParseError, GraphError) as exc:
        raise CliError(f"cannot read graph {path!r}: {exc}") from exc
    if undirected and not g.symmetric:
        g = symmetrize(g)
    return g


def _emit(report: dict, args) -> None:
    if getattr(args, "stream", False):
        for name, secs in report.get("timings", {}).items():
            print(json.dumps({"schema": SCHEMA, "record": "phase", "name": name, "seconds": secs}))
        rest = {k: v for k, v in report.items() if k != "timings"}
        print(json.dumps({**rest, "record": "result"}, sort_keys=True))
    else:
        print(json.dumps(report, sort_keys=True, indent=1))


def _report(algorithm: str, g: Graph, args, params: Params | None) -> dict:
    return {
        "schema": SCHEMA,
        "algorithm": algorithm,
        "graph": {"path": args.graph, "n": g.n, "m": g.m, "symmetric": g.symmetric},
        "engine": args.engine,
        "params": params.as_dict() if params else {"seed": args.seed},
    }


def _write_labels(path: str, labels) -> None:
    with open(path, "w") as f:
        f.write("\n".join(map(str, np.asarray(labels).tolist())))
        f.write("\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> dict:
    if args.lattice or args.preset:
        if args.preset:
            kw = dict(PRESETS[args.preset])
        else:
            try:
                rows, cols = (int(x) for x in args.lattice.lower().split("x"))
            except ValueError:
                raise CliError(f"--lattice expects RxC, got {args.lattice!r}") from None
            kw = dict(rows=rows, cols=cols, scheme=Scheme(args.scheme))
            if args.p_forward is not None:
                kw["p_forward"] = args.p_forward
            if args.p_backward is not None:
                kw["p_backward"] = args.p_backward
        spec = LatticeSpec(wrap=not args.no_wrap, seed=args.seed, **kw)
        g = gen_lattice(spec)
        kind = {"kind": "lattice", "rows": spec.rows, "cols": spec.cols, "scheme": spec.scheme.value}
    elif args.random is not None:
        m = args.edges if args.edges is not None else 4 * args.random
        if args.undirected:
            g = gen_random_graph(args.random, m, args.seed, connected=args.connected)
        else:
            g = gen_random_digraph(args.random, m, args.seed)
        kind = {"kind": "random", "undirected": args.undirected}
    else:
        raise CliError("gen needs --lattice, --preset or --random")
    save_graph(g, args.output)
    return {"schema": SCHEMA, "algorithm": "gen", "output": args.output,
            "graph": {"n": g.n, "m": g.m, "symmetric": g.symmetric, **kind}, "seed": args.seed}


def cmd_convert(args) -> dict:
    g = _load(args.graph, args.symmetrize)
    save_graph(g, args.output)
    return {"schema": SCHEMA, "algorithm": "convert", "output": args.output,
            "graph": {"path": args.graph, "n": g.n, "m": g.m, "symmetric": g.symmetric}}


def _scc_rounds(g: Graph, params: Params, pivot: str) -> int:
    labels = SccLabels.fresh(g.n)
    trim(g, labels)
    p = pick_pivot(g, labels, pivot, params.seed)
    if p < 0:
        return 0
    return single_reach(g, p, labels.done.copy(), params).rounds


def cmd_scc(args) -> dict:
    g = _load(args.graph, False)
    params = _params(args) if args.engine == "par" else None
    rep = _report("scc", g, args, params)
    t0 = time.perf_counter()
    if args.engine == "seq":
        labels = oracles.canonical_partition(oracles.tarjan_scc(g))
        rep["timings"] = {"total": time.perf_counter() - t0}
    else:
        res = run_scc(g, params, pivot=args.pivot)
        labels = oracles.canonical_partition(res.label)
        rep["timings"] = {**res.timings, "total": time.perf_counter() - t0}
        rep["rounds"] = res.rounds
        rep["pivot"] = res.pivot
        if args.compare_rounds:
            rep["rounds"]["compare"] = {
                "first_scc_forward_tau": _scc_rounds(g, params, args.pivot),
                "first_scc_forward_tau1": _scc_rounds(g, params.replace(tau=1), args.pivot),
            }
    sizes = np.bincount(labels, minlength=max(g.n, 1))
    rep["result"] = {"num_scc": int(np.count_nonzero(sizes)), "largest_scc": int(sizes.max()) if g.n else 0,
                     "labels_digest": _digest(labels)}
    if args.output:
        _write_labels(args.output, labels)
    return rep


def cmd_cc(args) -> dict:
    g = _load(args.graph, True)
    params = _params(args) if args.engine == "par" else None
    rep = _report("cc", g, args, params)
    t0 = time.perf_counter()
    if args.engine == "seq":
        labels = oracles.seq_components(g)
        rep["timings"] = {"total": time.perf_counter() - t0}
    else:
        res = run_cc(g, params)
        labels = res.canonical()
        rep["timings"] = {**res.timings, "total": time.perf_counter() - t0}
        rep["rounds"] = {"ldd": res.ldd_rounds}
        if args.compare_rounds:
            rep["rounds"]["ldd_tau1"] = run_cc(g, params.replace(tau=1)).ldd_rounds
    sizes = np.bincount(labels, minlength=max(g.n, 1))
    rep["result"] = {"num_components": int(np.count_nonzero(sizes)),
                     "largest_component": int(sizes.max()) if g.n else 0,
                     "labels_digest": _digest(labels)}
    if args.output:
        _write_labels(args.output, labels)
    return rep


def cmd_bcc(args) -> dict:
    g = _load(args.graph, True)
    params = _params(args) if args.engine == "par" else None
    rep = _report("bcc", g, args, params)
    t0 = time.perf_counter()
    if args.engine == "seq":
        o = oracles.hopcroft_tarjan_bcc(g)
        comps, arts, brs = o.components, o.articulation, o.bridges
        rep["timings"] = {"total": time.perf_counter() - t0}
    else:
        lab = run_bcc(g, params)
        comps, arts, brs = lab.components(), articulation_points(lab), bridges(lab)
        rep["timings"] = {**lab.timings, "total": time.perf_counter() - t0}
    rep["result"] = {"num_bcc": len(comps), "num_articulation_points": len(arts), "num_bridges": len(brs),
                     "components_digest": _set_digest(comps),
                     "articulation_digest": _digest(sorted(arts))}
    if args.output:
        with open(args.output, "w") as f:
            for c in sorted(tuple(sorted(c)) for c in comps):
                f.write(" ".join(map(str, c)) + "\n")
    return rep


def cmd_lelists(args) -> dict:
    g = _load(args.graph, True)
    params = _params(args) if args.engine == "par" else None
    rep = _report("lelists", g, args, params)
    pseed = args.priority_seed if args.priority_seed is not None else args.seed
    order = random_priority(g.n, pseed)
    rep["priority_seed"] = pseed
    t0 = time.perf_counter()
    if args.engine == "seq":
        lists = oracles.cohen_lelists(g, order)
        src = [s for lst in lists for s, _ in lst]
        dst = [d for lst in lists for _, d in lst]
        off = np.concatenate([[0], np.cumsum([len(lst) for lst in lists])]).astype(np.int64)
        le = LeLists(off, np.array(src, np.int64), np.array(dst, np.int64))
        rep["timings"] = {"total": time.perf_counter() - t0}
    else:
        le = run_lelists(g, order, params)
        rep["timings"] = {**le.timings, "total": time.perf_counter() - t0}
    lengths = le.lengths()
    rep["result"] = {"total_length": int(lengths.sum()),
                     "mean_length": float(lengths.mean()) if g.n else 0.0,
                     "lists_digest": _digest(np.concatenate([le.offsets, le.sources, le.dists]))}
    if args.output:
        with open(args.output, "w") as f:
            f.write(le.to_text())
    return rep


_BENCH = {"scc": cmd_scc, "cc": cmd_cc, "bcc": cmd_bcc, "lelists": cmd_lelists}


def cmd_bench(args) -> dict:
    """Run one algorithm over several tau values and report median times."""
    taus = [int(t) for t in args.taus.split(",")]
    rows = []
    for tau in taus:
        times = []
        result = None
        for _ in range(args.repeats):
            sub = argparse.Namespace(**{**vars(args), "tau": tau, "output": None, "engine": "par",
                                        "compare_rounds": False, "stream": False,
                                        "priority_seed": None, "pivot": args.pivot})
            t0 = time.perf_counter()
            rep = _BENCH[args.algorithm](sub)
            times.append(time.perf_counter() - t0)
            result = rep["result"]
        rows.append({"tau": tau, "median_seconds": float(np.median(times)), "result": result})
    base = next((r["median_seconds"] for r in rows if r["tau"] == 1), rows[0]["median_seconds"])
    for r in rows:
        r["relative_to_tau1"] = r["median_seconds"] / base if base > 0 else None
    return {"schema": SCHEMA, "algorithm": "bench", "target": args.algorithm, "graph": {"path": args.graph},
            "repeats": args.repeats, "rows": rows}


# ---------------------------------------------------------------------------
# parser


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return parse


def _algo_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("graph")
    p.add_argument("--engine", choices=("par", "seq"), default="par")
    p.add_argument("--tau", type=_positive(int), default=VgcParams.tau, help="local-search budget")
    p.add_argument("--no-vgc", action="store_true", help="disable local search")
    p.add_argument("--threads", type=_positive(int), default=None,
                   help="worker threads (default: CONCUR_GRAPH_THREADS or all cores)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--lambda", dest="lam", type=_positive(int), default=hashbag.LAMBDA)
    p.add_argument("--sigma", type=_positive(int), default=hashbag.SIGMA)
    p.add_argument("--alpha", type=float, default=hashbag.ALPHA)
    p.add_argument("--kappa", type=_positive(int), default=hashbag.KAPPA)
    p.add_argument("--beta", type=float, default=1.5, help="batch growth factor")
    p.add_argument("--theta", type=_positive(float), default=20.0, help="dense-mode threshold divisor")
    p.add_argument("--mode", choices=MODES, default="auto")
    p.add_argument("--pivot", choices=PIVOTS, default="maxdeg")
    p.add_argument("--stream", action="store_true", help="line-delimited JSON records")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="concurgraph", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a graph")
    p.add_argument("--lattice", help="RxC torus lattice")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--scheme", choices=[s.value for s in Scheme], default="oriented")
    p.add_argument("--p-forward", type=float)
    p.add_argument("--p-backward", type=float)
    p.add_argument("--no-wrap", action="store_true")
    p.add_argument("--random", type=int, metavar="N", help="uniform random graph on N vertices")
    p.add_argument("--edges", type=int, metavar="M")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--connected", action="store_true", help="add a random spanning tree")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("convert", help="convert between text and binary formats")
    p.add_argument("graph")
    p.add_argument("output")
    p.add_argument("--symmetrize", action="store_true")
    p.set_defaults(func=cmd_convert)

    for name, func, extra in (("scc", cmd_scc, True), ("cc", cmd_cc, True), ("bcc", cmd_bcc, False),
                              ("lelists", cmd_lelists, False)):
        p = sub.add_parser(name)
        _algo_flags(p)
        p.add_argument("-o", "--output")
        if extra:
            p.add_argument("--compare-rounds", action="store_true",
                           help="also count search rounds with tau=1")
        else:
            p.set_defaults(compare_rounds=False)
        if name == "lelists":
            p.add_argument("--priority-seed", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("bench", help="time one algorithm across tau values")
    _algo_flags(p)
    p.add_argument("--algorithm", choices=sorted(_BENCH), default="scc")
    p.add_argument("--taus", default="1,8,64,512")
    p.add_argument("--repeats", type=_positive(int), default=3)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except (CliError, GraphError, ValueError) as exc:
        print(f"concurgraph {args.command}: error: {exc}", file=sys.stderr)
        return 2
    _emit(report, args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
