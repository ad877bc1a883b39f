"""Command-line driver: exact solves, bound hierarchies, heuristics,
robustness comparison, instance generation, and degree histograms.

Every subcommand can write a JSON run report (schema_version 1) carrying the
command echo, the instance digest, its parameters, and the payload; numeric
payloads are deterministic for fixed seeds, with wall-time fields excluded
from that guarantee. Cutting-plane runs can also stream a per-iteration CSV
trace with a fixed column order.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import __version__
from .formulations import base_relaxed_model, dclbf_model, degree_capped_model
from .graph import EdgeSelection
from .heuristics import HeuristicParams, best_star, max_weight_spanning_tree, mch, mch_degree_capped
from .instances import (
    degree_histogram,
    generate_instances,
    instance_digest,
    read_instance,
    write_instance,
)
from .bruteforce import brute_force_optimum
from .localization import NoiseModel, compare_topologies, default_candidates
from .oa import OAConfig, run_algorithm1, solve_exact

TIMING_FIELDS = ("wall_time", "wall_time_s", "milp_wall_time")


def _tree_payload(tree):
    return [[i, j] for i, j, _ in tree.selected_edges()]


def _oa_payload(res):
    return {
        "tree": _tree_payload(res.tree) if res.tree is not None else None,
        "lower_bound": res.lower_bound,
        "upper_bound": res.upper_bound,
        "gap_percent": res.gap_percent,
        "eigen_cut_count": res.eigen_cut_count,
        "soc_cut_count": res.soc_cut_count,
        "topology_cut_count": res.topology_cut_count,
        "milp_solve_count": res.milp_solve_count,
        "status": res.status,
        "wall_time_s": res.wall_time,
    }


def _heuristic_payload(res):
    return {
        "tree": _tree_payload(res.tree),
        "gamma_h": res.gamma_h,
        "per_candidate": [
            {
                "center": c.center,
                "gamma": c.gamma,
                "status": c.status,
                "wall_time_s": c.wall_time,
            }
            for c in res.per_candidate
        ],
        "wall_time_s": res.wall_time,
    }


def _report(args, payload, params, digest, t0, instance_path=None):
    return {
        "schema_version": 1,
        "tool_version": __version__,
        "command": list(args),
        "instance_path": instance_path,
        "instance_digest": digest,
        "parameters": params,
        "payload": payload,
        "wall_time_s": time.perf_counter() - t0,
    }


def _emit(report, report_path):
    if report_path:
        with open(report_path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    json.dump(report["payload"], sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _write_trace(res, path, sizes):
    cols = res.trace_columns(sizes)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=cols)
        writer.writeheader()
        for row in res.trace:
            writer.writerow(row)


def _parse_sizes(text, n):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        out.append(n if tok in ("n", "N") else int(tok))
    return tuple(out)


def _config_from(ns, n, sizes=None):
    return OAConfig(
        sizes=sizes if sizes is not None else _parse_sizes(ns.sizes, n),
        eps_psd=ns.eps_psd,
        eps_opt=ns.eps_opt,
        soc_mode=ns.soc,
        kelley_init=ns.kelley,
        time_limit=ns.time_limit,
        record_cuts=False,
    )


def _add_common(p, default_sizes="n"):
    p.add_argument("instance")
    p.add_argument("--format", default="edges", choices=["edges", "matrix", "published"])
    p.add_argument("--sizes", default=default_sizes,
                   help="comma list of principal-submatrix sizes; 'n' means full size")
    p.add_argument("--eps-psd", dest="eps_psd", type=float, default=1e-6)
    p.add_argument("--eps-opt", dest="eps_opt", type=float, default=1e-4)
    p.add_argument("--soc", action="store_true",
                   help="use tangent-plane cone cuts for 2x2 violations")
    p.add_argument("--kelley", action="store_true",
                   help="tighten the initial upper bound with the relaxation loop")
    p.add_argument("--time-limit", dest="time_limit", type=float, default=None)
    p.add_argument("--report", default=None, help="write the JSON run report here")
    p.add_argument("--trace", default=None, help="write the per-iteration CSV here")


def _cmd_exact(ns, argv):
    t0 = time.perf_counter()
    g = read_instance(ns.instance, ns.format)
    cfg = _config_from(ns, g.n)
    res = solve_exact(g, cfg)
    if ns.trace:
        _write_trace(res, ns.trace, cfg.sizes)
    params = {"sizes": list(cfg.sizes), "eps_psd": cfg.eps_psd, "eps_opt": cfg.eps_opt,
              "soc_mode": cfg.soc_mode, "kelley_init": cfg.kelley_init}
    _emit(_report(argv, _oa_payload(res), params, instance_digest(g), t0, ns.instance), ns.report)


def _cmd_ub(ns, argv):
    t0 = time.perf_counter()
    g = read_instance(ns.instance, ns.format)
    per_size = {}
    for m in _parse_sizes(ns.sizes, g.n):
        cfg = _config_from(ns, g.n, sizes=(m,))
        res = run_algorithm1(g, base_relaxed_model(g), cfg)
        per_size[str(m)] = _oa_payload(res)
        if ns.trace:
            _write_trace(res, f"{ns.trace}.m{m}.csv", cfg.sizes)
    params = {"sizes": ns.sizes, "eps_psd": ns.eps_psd, "eps_opt": ns.eps_opt,
              "soc_mode": ns.soc, "kelley_init": ns.kelley}
    _emit(_report(argv, {"per_size": per_size}, params, instance_digest(g), t0, ns.instance), ns.report)


def _cmd_dclbf(ns, argv):
    t0 = time.perf_counter()
    g = read_instance(ns.instance, ns.format)
    cfg = _config_from(ns, g.n)
    if cfg.sizes[-1] != g.n:
        raise SystemExit("dclbf solves need the full size n among --sizes")
    res = run_algorithm1(g, dclbf_model(g, ns.k), cfg)
    if ns.trace:
        _write_trace(res, ns.trace, cfg.sizes)
    params = {"k": ns.k, "sizes": list(cfg.sizes), "eps_psd": cfg.eps_psd,
              "eps_opt": cfg.eps_opt}
    _emit(_report(argv, _oa_payload(res), params, instance_digest(g), t0, ns.instance), ns.report)


def _cmd_mch(ns, argv):
    t0 = time.perf_counter()
    g = read_instance(ns.instance, ns.format)
    cfg = _config_from(ns, g.n, sizes=(g.n,))
    if ns.k is not None:
        params = HeuristicParams(h1=ns.h1, h2=ns.h2, k=ns.k)
        res = mch(g, params, cfg)
    else:
        params = HeuristicParams(h1=ns.h1, h2=ns.h2, d=ns.d)
        res = mch_degree_capped(g, params, cfg)
    meta = {"k": ns.k, "d": ns.d, "h1": ns.h1, "h2": ns.h2,
            "eps_psd": cfg.eps_psd, "eps_opt": cfg.eps_opt}
    _emit(_report(argv, _heuristic_payload(res), meta, instance_digest(g), t0, ns.instance), ns.report)


def _cmd_robustness(ns, argv):
    t0 = time.perf_counter()
    g = read_instance(ns.instance, ns.format)
    cfg = _config_from(ns, g.n, sizes=_parse_sizes(ns.sizes, g.n))
    exact = solve_exact(g, cfg)
    candidates = default_candidates(g, exact.tree, n_random=ns.random_trees, seed=ns.seed)
    noise = NoiseModel(reference=ns.reference, c_ref=ns.c_ref)
    report = compare_topologies(g, candidates, noise)
    rows = [
        {"label": r.label, "lambda2": r.lambda2, "p_norm": r.p_norm,
         "lower_bound": r.lower_bound, "residual": r.residual}
        for r in report.rows
    ]
    if ns.csv:
        with open(ns.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["label", "lambda2", "p_norm",
                                                    "lower_bound", "residual"])
            writer.writeheader()
            writer.writerows(rows)
    payload = {"rows": rows, "exact": _oa_payload(exact)}
    params = {"random_trees": ns.random_trees, "seed": ns.seed,
              "reference": ns.reference, "c_ref": ns.c_ref}
    _emit(_report(argv, payload, params, instance_digest(g), t0, ns.instance), ns.report)


def _cmd_gen(ns, argv):
    t0 = time.perf_counter()
    made = generate_instances(ns.n, ns.count, (ns.wlo, ns.whi), ns.seed)
    entries = []
    for idx, inst in enumerate(made, start=1):
        path = f"{ns.out_prefix}{ns.n}_{idx:02d}.txt"
        meta = {"seed": inst.seed, "attempt": inst.attempt, "generator": "uniform",
                "weight_range": f"[{ns.wlo},{ns.whi}]"}
        write_instance(inst.graph, path, meta)
        entries.append({
            "path": path,
            "digest": instance_digest(inst.graph),
            "attempt": inst.attempt,
            "champion": inst.champion,
            "best_star": inst.star,
            "max_weight_tree": inst.max_weight,
        })
    payload = {"instances": entries}
    params = {"n": ns.n, "count": ns.count, "seed": ns.seed,
              "weight_range": [ns.wlo, ns.whi]}
    _emit(_report(argv, payload, params, None, t0), ns.report)


def _cmd_bruteforce(ns, argv):
    t0 = time.perf_counter()
    g = read_instance(ns.instance, ns.format)
    tree, value = brute_force_optimum(g)
    payload = {"tree": _tree_payload(tree), "lambda2": value}
    _emit(_report(argv, payload, {}, instance_digest(g), t0, ns.instance), ns.report)


def _cmd_hist(ns, argv):
    t0 = time.perf_counter()
    trees = []
    for path in ns.reports:
        with open(path) as fh:
            doc = json.load(fh)
        edges = doc["payload"].get("tree")
        if edges is None:
            raise SystemExit(f"{path}: report payload has no tree")
        inst = doc.get("instance_path")
        if inst is None:
            raise SystemExit(f"{path}: report does not name its instance file")
        g = read_instance(inst)
        trees.append(EdgeSelection.from_edges(g, [tuple(e) for e in edges]))
    hist = degree_histogram(trees)
    payload = {"histogram": {str(d): p for d, p in hist.items()}}
    _emit(_report(argv, payload, {"reports": list(ns.reports)}, None, t0), ns.report)


def build_parser():
    p = argparse.ArgumentParser(prog="algconn", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("exact", help="optimal spanning tree by cutting planes")
    _add_common(q)
    q.set_defaults(func=_cmd_exact)

    q = sub.add_parser("ub", help="upper bounds from small principal submatrices")
    _add_common(q, default_sizes="2,3,4")
    q.set_defaults(func=_cmd_ub)

    q = sub.add_parser("dclbf", help="designated-center lower-bound solve")
    _add_common(q)
    q.add_argument("--k", type=int, required=True)
    q.set_defaults(func=_cmd_dclbf)

    q = sub.add_parser("mch", help="maximum-cost heuristic")
    _add_common(q)
    grp = q.add_mutually_exclusive_group(required=True)
    grp.add_argument("--k", type=int, default=None)
    grp.add_argument("--d", type=int, default=None)
    q.add_argument("--h1", type=int, default=5)
    q.add_argument("--h2", type=int, default=5)
    q.set_defaults(func=_cmd_mch)

    q = sub.add_parser("robustness", help="covariance comparison across topologies")
    _add_common(q, default_sizes="2,n")
    q.add_argument("--random-trees", dest="random_trees", type=int, default=20)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--reference", type=int, default=1)
    q.add_argument("--c-ref", dest="c_ref", type=float, default=1.0)
    q.add_argument("--csv", default=None)
    q.set_defaults(func=_cmd_robustness)

    q = sub.add_parser("gen", help="generate seeded non-trivial instances")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--count", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--wlo", type=float, default=1.0)
    q.add_argument("--whi", type=float, default=10.0)
    q.add_argument("--out-prefix", dest="out_prefix", default="instance_k")
    q.add_argument("--report", default=None)
    q.set_defaults(func=_cmd_gen)

    q = sub.add_parser("bruteforce", help="exhaustive oracle optimum")
    q.add_argument("instance")
    q.add_argument("--format", default="edges", choices=["edges", "matrix", "published"])
    q.add_argument("--report", default=None)
    q.set_defaults(func=_cmd_bruteforce)

    q = sub.add_parser("hist", help="degree histogram over trees from run reports")
    q.add_argument("reports", nargs="+")
    q.add_argument("--report", default=None)
    q.set_defaults(func=_cmd_hist)
    return p


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    ns = parser.parse_args(argv)
    ns.func(ns, argv)
    return 0


if __name__ == "__main__":
    sys.exit(main())
