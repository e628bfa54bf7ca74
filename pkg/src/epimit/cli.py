"""Command-line entry point: ``epimit {run,gen,check-stability,reduce-hardness}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import dsir, icsir
from .graph import EdgeListError, build_hardness_instance, gen_er, gen_sbm, load_edge_list, perturb_adversarial, save_edge_list
from .harness import ConfigError, emit_csv, load_config, run_experiment, tomllib

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("epimit")


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    rows = run_experiment(cfg, threads=args.threads)
    text = emit_csv(rows, args.out)
    if args.out is None:
        sys.stdout.write(text)
    else:
        log.info("wrote %d rows to %s", len(rows), args.out)
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.model == "er":
        g = gen_er(args.n, args.p, args.seed)
    else:
        Q = np.full((args.kappa, args.kappa), args.q_out)
        np.fill_diagonal(Q, args.q_in)
        g = gen_sbm(args.block_size, args.kappa, Q, args.seed)
    if args.adversaries:
        g = perturb_adversarial(g, args.adversaries, args.nu, args.seed)
    if args.out is None:
        buf = [f"# nodes: {g.n}"] + [f"{u} {v}" for u, v in g.edges.tolist()]
        sys.stdout.write("\n".join(buf) + "\n")
    else:
        save_edge_list(g, args.out)
    return EXIT_OK


def _load_system(path) -> dsir.SystemFile:
    try:
        doc = tomllib.loads(Path(path).read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"{path}: {exc}"]) from exc
    try:
        return dsir.system_from_dict(doc)
    except KeyError as exc:
        raise ConfigError([f"{exc.args[0]}: required key"]) from exc
    except (TypeError, IndexError, ValueError) as exc:
        raise ConfigError([f"malformed system file: {exc}"]) from exc


def _cmd_check_stability(args) -> int:
    sf = _load_system(args.system)
    sys_ = sf.system
    st = dsir.check_stability(sys_, sf.candidates)
    M = dsir.transition_matrix(sys_)
    report = {
        "n": sys_.n,
        "edges": sys_.g.m,
        "stable": st.stable,
        "margin": st.margin,
        "spectral_radius": dsir.spectral_radius(M),
    }
    if dsir.spectral_radius(M) < 1:
        report["sigma_hat"] = dsir.sigma_hat(sys_)
    print(json.dumps(report, indent=2))
    return EXIT_OK


def _cmd_reduce_hardness(args) -> int:
    g3 = load_edge_list(args.edgelist, directed=False)
    inst = build_hardness_instance(g3, args.b)
    if args.out is not None:
        save_edge_list(inst.graph, args.out)
    print(json.dumps({"n": inst.graph.n, "edges": inst.graph.m, "seeds": list(inst.seeds),
                      "k": inst.k, "z": inst.z}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="epimit", description="Edge deletion for epidemic mitigation.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment config and write CSV")
    p.add_argument("config", help="TOML experiment config")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--threads", type=int, help="worker threads (default: EPIMIT_THREADS or 1)")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("gen", help="generate a random contact graph as an edge list")
    gsub = p.add_subparsers(dest="model", required=True)
    er = gsub.add_parser("er", help="Erdos-Renyi G(n, p)")
    er.add_argument("--n", type=int, required=True)
    er.add_argument("--p", type=float, required=True)
    sbm = gsub.add_parser("sbm", help="stochastic block model with equal blocks")
    sbm.add_argument("--block-size", type=int, required=True)
    sbm.add_argument("--kappa", type=int, required=True)
    sbm.add_argument("--q-in", type=float, required=True)
    sbm.add_argument("--q-out", type=float, required=True)
    for q in (er, sbm):
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--adversaries", type=int, default=0, help="add this many adversarial vertices")
        q.add_argument("--nu", type=int, default=1, help="edges per adversarial vertex")
        q.add_argument("--out", help="edge-list path (default: stdout)")
        q.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("check-stability", help="report the stability margin of a D-SIR system file")
    p.add_argument("system", help="TOML system file")
    p.set_defaults(fn=_cmd_check_stability)

    p = sub.add_parser("reduce-hardness", help="build the bisection reduction from a 3-regular edge list")
    p.add_argument("edgelist")
    p.add_argument("--b", type=int, required=True, help="bisection size")
    p.add_argument("--out", help="write the reduced graph as an edge list")
    p.set_defaults(fn=_cmd_reduce_hardness)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (EdgeListError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (icsir.EstimatorUnavailable, icsir.ResampleExhausted, dsir.UnstableSystemError,
            dsir.NonConvergenceError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
