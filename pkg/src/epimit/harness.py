"""Config-driven experiments: build an instance, run deletion algorithms, score them, write CSV.

Config files are TOML; see ``configs/`` and the README for the schema.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import dsir, gsir, icsir
from .graph import Graph, degree_cap_preprocess, gen_er, gen_sbm, load_edge_list
from .instances import bidirected
from .optimize import max_degree_order, random_order
from .stats import derive_seed, ordered_map, thread_count

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ALGORITHMS = ("greedy-dsir", "greedy-ic-sigma", "greedy-ic-sigma-prime", "max-degree", "random")
METRICS = ("dsir-sigma", "dsir-sigma-hat", "ic-estimate", "gsir-estimate")
IC_ONLY = {"greedy-ic-sigma", "greedy-ic-sigma-prime", "ic-estimate"}
CSV_HEADER = ("experiment_id", "algorithm", "k", "metric", "value", "half_width", "seed")


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("invalid config:\n  " + "\n  ".join(errors))
        self.errors = errors


@dataclass
class ExperimentConfig:
    experiment_id: str
    seed: int
    network: dict
    budgets: list[int]
    algorithms: list[str]
    metrics: list[str]
    seeds: dict = field(default_factory=lambda: {"mode": "uniform", "count": 5})
    candidates: dict = field(default_factory=lambda: {"fraction": 0.5})
    rates: dict = field(default_factory=dict)
    activation: dict = field(default_factory=dict)
    estimator: dict = field(default_factory=dict)
    evaluation: dict = field(default_factory=dict)
    deletion: str = "contact"
    replicates: int = 1
    schema_version: int = SCHEMA_VERSION


_TOP_KEYS = {"schema_version", "experiment_id", "seed", "network", "budgets", "algorithms", "metrics", "seeds",
             "candidates", "rates", "activation", "estimator", "evaluation", "deletion", "replicates"}
_NETWORK_KEYS = {
    "er": {"kind", "n", "p", "max_degree"},
    "sbm": {"kind", "block_size", "kappa", "Q", "q_in", "q_out", "max_degree"},
    "edgelist": {"kind", "path", "max_degree"},
}
_SECTION_KEYS = {
    "seeds": {"mode", "count", "nodes", "mean"},
    "candidates": {"fraction"},
    "rates": {"B", "D", "x0", "r0"},
    "activation": {"p", "range"},
    "estimator": {"epsilon", "rounds", "d_end", "max_resamples"},
    "evaluation": {"ic_rounds", "ic_epsilon", "gsir_reps", "dsir_tol", "dsir_t_max"},
}


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _range_ok(x, lo=0.0, hi=1.0) -> bool:
    return (isinstance(x, list) and len(x) == 2 and all(_is_num(v) for v in x)
            and lo <= x[0] <= x[1] <= hi)


def validate_config(doc: Mapping[str, Any]) -> ExperimentConfig:
    """Check a parsed config document; every problem is reported with its field path."""
    errs: list[str] = []
    for key in sorted(set(doc) - _TOP_KEYS):
        errs.append(f"{key}: unknown key")
    if doc.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
        errs.append(f"schema_version: expected {SCHEMA_VERSION}")
    if not isinstance(doc.get("experiment_id"), str) or not doc.get("experiment_id"):
        errs.append("experiment_id: required non-empty string")
    if not _is_int(doc.get("seed")):
        errs.append("seed: required integer")

    net = doc.get("network")
    if not isinstance(net, Mapping):
        errs.append("network: required table")
        net = {}
    else:
        kind = net.get("kind")
        if kind not in _NETWORK_KEYS:
            errs.append(f"network.kind: must be one of {sorted(_NETWORK_KEYS)}")
        else:
            for key in sorted(set(net) - _NETWORK_KEYS[kind]):
                errs.append(f"network.{key}: unknown key for kind {kind!r}")
            if kind == "er":
                if not _is_int(net.get("n")) or net["n"] < 1:
                    errs.append("network.n: required positive integer")
                if not _is_num(net.get("p")) or not 0 <= net["p"] <= 1:
                    errs.append("network.p: required probability in [0, 1]")
            elif kind == "sbm":
                for key in ("block_size", "kappa"):
                    if not _is_int(net.get(key)) or net[key] < 1:
                        errs.append(f"network.{key}: required positive integer")
                if "Q" not in net and not ("q_in" in net and "q_out" in net):
                    errs.append("network.Q: give a matrix Q or both q_in and q_out")
                if "Q" in net:
                    try:
                        Q = np.asarray(net["Q"], dtype=float)
                        kap = net.get("kappa")
                        if Q.shape != (kap, kap) or not np.allclose(Q, Q.T) or Q.min() < 0 or Q.max() > 1:
                            errs.append("network.Q: must be a symmetric kappa x kappa matrix of probabilities")
                    except (TypeError, ValueError):
                        errs.append("network.Q: must be a numeric matrix")
                for key in ("q_in", "q_out"):
                    if key in net and (not _is_num(net[key]) or not 0 <= net[key] <= 1):
                        errs.append(f"network.{key}: must be a probability")
            else:
                if not isinstance(net.get("path"), str):
                    errs.append("network.path: required string")
            if "max_degree" in net and (not _is_int(net["max_degree"]) or net["max_degree"] < 0):
                errs.append("network.max_degree: must be a non-negative integer")

    for name, allowed in (("algorithms", ALGORITHMS), ("metrics", METRICS)):
        items = doc.get(name)
        if not isinstance(items, list) or not items:
            errs.append(f"{name}: required non-empty list")
            continue
        for i, item in enumerate(items):
            if item not in allowed:
                errs.append(f"{name}[{i}]: unknown {name[:-1]} {item!r}")
        for item in sorted({x for x in items if isinstance(x, str) and items.count(x) > 1}):
            errs.append(f"{name}: duplicate entry {item!r}")

    budgets = doc.get("budgets")
    if not isinstance(budgets, list) or not budgets:
        errs.append("budgets: required non-empty list")
    else:
        for i, k in enumerate(budgets):
            if not _is_int(k) or k < 0:
                errs.append(f"budgets[{i}]: must be a non-negative integer")
        if len(set(map(str, budgets))) != len(budgets):
            errs.append("budgets: duplicate entry")

    deletion = doc.get("deletion", "contact")
    if deletion not in ("contact", "directed"):
        errs.append("deletion: must be 'contact' or 'directed'")
    elif deletion == "directed":
        for name in ("algorithms", "metrics"):
            for i, item in enumerate(doc.get(name) or []):
                if item in IC_ONLY:
                    errs.append(f"{name}[{i}]: {item!r} needs contact deletion (undirected edges)")
    if not _is_int(doc.get("replicates", 1)) or doc.get("replicates", 1) < 1:
        errs.append("replicates: must be a positive integer")

    for section, keys in _SECTION_KEYS.items():
        sec = doc.get(section, {})
        if not isinstance(sec, Mapping):
            errs.append(f"{section}: must be a table")
            continue
        for key in sorted(set(sec) - keys):
            errs.append(f"{section}.{key}: unknown key")

    seeds = doc.get("seeds", {"mode": "uniform", "count": 5})
    if isinstance(seeds, Mapping):
        mode = seeds.get("mode", "uniform")
        if mode == "uniform":
            if not _is_int(seeds.get("count", 5)) or seeds.get("count", 5) < 1:
                errs.append("seeds.count: must be a positive integer")
        elif mode == "fixed":
            nodes = seeds.get("nodes")
            if not isinstance(nodes, list) or not nodes or not all(_is_int(v) and v >= 0 for v in nodes):
                errs.append("seeds.nodes: required non-empty list of vertex ids")
        elif mode == "bernoulli":
            if not _is_num(seeds.get("mean")) or not 0 < seeds["mean"] <= 1:
                errs.append("seeds.mean: required probability in (0, 1]")
        else:
            errs.append("seeds.mode: must be 'uniform', 'fixed' or 'bernoulli'")

    cands = doc.get("candidates", {"fraction": 0.5})
    if isinstance(cands, Mapping):
        frac = cands.get("fraction", 0.5)
        if not _is_num(frac) or not 0 <= frac <= 1:
            errs.append("candidates.fraction: must lie in [0, 1]")

    algorithms = doc.get("algorithms") or []
    metrics = doc.get("metrics") or []
    needs_rates = any(a == "greedy-dsir" for a in algorithms) or any(m in ("dsir-sigma", "dsir-sigma-hat", "gsir-estimate") for m in metrics)
    rates = doc.get("rates", {})
    if needs_rates and isinstance(rates, Mapping):
        for key, hi in (("B", 1.0), ("D", 1.0), ("x0", 1.0), ("r0", 1.0)):
            if key in ("B", "D") and key not in rates:
                errs.append(f"rates.{key}: required [low, high] range")
            elif key in rates and not _range_ok(rates[key], 0.0, hi):
                errs.append(f"rates.{key}: must be [low, high] with 0 <= low <= high <= 1")
        if "D" in rates and _range_ok(rates["D"]) and rates["D"][1] >= 1:
            errs.append("rates.D: healing rates must stay below 1")
    needs_activation = any(x in IC_ONLY for x in list(algorithms) + list(metrics))
    act = doc.get("activation", {})
    if needs_activation and isinstance(act, Mapping):
        if ("p" in act) == ("range" in act):
            errs.append("activation: give exactly one of p or range")
        elif "p" in act and (not _is_num(act["p"]) or not 0 <= act["p"] <= 1):
            errs.append("activation.p: must be a probability")
        elif "range" in act and not _range_ok(act["range"]):
            errs.append("activation.range: must be [low, high] within [0, 1]")

    est = doc.get("estimator", {})
    if isinstance(est, Mapping):
        if "epsilon" in est and (not _is_num(est["epsilon"]) or est["epsilon"] <= 0):
            errs.append("estimator.epsilon: must be positive")
        if "rounds" in est and (not _is_int(est["rounds"]) or est["rounds"] < 1):
            errs.append("estimator.rounds: must be a positive integer")
        if "d_end" in est and (not _is_num(est["d_end"]) or est["d_end"] < 0):
            errs.append("estimator.d_end: must be non-negative")
        if "max_resamples" in est and (not _is_int(est["max_resamples"]) or est["max_resamples"] < 1):
            errs.append("estimator.max_resamples: must be a positive integer")
    ev = doc.get("evaluation", {})
    if isinstance(ev, Mapping):
        for key in ("ic_rounds", "gsir_reps", "dsir_t_max"):
            if key in ev and (not _is_int(ev[key]) or ev[key] < 1):
                errs.append(f"evaluation.{key}: must be a positive integer")
        for key in ("ic_epsilon", "dsir_tol"):
            if key in ev and (not _is_num(ev[key]) or ev[key] <= 0):
                errs.append(f"evaluation.{key}: must be positive")

    if errs:
        raise ConfigError(errs)
    return ExperimentConfig(
        experiment_id=doc["experiment_id"],
        seed=doc["seed"],
        network=dict(net),
        budgets=sorted(doc["budgets"]),
        algorithms=list(doc["algorithms"]),
        metrics=list(doc["metrics"]),
        seeds=dict(doc.get("seeds", {"mode": "uniform", "count": 5})),
        candidates=dict(doc.get("candidates", {"fraction": 0.5})),
        rates=dict(doc.get("rates", {})),
        activation=dict(doc.get("activation", {})),
        estimator=dict(doc.get("estimator", {})),
        evaluation=dict(doc.get("evaluation", {})),
        deletion=deletion,
        replicates=doc.get("replicates", 1),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        doc = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"{path}: {exc}"]) from exc
    net = doc.get("network")
    if isinstance(net, dict) and isinstance(net.get("path"), str):
        p = Path(net["path"])
        if not p.is_absolute():
            net["path"] = str(path.parent / p)
    return validate_config(doc)


def derive_seeds(root: int, paths) -> dict:
    return {tuple(p) if isinstance(p, (list, tuple)) else (p,): derive_seed(root, *(p if isinstance(p, (list, tuple)) else (p,)))
            for p in paths}


# --- instance construction --------------------------------------------------


@dataclass
class Instance:
    contacts: Graph
    seeds: np.ndarray
    Q: list[int]  # contact ids, or directed ids in directed mode
    system: dsir.DsirSystem | None
    ic: icsir.IcInstance | None
    pairs: dict[int, tuple[int, int]]


def _build_network(cfg: ExperimentConfig, root: int) -> Graph:
    net = cfg.network
    s = derive_seed(root, "network")
    if net["kind"] == "er":
        g = gen_er(net["n"], net["p"], s)
    elif net["kind"] == "sbm":
        kap = net["kappa"]
        Q = net.get("Q")
        if Q is None:
            Q = np.where(np.eye(kap, dtype=bool), net["q_in"], net["q_out"])
        g = gen_sbm(net["block_size"], kap, Q, s)
    else:
        g = load_edge_list(net["path"], directed=False)
    if "max_degree" in net:
        g, _ = degree_cap_preprocess(g, net["max_degree"])
    return g.compact()


def build_instance(cfg: ExperimentConfig, root: int) -> Instance:
    contacts = _build_network(cfg, root)
    n = contacts.n
    rng = np.random.default_rng(derive_seed(root, "seeds"))
    mode = cfg.seeds.get("mode", "uniform")
    if mode == "uniform":
        count = cfg.seeds.get("count", 5)
        if count > n:
            raise ConfigError([f"seeds.count: {count} exceeds the {n} vertices"])
        seeds = np.sort(rng.choice(n, size=count, replace=False))
    elif mode == "fixed":
        seeds = np.array(sorted(set(cfg.seeds["nodes"])))
        if seeds.max() >= n:
            raise ConfigError([f"seeds.nodes: vertex {int(seeds.max())} out of range for n={n}"])
    else:
        seeds = np.flatnonzero(rng.random(n) < cfg.seeds["mean"])
        if not len(seeds):
            seeds = np.array([int(rng.integers(n))])
    rng = np.random.default_rng(derive_seed(root, "candidates"))
    q = int(round(cfg.candidates.get("fraction", 0.5) * contacts.m))
    Q = sorted(rng.choice(contacts.m, size=q, replace=False).tolist())

    directed, pairs = bidirected(contacts)
    system = None
    if cfg.rates:
        rng = np.random.default_rng(derive_seed(root, "rates"))
        r = cfg.rates
        rates = rng.uniform(*r["B"], size=directed.m)
        D = rng.uniform(*r["D"], size=n)
        x0 = np.zeros(n)
        x0[seeds] = rng.uniform(*r.get("x0", [1.0, 1.0]), size=len(seeds))
        r0 = rng.uniform(*r.get("r0", [0.0, 0.0]), size=n)
        r0 = np.minimum(r0, 1.0 - x0)
        try:
            system = dsir.DsirSystem(directed, rates, D, x0, r0)
        except ValueError as exc:
            raise ConfigError([f"rates: {exc}"]) from exc
    ic = None
    if cfg.deletion == "contact" and cfg.activation:
        rng = np.random.default_rng(derive_seed(root, "activation"))
        a = cfg.activation
        p = np.full(contacts.m, float(a["p"])) if "p" in a else rng.uniform(*a["range"], size=contacts.m)
        ic = icsir.IcInstance(contacts, p, seeds.tolist(), frozenset(Q))
    if cfg.deletion == "directed":
        Q = sorted(d for c in Q for d in pairs[c])
    return Instance(contacts, seeds, Q, system, ic, pairs)


# --- algorithms and metrics -------------------------------------------------


def _estimator(cfg: ExperimentConfig, seed: int, threads: int) -> icsir.EstimatorConfig:
    e = cfg.estimator
    return icsir.EstimatorConfig(epsilon=e.get("epsilon", 0.1), rounds=e.get("rounds"), seed=seed,
                                 d_end=e.get("d_end"), max_resamples=e.get("max_resamples", 100),
                                 threads=threads)


def _deletion_order(name: str, cfg: ExperimentConfig, inst: Instance, root: int, kmax: int) -> list[int]:
    if name == "greedy-dsir":
        if inst.system is None:
            raise ConfigError(["rates: greedy-dsir needs a rates table"])
        groups = None if cfg.deletion == "directed" else inst.pairs
        return dsir.greedy_dsir(inst.system, inst.Q, kmax, groups=groups).chosen
    if name in ("greedy-ic-sigma", "greedy-ic-sigma-prime"):
        objective = "sigma" if name == "greedy-ic-sigma" else "sigma_prime"
        est = _estimator(cfg, derive_seed(root, "algorithm", name), 1)
        return icsir.greedy_icsir(inst.ic, kmax, est, objective).chosen
    if name == "max-degree":
        g = inst.contacts if cfg.deletion == "contact" else inst.system.g
        return max_degree_order(g, inst.Q, kmax)
    if name == "random":
        return random_order(inst.Q, derive_seed(root, "algorithm", name))[:kmax]
    raise ValueError(name)


def _evaluate(metric: str, cfg: ExperimentConfig, inst: Instance, P: list[int], seed: int) -> tuple[float, float]:
    ev = cfg.evaluation
    if metric == "ic-estimate":
        est = icsir.EstimatorConfig(epsilon=ev.get("ic_epsilon", 0.1), rounds=ev.get("ic_rounds", 10_000),
                                    seed=seed, threads=1)
        e = icsir.estimate_sigma(inst.ic, P, est)
        return e.mean, e.half_width
    if inst.system is None:
        raise ConfigError([f"rates: metric {metric!r} needs a rates table"])
    directed = P if cfg.deletion == "directed" else [d for c in P for d in inst.pairs[c]]
    if metric == "dsir-sigma":
        return dsir.simulate_sigma(inst.system, directed, ev.get("dsir_tol", 1e-10), ev.get("dsir_t_max", 100_000)), 0.0
    if metric == "dsir-sigma-hat":
        return dsir.sigma_hat(inst.system, directed), 0.0
    if metric == "gsir-estimate":
        e = gsir.estimate_infections(gsir.GsirParams.from_dsir(inst.system), directed,
                                     ev.get("gsir_reps", 2000), seed, threads=1)
        return e.mean, e.half_width
    raise ValueError(metric)


@dataclass(frozen=True)
class Row:
    experiment_id: str
    algorithm: str
    k: int
    metric: str
    value: float
    half_width: float
    seed: int


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> list[Row]:
    """Run every (algorithm, budget, metric) combination; rows come back in a fixed order."""
    workers = thread_count(threads)
    rows: list[Row] = []
    for rep in range(cfg.replicates):
        exp_id = cfg.experiment_id if cfg.replicates == 1 else f"{cfg.experiment_id}/rep{rep}"
        root = cfg.seed if cfg.replicates == 1 else derive_seed(cfg.seed, "replicate", rep)
        inst = build_instance(cfg, root)
        kmax = max(cfg.budgets)
        if kmax > len(inst.Q):
            raise ConfigError([f"budgets: largest budget {kmax} exceeds |Q| = {len(inst.Q)}"])

        def order_of(name):
            try:
                return _deletion_order(name, cfg, inst, root, kmax), None
            except (icsir.EstimatorUnavailable, icsir.ResampleExhausted, dsir.UnstableSystemError) as exc:
                log.warning("%s: algorithm %s unavailable: %s", exp_id, name, exc)
                return None, exc

        orders = dict(zip(cfg.algorithms, ordered_map(order_of, cfg.algorithms, workers)))
        tasks = [(a, k, m) for a in cfg.algorithms for k in cfg.budgets for m in cfg.metrics]

        def score(task):
            a, k, m = task
            seed = derive_seed(root, "metric", m)
            order, err = orders[a]
            if order is None:
                return Row(exp_id, a, k, m, math.nan, math.nan, seed)
            try:
                value, hw = _evaluate(m, cfg, inst, order[:k], seed)
            except (icsir.EstimatorUnavailable, dsir.UnstableSystemError, dsir.NonConvergenceError) as exc:
                log.warning("%s: %s k=%d %s unavailable: %s", exp_id, a, k, m, exc)
                value, hw = math.nan, math.nan
            return Row(exp_id, a, k, m, value, hw, seed)

        rows.extend(ordered_map(score, tasks, workers))
    return rows


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def emit_csv(rows, out=None) -> str:
    """Write rows as CSV (to ``out`` if given) and return the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.experiment_id, r.algorithm, r.k, r.metric, _fmt(r.value), _fmt(r.half_width), r.seed])
    text = buf.getvalue()
    if out is not None:
        Path(out).write_text(text)
    return text


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
