"""Independent-cascade SIR: cascades, sampling estimators, exact oracles and greedy deletion.

Every estimator works on the same kind of sample: an activated subgraph of
the full contact network (the contagion network) plus one uniformly drawn
terminal vertex. A deletion set P is applied afterwards by ignoring its
edges, so one sample set can score every P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .graph import ComponentAnalysis, Graph, _bernoulli_subset, _pair_from_index, analyze
from .optimize import GreedyTrace, select_best
from .stats import BLOCK, Estimate, block_rng, hoeffding_half_width, ordered_map

MAX_BRUTE_FORCE_EDGES = 20


class EstimatorUnavailable(RuntimeError):
    """The conditional estimator needs an expected contagion degree below one."""


class ResampleExhausted(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class IcInstance:
    g: Graph
    p: np.ndarray  # activation probability per edge row
    seeds: tuple
    Q: frozenset = frozenset()

    def __post_init__(self):
        if self.g.directed:
            raise ValueError("IC-SIR instances use undirected contact graphs")
        if not self.g.dense_ids:
            raise ValueError("IC-SIR instances need dense edge ids; call Graph.compact() first")
        p = np.asarray(self.p, dtype=float).reshape(-1)
        if p.shape != (self.g.m,):
            raise ValueError(f"need one activation probability per edge ({self.g.m})")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError("activation probabilities must lie in [0, 1]")
        object.__setattr__(self, "p", p)
        seeds = tuple(sorted({int(s) for s in self.seeds}))
        if not seeds:
            raise ValueError("at least one seed is required")
        if seeds[0] < 0 or seeds[-1] >= self.g.n:
            raise ValueError("seed out of range")
        object.__setattr__(self, "seeds", seeds)
        Q = frozenset(int(e) for e in self.Q)
        if any(e < 0 or e >= self.g.m for e in Q):
            raise ValueError("candidate edge id out of range")
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return self.g.n

    def seed_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.seeds)] = True
        return mask

    def expected_degree_bound(self) -> float:
        """``max_i sum_j p_ij``: a conservative expected degree of the contagion network."""
        return float(np.bincount(self.g.edges.ravel(), weights=np.repeat(self.p, 2), minlength=self.n).max(initial=0.0))


@dataclass(frozen=True)
class EstimatorConfig:
    epsilon: float = 0.1
    rounds: int | None = None
    seed: int = 0
    d_end: float | None = None
    max_resamples: int = 100
    threads: int | None = None

    def rounds_for(self, n: int) -> int:
        if self.rounds is not None:
            if self.rounds < 1:
                raise ValueError("rounds must be at least 1")
            return int(self.rounds)
        return default_rounds(self.epsilon, n)


def default_rounds(epsilon: float, n: int) -> int:
    return max(1, math.ceil(3.0 * n * math.log(max(n, 2)) / epsilon**2))


def compute_L(d_end: float, n: float) -> int:
    """Component-size threshold ``ceil(9 (1 - d)^-2 ln n)``."""
    if not 0 <= d_end < 1:
        raise ValueError(f"d_end must lie in [0, 1), got {d_end}")
    return math.ceil(9.0 * math.log(n) / (1.0 - d_end) ** 2)


def rates_to_activation(B, D):
    """Probability that an infected node ever transmits along an edge before recovering."""
    B = np.asarray(B, dtype=float)
    D = np.asarray(D, dtype=float)
    denom = 1.0 - (1.0 - D) * (1.0 - B)
    if np.any(denom <= 0):
        raise ValueError("zero denominator: need B > 0 or D > 0")
    out = B / denom
    return float(out) if out.ndim == 0 else out


def sbm_constants(Q, block_size: int, kappa: int, p: float = 1.0) -> dict:
    """Diagnostic constants for a contagion network drawn from SBM(block_size, kappa, p*Q).

    Both the inverse-square threshold used everywhere else and the literal
    squared form are reported; see the README note on the discrepancy.
    """
    Q = np.asarray(Q, dtype=float) * p
    d_init = block_size * float(np.max(np.diag(Q)))
    d_end = block_size * float(np.max(Q.sum(axis=1)))
    nk = block_size * kappa
    out = {"d_init": d_init, "d_end": d_end, "L_star_squared": 9.0 * (1.0 - d_end) ** 2 * math.log(nk)}
    if d_end < 1:
        out["L_star"] = compute_L(d_end, nk)
        out["m_bin"] = 4 * math.ceil((1.0 - d_init) ** 2 / (1.0 - d_end) ** 2)
    return out


# --- single realisations ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class ContagionSample:
    activated: frozenset
    terminal: int
    analysis: ComponentAnalysis


def _reachable(n: int, u: np.ndarray, v: np.ndarray, sources: Sequence[int]) -> np.ndarray:
    _, labels = connected_components(
        coo_matrix((np.ones(len(u), dtype=np.int8), (u, v)), shape=(n, n)), directed=False)
    return np.isin(labels, labels[list(sources)])


def cascade(inst: IcInstance, P: Iterable[int], rng) -> set[int]:
    """Vertices newly infected in one cascade after deleting P."""
    rng = np.random.default_rng(rng)
    keep = inst.g.mask(P) & (rng.random(inst.g.m) < inst.p)
    e = inst.g.edges[keep]
    reach = _reachable(inst.n, e[:, 0], e[:, 1], inst.seeds)
    reach[list(inst.seeds)] = False
    return set(np.flatnonzero(reach).tolist())


def sample_contagion(inst: IcInstance, rng) -> ContagionSample:
    rng = np.random.default_rng(rng)
    act = rng.random(inst.g.m) < inst.p
    terminal = int(rng.integers(inst.n))
    ids = frozenset(np.flatnonzero(act).tolist())
    return ContagionSample(ids, terminal, analyze(inst.g, set(range(inst.g.m)) - ids))


def passes_filters(inst: IcInstance, sample: ContagionSample, L: int) -> bool:
    """No component above L vertices and no component holding two seeds."""
    a = sample.analysis
    if a.sizes.max(initial=0) > L:
        return False
    seed_labels = a.labels[list(inst.seeds)]
    return len(np.unique(seed_labels)) == len(seed_labels)


def sigma_tilde(inst: IcInstance, sample: ContagionSample, P: Iterable[int] = ()) -> int:
    """New infections in this contagion network with P removed."""
    keep = np.zeros(inst.g.m, dtype=bool)
    keep[list(sample.activated - frozenset(P))] = True
    e = inst.g.edges[keep]
    reach = _reachable(inst.n, e[:, 0], e[:, 1], inst.seeds)
    return int(reach.sum() - len(inst.seeds))


def rho(inst: IcInstance, sample: ContagionSample, P: Iterable[int] = ()) -> int:
    """New infections restricted to components that are trees in the undeleted contagion network."""
    keep = np.zeros(inst.g.m, dtype=bool)
    keep[list(sample.activated - frozenset(P))] = True
    e = inst.g.edges[keep]
    reach = _reachable(inst.n, e[:, 0], e[:, 1], inst.seeds)
    reach[list(inst.seeds)] = False
    a = sample.analysis
    return int((reach & a.is_tree[a.labels]).sum())


# --- batched sampling -------------------------------------------------------


def _block_labels(n: int, edges: np.ndarray, act: np.ndarray) -> np.ndarray:
    """Component labels, shape (rows, n), for a stack of activated subgraphs; unique across rows."""
    rows, cols = np.nonzero(act)
    u = edges[cols, 0] + rows * n
    v = edges[cols, 1] + rows * n
    total = act.shape[0] * n
    adj = coo_matrix((np.ones(len(u), dtype=np.int8), (u, v)), shape=(total, total))
    _, labels = connected_components(adj, directed=False)
    return labels.reshape(act.shape[0], n)


@dataclass
class _Block:
    act: np.ndarray
    terminals: np.ndarray
    resamples: int = 0


def _filter_bad(inst: IcInstance, labels: np.ndarray, L: int) -> np.ndarray:
    rows = labels.shape[0]
    flat = labels.ravel()
    sizes = np.bincount(flat)
    too_big = (sizes[labels] > L).any(axis=1)
    sl = np.sort(labels[:, list(inst.seeds)], axis=1)
    collide = (np.diff(sl, axis=1) == 0).any(axis=1) if sl.shape[1] > 1 else np.zeros(rows, dtype=bool)
    return too_big | collide


def _draw_block(inst: IcInstance, seed: int, b: int, rows: int, L: int | None, max_resamples: int) -> _Block:
    rng = block_rng(seed, b)
    act = rng.random((rows, inst.g.m)) < inst.p
    terminals = rng.integers(inst.n, size=rows)
    resamples = 0
    if L is not None:
        tries = np.zeros(rows, dtype=np.int64)
        bad = _filter_bad(inst, _block_labels(inst.n, inst.g.edges, act), L)
        while bad.any():
            idx = np.flatnonzero(bad)
            tries[idx] += 1
            if tries.max() > max_resamples:
                raise ResampleExhausted(
                    f"a round needed more than {max_resamples} resamples; the contagion network is "
                    f"too dense for the conditional estimator (L={L})")
            resamples += len(idx)
            act[idx] = rng.random((len(idx), inst.g.m)) < inst.p
            sub = _filter_bad(inst, _block_labels(inst.n, inst.g.edges, act[idx]), L)
            bad[:] = False
            bad[idx[sub]] = True
    return _Block(act, terminals, resamples)


def _blocks(R: int) -> list[tuple[int, int]]:
    return [(b, min(BLOCK, R - b * BLOCK)) for b in range(math.ceil(R / BLOCK))]


def _threshold(inst: IcInstance, cfg: EstimatorConfig) -> int:
    d = cfg.d_end if cfg.d_end is not None else inst.expected_degree_bound()
    if d >= 1:
        raise EstimatorUnavailable(
            f"expected contagion degree bound d_end={d:.3f} >= 1; use estimate_sigma instead")
    return compute_L(d, inst.n)


def _successes(inst: IcInstance, blk: _Block, keep: np.ndarray, conditional: bool) -> np.ndarray:
    seeds = list(inst.seeds)
    act = blk.act & keep[None, :]
    labels = _block_labels(inst.n, inst.g.edges, act)
    rows = np.arange(len(blk.terminals))
    term = labels[rows, blk.terminals]
    ok = (labels[:, seeds] == term[:, None]).any(axis=1) & ~inst.seed_mask()[blk.terminals]
    if conditional:
        full = _block_labels(inst.n, inst.g.edges, blk.act) if not keep.all() else labels
        flat = full.ravel()
        sizes = np.bincount(flat)
        r_idx, cols = np.nonzero(blk.act)
        ecount = np.bincount(full[r_idx, inst.g.edges[cols, 0]], minlength=len(sizes))
        is_tree = ecount == sizes - 1
        ok &= is_tree[full[rows, blk.terminals]]
    return ok


def _estimate(inst: IcInstance, P: Iterable[int], cfg: EstimatorConfig, conditional: bool) -> Estimate:
    R = cfg.rounds_for(inst.n)
    L = _threshold(inst, cfg) if conditional else None
    keep = inst.g.mask(P)

    def run(block):
        b, rows = block
        blk = _draw_block(inst, cfg.seed, b, rows, L, cfg.max_resamples)
        return int(_successes(inst, blk, keep, conditional).sum()), blk.resamples

    parts = ordered_map(run, _blocks(R), cfg.threads)
    succ = sum(s for s, _ in parts)
    res = sum(r for _, r in parts)
    return Estimate(succ * inst.n / R, hoeffding_half_width(inst.n, R), R, succ, res, R - succ)


def estimate_sigma(inst: IcInstance, P: Iterable[int], cfg: EstimatorConfig) -> Estimate:
    """Terminal-reachability estimate of the expected new infections after deleting P."""
    return _estimate(inst, P, cfg, conditional=False)


def estimate_sigma_prime(inst: IcInstance, P: Iterable[int], cfg: EstimatorConfig) -> Estimate:
    """Conditional estimate: resample contagion networks with a component above L vertices or
    two seeds in one component, and count terminals only inside tree components."""
    return _estimate(inst, P, cfg, conditional=True)


# --- greedy with sample reuse ----------------------------------------------


def _separating_bridges(n: int, u: Sequence[int], v: Sequence[int], ids: Sequence[int], root: int,
                        seed_mask: np.ndarray) -> set[int] | None:
    """Edge ids whose removal cuts ``root`` off from every seed; None if no seed is reachable."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for a, b, e in zip(u, v, ids):
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))
    order = {root: 0}
    low = {root: 0}
    seeds_below = {root: int(seed_mask[root])}
    stack = [(root, -1, iter(adj.get(root, ())))]
    tree_edges: list[tuple[int, int, int]] = []
    while stack:
        x, pe, it = stack[-1]
        advanced = False
        for y, e in it:
            if e == pe:
                continue
            if y not in order:
                order[y] = low[y] = len(order)
                seeds_below[y] = int(seed_mask[y])
                stack.append((y, e, iter(adj.get(y, ()))))
                advanced = True
                break
            low[x] = min(low[x], order[y])
        if advanced:
            continue
        stack.pop()
        if stack:
            p = stack[-1][0]
            low[p] = min(low[p], low[x])
            seeds_below[p] += seeds_below[x]
            tree_edges.append((p, x, pe))
    total = seeds_below[root]
    if total == 0:
        return None
    return {e for p, x, e in tree_edges if low[x] > order[p] and seeds_below[x] == total}


@dataclass
class _TerminalSample:
    terminal: int
    u: np.ndarray
    v: np.ndarray
    ids: np.ndarray
    critical: set = field(default_factory=set)


@dataclass
class SampleSet:
    """Successful (terminal, component) samples kept for greedy reuse."""

    inst: IcInstance
    rounds: int
    samples: list
    objective: str
    resamples: int = 0

    def successes(self, P: Iterable[int] = ()) -> int:
        P = set(P)
        smask = self.inst.seed_mask()
        count = 0
        for s in self.samples:
            keep = ~np.isin(s.ids, list(P)) if P else np.ones(len(s.ids), dtype=bool)
            if _separating_bridges(self.inst.n, s.u[keep].tolist(), s.v[keep].tolist(), s.ids[keep].tolist(),
                                   s.terminal, smask) is not None:
                count += 1
        return count

    def estimate(self, P: Iterable[int] = ()) -> Estimate:
        succ = self.successes(P)
        n = self.inst.n
        return Estimate(succ * n / self.rounds, hoeffding_half_width(n, self.rounds), self.rounds, succ,
                        self.resamples, self.rounds - succ)


def draw_sample_set(inst: IcInstance, cfg: EstimatorConfig, objective: str = "sigma") -> SampleSet:
    """Draw the R samples once and keep the ones whose terminal is reached with nothing deleted."""
    if objective not in ("sigma", "sigma_prime"):
        raise ValueError(f"unknown objective {objective!r}")
    conditional = objective == "sigma_prime"
    R = cfg.rounds_for(inst.n)
    L = _threshold(inst, cfg) if conditional else None
    keep_all = np.ones(inst.g.m, dtype=bool)
    edges = inst.g.edges

    def run(block):
        b, rows = block
        blk = _draw_block(inst, cfg.seed, b, rows, L, cfg.max_resamples)
        ok = _successes(inst, blk, keep_all, conditional)
        labels = _block_labels(inst.n, edges, blk.act[ok])
        out = []
        for row, r in enumerate(np.flatnonzero(ok)):
            t = int(blk.terminals[r])
            lab = labels[row]
            sel = blk.act[r] & (lab[edges[:, 0]] == lab[t])
            ids = np.flatnonzero(sel)
            out.append(_TerminalSample(t, edges[ids, 0], edges[ids, 1], ids))
        return out, blk.resamples

    parts = ordered_map(run, _blocks(R), cfg.threads)
    samples = [s for chunk, _ in parts for s in chunk]
    return SampleSet(inst, R, samples, objective, sum(r for _, r in parts))


def greedy_icsir(inst: IcInstance, k: int, cfg: EstimatorConfig, objective: str = "sigma",
                 samples: SampleSet | None = None) -> GreedyTrace:
    """Greedy deletion over ``inst.Q`` scoring every candidate on one shared sample set.

    A candidate's gain is the number of still-successful samples in which it is
    a bridge separating the terminal from all seeds, scaled by n/R.
    """
    labels = sorted(inst.Q)
    if not 0 <= k <= len(labels):
        raise ValueError(f"budget {k} outside [0, {len(labels)}]")
    ss = samples if samples is not None else draw_sample_set(inst, cfg, objective)
    n, R = inst.n, ss.rounds
    smask = inst.seed_mask()
    cand = np.zeros(inst.g.m, dtype=bool)
    cand[labels] = True
    counts = np.zeros(inst.g.m, dtype=np.int64)
    touching: dict[int, list[int]] = {}
    alive = []
    for idx, s in enumerate(ss.samples):
        crit = _separating_bridges(n, s.u.tolist(), s.v.tolist(), s.ids.tolist(), s.terminal, smask)
        s.critical = {e for e in crit if cand[e]}
        for e in s.critical:
            counts[e] += 1
        for e in s.ids[cand[s.ids]].tolist():
            touching.setdefault(e, []).append(idx)
        alive.append(True)
    succ = len(ss.samples)
    trace = GreedyTrace([], [succ * n / R], [], {
        "objective": objective, "rounds": R, "seed": cfg.seed, "resamples": ss.resamples,
        "half_width": hoeffding_half_width(n, R),
    })
    remaining = list(labels)
    P: set[int] = set()
    for _ in range(k):
        t = select_best(remaining, counts[remaining].astype(float))
        e = remaining.pop(t)
        P.add(e)
        lost = 0
        for idx in touching.get(e, ()):
            s = ss.samples[idx]
            if not alive[idx]:
                continue
            for c in s.critical:
                counts[c] -= 1
            if e in s.critical:
                alive[idx] = False
                s.critical = set()
                lost += 1
                continue
            keep = ~np.isin(s.ids, list(P))
            crit = _separating_bridges(n, s.u[keep].tolist(), s.v[keep].tolist(), s.ids[keep].tolist(),
                                       s.terminal, smask)
            s.critical = {c for c in crit if cand[c] and c not in P}
            for c in s.critical:
                counts[c] += 1
        counts[e] = 0
        succ -= lost
        trace.chosen.append(e)
        trace.gains.append(lost * n / R)
        trace.objective_values.append(succ * n / R)
    return trace


# --- exact oracles ----------------------------------------------------------


def _patterns(inst: IcInstance, free: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All activation patterns of the ``free`` edge rows as a bool matrix, with their probabilities."""
    k = len(free)
    if k > MAX_BRUTE_FORCE_EDGES:
        raise ValueError(f"{k} edges to enumerate exceeds the limit {MAX_BRUTE_FORCE_EDGES}")
    codes = np.arange(1 << k, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(k)) & 1).astype(bool)
    p = inst.p[free]
    weight = np.prod(np.where(bits, p, 1.0 - p), axis=1)
    return bits, weight


def _propagate_reach(n: int, u: np.ndarray, v: np.ndarray, bits: np.ndarray, sources: Sequence[int]) -> np.ndarray:
    reach = np.zeros((bits.shape[0], n), dtype=bool)
    reach[:, list(sources)] = True
    while True:
        before = reach.sum()
        for c in range(len(u)):
            a, b = u[c], v[c]
            on = bits[:, c]
            spread = on & (reach[:, a] | reach[:, b])
            reach[:, a] |= spread
            reach[:, b] |= spread
        if reach.sum() == before:
            return reach


def brute_force_expected_sigma(inst: IcInstance, P: Iterable[int] = ()) -> float:
    """Exact expected new infections by enumerating every activation pattern of the surviving edges."""
    free = np.flatnonzero(inst.g.mask(P))
    bits, weight = _patterns(inst, free)
    e = inst.g.edges[free]
    reach = _propagate_reach(inst.n, e[:, 0], e[:, 1], bits, inst.seeds)
    counts = reach.sum(axis=1) - len(inst.seeds)
    return float(weight @ counts)


def _propagate_labels(n: int, u: np.ndarray, v: np.ndarray, bits: np.ndarray) -> np.ndarray:
    labels = np.tile(np.arange(n), (bits.shape[0], 1))
    while True:
        changed = False
        for c in range(len(u)):
            a, b = u[c], v[c]
            on = bits[:, c]
            lo = np.minimum(labels[:, a], labels[:, b])
            upd = on & ((labels[:, a] != lo) | (labels[:, b] != lo))
            if upd.any():
                changed = True
                labels[upd, a] = lo[upd]
                labels[upd, b] = lo[upd]
        if not changed:
            return labels


def brute_force_expected_sigma_prime(inst: IcInstance, P: Iterable[int], L: int) -> float:
    """Exact ``E[rho(P) | no component above L, no two seeds together]`` over all 2^m patterns."""
    free = np.arange(inst.g.m)
    bits, weight = _patterns(inst, free)
    e = inst.g.edges
    labels = _propagate_labels(inst.n, e[:, 0], e[:, 1], bits)
    n = inst.n
    sizes = np.stack([(labels == c).sum(axis=1) for c in range(n)], axis=1)
    ecount = np.stack([(bits & (labels[:, e[:, 0]] == c)).sum(axis=1) for c in range(n)], axis=1)
    seeds = list(inst.seeds)
    seed_count = np.stack([(labels[:, seeds] == c).sum(axis=1) for c in range(n)], axis=1)
    good = (sizes.max(axis=1) <= L) & (seed_count.max(axis=1) <= 1)
    tree_comp = ecount == sizes - 1
    vertex_tree = np.take_along_axis(tree_comp, labels, axis=1)
    keep = inst.g.mask(P)
    reach = _propagate_reach(n, e[keep, 0], e[keep, 1], bits[:, keep], seeds)
    reach[:, seeds] = False
    rho_vals = (reach & vertex_tree).sum(axis=1)
    mass = weight[good].sum()
    if mass == 0:
        raise ValueError("the filtering events have probability zero")
    return float(weight[good] @ rho_vals[good] / mass)


# --- random-graph empirics --------------------------------------------------


@dataclass(frozen=True)
class BranchingStats:
    max_component: np.ndarray  # per draw
    collision: np.ndarray  # per draw: some component holds two or more seeds
    cycle_mass: np.ndarray  # per draw: non-seed vertices in components with a seed and a cycle


def er_contagion_statistics(n: int, d: float, s: int, draws: int, seed: int, threads: int | None = None) -> BranchingStats:
    """Component statistics of G(n, d/n) draws with ``s`` uniformly placed seeds."""
    p = d / n
    total = n * (n - 1) // 2

    def run(block):
        b, rows = block
        rng = block_rng(seed, b)
        us, vs, rr, seed_rows = [], [], [], []
        for r in range(rows):
            idx = _bernoulli_subset(rng, total, p)
            i, j = _pair_from_index(idx, n)
            us.append(i + r * n)
            vs.append(j + r * n)
            rr.append(np.full(len(i), r))
            seed_rows.append(rng.choice(n, size=s, replace=False))
        u = np.concatenate(us)
        v = np.concatenate(vs)
        N = rows * n
        _, lab = connected_components(coo_matrix((np.ones(len(u), dtype=np.int8), (u, v)), shape=(N, N)),
                                      directed=False)
        sizes = np.bincount(lab, minlength=N)
        ecount = np.bincount(lab[u], minlength=N)
        cyclic = ecount > sizes - 1
        lab2 = lab.reshape(rows, n)
        seeds = np.stack(seed_rows)
        sl = np.take_along_axis(lab2, seeds, axis=1)
        srt = np.sort(sl, axis=1)
        coll = (np.diff(srt, axis=1) == 0).any(axis=1) if s > 1 else np.zeros(rows, dtype=bool)
        maxc = sizes[lab2].max(axis=1)
        mass = np.zeros(rows)
        for r in range(rows):
            comps = np.unique(sl[r])
            comps = comps[cyclic[comps]]
            if len(comps):
                mass[r] = sizes[comps].sum() - np.isin(sl[r], comps).sum()
        return maxc, coll, mass

    parts = ordered_map(run, _blocks(draws), threads)
    return BranchingStats(
        np.concatenate([a for a, _, _ in parts]),
        np.concatenate([b for _, b, _ in parts]),
        np.concatenate([c for _, _, c in parts]),
    )
