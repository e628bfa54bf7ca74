"""Greedy edge deletion, baselines, exhaustive optimum and a supermodularity checker."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .graph import Graph

SetFunction = Callable[[frozenset], float]

MAX_ENUMERATION = 10**6
MAX_CHECK_SIZE = 12


@dataclass
class GreedyTrace:
    chosen: list
    objective_values: list[float]  # f(empty), then f after each round
    gains: list[float]
    metadata: dict = field(default_factory=dict)

    @property
    def deletion_set(self) -> frozenset:
        return frozenset(self.chosen)

    def prefix(self, k: int) -> frozenset:
        return frozenset(self.chosen[:k])


def select_best(labels: Sequence, gains: np.ndarray, rtol: float = 1e-12):
    """Index of the largest gain; near-ties (within ``rtol``) go to the smallest label."""
    gains = np.asarray(gains, dtype=float)
    best = gains.max()
    tied = np.flatnonzero(gains >= best - rtol * max(1.0, abs(best)))
    return min(tied.tolist(), key=lambda t: labels[t])


def greedy(f: SetFunction, Q: Iterable, k: int, name: str = "") -> GreedyTrace:
    """Plain greedy: each round removes the element with the largest drop ``f(P) - f(P + e)``."""
    pool = sorted(Q)
    if not 0 <= k <= len(pool):
        raise ValueError(f"budget {k} outside [0, {len(pool)}]")
    P: frozenset = frozenset()
    current = f(P)
    trace = GreedyTrace([], [current], [], {"objective": name, "evaluations": 1})
    for _ in range(k):
        rest = [e for e in pool if e not in P]
        values = np.array([f(P | {e}) for e in rest])
        trace.metadata["evaluations"] += len(rest)
        t = select_best(rest, current - values)
        P = P | {rest[t]}
        trace.chosen.append(rest[t])
        trace.gains.append(float(current - values[t]))
        current = float(values[t])
        trace.objective_values.append(current)
    return trace


def brute_force_opt(f: SetFunction, Q: Iterable, k: int) -> tuple[frozenset, float]:
    """Exact minimiser of ``f`` over k-subsets of Q; ties go to the lexicographically smallest set."""
    pool = sorted(Q)
    if not 0 <= k <= len(pool):
        raise ValueError(f"budget {k} outside [0, {len(pool)}]")
    if math.comb(len(pool), k) > MAX_ENUMERATION:
        raise ValueError(f"C({len(pool)}, {k}) subsets exceeds the enumeration limit {MAX_ENUMERATION}")
    best, best_val = None, math.inf
    for combo in itertools.combinations(pool, k):
        val = f(frozenset(combo))
        if val < best_val:
            best, best_val = combo, val
    return frozenset(best), float(best_val)


def max_degree_order(g: Graph, Q: Iterable[int], k: int) -> list[int]:
    """Edge ids removed by the max-degree heuristic, in removal order.

    Each round takes the vertex of largest current degree (lowest id on ties)
    and removes its lowest-id remaining candidate edge. When that vertex has
    no candidate left, the highest-degree endpoint among the remaining
    candidates is used instead.
    """
    cand = set(Q)
    if not 0 <= k <= len(cand):
        raise ValueError(f"budget {k} outside [0, {len(cand)}]")
    deg = g.degrees().astype(np.int64)
    incident = g.incident
    order: list[int] = []
    for _ in range(k):
        x = int(np.argmax(deg))
        pick = next((e for e in incident[x] if e in cand), None)
        if pick is None:
            ends = {v for e in cand for v in g.endpoints(e)}
            x = min(ends, key=lambda v: (-deg[v], v))
            pick = next(e for e in incident[x] if e in cand)
        cand.discard(pick)
        order.append(pick)
        a, b = g.endpoints(pick)
        deg[a] -= 1
        deg[b] -= 1
    return order


def max_degree_baseline(g: Graph, Q: Iterable[int], k: int) -> frozenset:
    return frozenset(max_degree_order(g, Q, k))


def random_order(Q: Iterable, rng) -> list:
    rng = np.random.default_rng(rng)
    pool = sorted(Q)
    return [pool[t] for t in rng.permutation(len(pool))]


def random_baseline(Q: Iterable, k: int, rng) -> frozenset:
    """Uniform k-subset of Q without replacement."""
    pool = sorted(Q)
    if not 0 <= k <= len(pool):
        raise ValueError(f"budget {k} outside [0, {len(pool)}]")
    return frozenset(random_order(pool, rng)[:k])


@dataclass(frozen=True)
class Violation:
    kind: str  # "supermodular", "submodular" or "monotone"
    smaller: frozenset
    larger: frozenset
    element: object
    lhs: float
    rhs: float


@dataclass(frozen=True)
class SupermodularityVerdict:
    supermodular: bool
    submodular: bool
    monotone: bool  # non-increasing under inclusion
    counterexample: Violation | None
    monotone_counterexample: Violation | None

    @property
    def modular(self) -> bool:
        return self.supermodular and self.submodular


def _superset_extreme(vals: np.ndarray, bits: Iterable[int], pick_max: bool) -> tuple[np.ndarray, np.ndarray]:
    """For every mask, the max (or min) of ``vals`` over its supersets built from ``bits``, with argmax."""
    best = vals.copy()
    arg = np.arange(len(vals))
    masks = np.arange(len(vals))
    better = np.greater if pick_max else np.less
    for b in bits:
        lo = masks[(masks >> b) & 1 == 0]
        hi = lo | (1 << b)
        take = better(best[hi], best[lo])
        best[lo] = np.where(take, best[hi], best[lo])
        arg[lo] = np.where(take, arg[hi], arg[lo])
    return best, arg


def check_supermodular(f: SetFunction, Q: Iterable, tol: float = 1e-9) -> SupermodularityVerdict:
    """Exhaustive check over all nested pairs ``P1 <= P2`` and ``e`` outside ``P2``.

    Supermodular: ``f(P1) - f(P1 + e) >= f(P2) - f(P2 + e) - tol``.
    Monotone: ``f(P1) >= f(P2) - tol``.
    """
    items = sorted(Q)
    q = len(items)
    if q > MAX_CHECK_SIZE:
        raise ValueError(f"|Q| = {q} exceeds the exhaustive-check limit {MAX_CHECK_SIZE}")
    size = 1 << q
    sets = [frozenset(items[b] for b in range(q) if m >> b & 1) for m in range(size)]
    vals = np.array([f(s) for s in sets], dtype=float)
    masks = np.arange(size)

    def first(hits):
        found = [(int(np.flatnonzero(bad)[0]), b) for b, (bad, _) in enumerate(hits) if bad.any()]
        if not found:
            return None
        m, b = min(found)
        return hits[b][1](m, b)

    super_hits, sub_hits = [], []
    for b in range(q):
        without = (masks >> b) & 1 == 0
        d = np.full(size, np.nan)
        d[without] = vals[without] - vals[masks[without] | (1 << b)]
        others = [c for c in range(q) if c != b]
        hi, hi_arg = _superset_extreme(np.where(without, d, -np.inf), others, True)
        lo, lo_arg = _superset_extreme(np.where(without, d, np.inf), others, False)
        sup_bad = without & (d < hi - tol)
        sub_bad = without & (d > lo + tol)
        super_hits.append((sup_bad, lambda m, b, arg=hi_arg, d=d: Violation(
            "supermodular", sets[m], sets[arg[m]], items[b], float(d[m]), float(d[arg[m]]))))
        sub_hits.append((sub_bad, lambda m, b, arg=lo_arg, d=d: Violation(
            "submodular", sets[m], sets[arg[m]], items[b], float(d[m]), float(d[arg[m]]))))
    mono_hi, mono_arg = _superset_extreme(vals, range(q), True)
    mono_bad = vals < mono_hi - tol
    mono = None
    if mono_bad.any():
        m = int(np.flatnonzero(mono_bad)[0])
        mono = Violation("monotone", sets[m], sets[mono_arg[m]], None, float(vals[m]), float(mono_hi[m]))
    sup = first(super_hits)
    sub = first(sub_hits)
    return SupermodularityVerdict(
        supermodular=sup is None,
        submodular=sub is None,
        monotone=mono is None,
        counterexample=sup,
        monotone_counterexample=mono,
    )
