"""Markov-chain SIR Monte Carlo: the ground truth both simplified models are checked against."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graph import Graph
from .stats import BLOCK, Estimate, block_rng, hoeffding_half_width, ordered_map

STEP_CAP = 10**6


@dataclass(frozen=True, eq=False)
class GsirParams:
    """Per-edge infection means ``B`` (edge row ``j -> i``), per-node recovery means ``D``.

    ``x0`` and ``r0`` are per-node probabilities of starting infected or
    removed; each replicate draws its own initial indicators, so 0/1 vectors
    give fixed initial sets.
    """

    g: Graph
    B: np.ndarray
    D: np.ndarray
    x0: np.ndarray
    r0: np.ndarray

    def __post_init__(self):
        if not self.g.directed:
            raise ValueError("G-SIR parameters need a directed graph")
        n, m = self.g.n, self.g.m
        for name, size in (("B", m), ("D", n), ("x0", n), ("r0", n)):
            arr = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if arr.shape != (size,):
                raise ValueError(f"{name} must have length {size}")
            if np.any(arr < 0) or np.any(arr > 1):
                raise ValueError(f"{name} entries must lie in [0, 1]")
            object.__setattr__(self, name, arr)
        if np.any(self.x0 + self.r0 > 1 + 1e-12):
            raise ValueError("x0 + r0 must not exceed 1")

    @classmethod
    def from_sets(cls, g: Graph, B, D, infected: Iterable[int], removed: Iterable[int] = ()) -> GsirParams:
        x0 = np.zeros(g.n)
        r0 = np.zeros(g.n)
        x0[list(infected)] = 1.0
        r0[list(removed)] = 1.0
        if np.any(x0 + r0 > 1):
            raise ValueError("initial infected and removed sets must be disjoint")
        return cls(g, B, D, x0, r0)

    @classmethod
    def from_dsir(cls, sys) -> GsirParams:
        return cls(sys.g, sys.rates, sys.D, sys.x0, sys.r0)

    @property
    def n(self) -> int:
        return self.g.n


def simulate_batch(params: GsirParams, P: Iterable[int], reps: int, rng) -> np.ndarray:
    """New-infection counts of ``reps`` independent synchronous runs."""
    rng = np.random.default_rng(rng)
    n = params.n
    keep = params.g.mask(P) & (params.B > 0)
    src = params.g.edges[keep, 0]
    dst = params.g.edges[keep, 1]
    b = params.B[keep]
    u = rng.random((reps, n))
    I = u < params.x0
    R = (~I) & (u < params.x0 + params.r0)
    start = (I | R).sum(axis=1)
    active = np.arange(reps)
    steps = 0
    while len(active) and steps < STEP_CAP:
        Ia, Ra = I[active], R[active]
        S = ~(Ia | Ra)
        exposed = Ia[:, src] & S[:, dst]
        # a run whose infected nodes can no longer reach a susceptible one is finished
        live = exposed.any(axis=1)
        active, Ia, Ra, S, exposed = active[live], Ia[live], Ra[live], S[live], exposed[live]
        if not len(active):
            break
        rows = len(active)
        hit = exposed & (rng.random((rows, len(b))) < b)
        r_idx, e_idx = np.nonzero(hit)
        infected_by = np.zeros(rows * n, dtype=bool)
        infected_by[r_idx * n + dst[e_idx]] = True
        recover = rng.random((rows, n)) < params.D
        I[active] = (Ia & ~recover) | (S & infected_by.reshape(rows, n))
        R[active] = Ra | (Ia & recover)
        steps += 1
    return (I | R).sum(axis=1) - start


def simulate_once(params: GsirParams, P: Iterable[int], rng) -> int:
    return int(simulate_batch(params, P, 1, rng)[0])


def estimate_infections(params: GsirParams, P: Iterable[int], reps: int, seed: int = 0,
                        threads: int | None = None) -> Estimate:
    """Mean new infections over ``reps`` runs with a 90% Hoeffding half-width (range n)."""
    if reps < 1:
        raise ValueError("reps must be at least 1")
    P = frozenset(P)
    blocks = [(k, min(BLOCK, reps - k * BLOCK)) for k in range(math.ceil(reps / BLOCK))]
    parts = ordered_map(lambda blk: simulate_batch(params, P, blk[1], block_rng(seed, blk[0])), blocks, threads)
    counts = np.concatenate(parts)
    return Estimate(float(counts.mean()), hoeffding_half_width(params.n, reps), reps)


def sample_counts(params: GsirParams, P: Iterable[int], reps: int, seed: int = 0) -> np.ndarray:
    """Raw per-run counts, in the same block order ``estimate_infections`` uses."""
    P = frozenset(P)
    blocks = [(k, min(BLOCK, reps - k * BLOCK)) for k in range(math.ceil(reps / BLOCK))]
    return np.concatenate([simulate_batch(params, P, rows, block_rng(seed, k)) for k, rows in blocks])
