"""Random problem instances for tests, scripts and the experiment harness."""

from __future__ import annotations

import numpy as np

from .dsir import DsirSystem
from .graph import Graph, gen_er
from .icsir import IcInstance


def bidirected(contacts: Graph) -> tuple[Graph, dict[int, tuple[int, int]]]:
    """Directed copy holding both directions of every contact.

    Row ``c`` is ``u -> v`` and row ``c + m`` is ``v -> u``; the mapping sends
    a contact id to its two directed ids.
    """
    if contacts.directed:
        raise ValueError("expected an undirected contact graph")
    m = contacts.m
    e = contacts.edges
    g = Graph(contacts.n, np.concatenate([e, e[:, ::-1]]), directed=True)
    return g, {int(c): (k, k + m) for k, c in enumerate(contacts.ids.tolist())}


def random_stable_system(rng, n: int, edge_prob: float = 0.4, seeds: int = 2, margin: float = 0.02,
                         D_range=(0.2, 0.5)) -> DsirSystem:
    """Random D-SIR system on a bidirected G(n, p) meeting the row condition with at least ``margin``."""
    rng = np.random.default_rng(rng)
    contacts = gen_er(n, edge_prob, rng.integers(2**63))
    g, _ = bidirected(contacts)
    D = rng.uniform(*D_range, size=n)
    x0 = np.zeros(n)
    chosen = rng.choice(n, size=min(seeds, n), replace=False)
    x0[chosen] = rng.uniform(0.5, 0.9, size=len(chosen))
    r0 = rng.uniform(0.0, 0.05, size=n) * (x0 == 0)
    rates = rng.uniform(0.2, 1.0, size=g.m)
    s0 = 1.0 - x0 - r0
    raw = np.bincount(g.edges[:, 1], weights=rates, minlength=n)
    # scale each head's incoming rates so its row condition holds with slack `margin`
    # and the plain row sum of B stays below one
    budget = np.maximum(D - margin, 0.0) * rng.uniform(0.3, 1.0, size=n)
    scale = np.divide(np.minimum(budget, 0.95 * s0), raw * s0, out=np.zeros(n), where=raw * s0 > 0)
    rates = rates * scale[g.edges[:, 1]]
    return DsirSystem(g, rates, D, x0, r0)


def random_ic_instance(rng, n: int, max_edges: int, p_range=(0.2, 0.8), seeds: int = 1,
                       candidates: int | None = None, edge_prob: float = 0.4) -> IcInstance:
    """Small IC-SIR instance with at most ``max_edges`` contacts (for exact-oracle tests)."""
    rng = np.random.default_rng(rng)
    g = gen_er(n, edge_prob, rng.integers(2**63))
    if g.m > max_edges:
        keep = np.sort(rng.choice(g.m, size=max_edges, replace=False))
        g = Graph(n, g.edges[keep])
    p = rng.uniform(*p_range, size=g.m)
    s = rng.choice(n, size=min(seeds, n), replace=False)
    q = g.m if candidates is None else min(candidates, g.m)
    Q = frozenset(rng.choice(g.m, size=q, replace=False).tolist())
    return IcInstance(g, p, s, Q)
