"""Contact-network containers, random generators and structural analysis.

Edges carry stable integer ids. Deletion sets are plain ``frozenset``s of
those ids, so a directed graph can drop one direction of a reciprocal pair
without touching the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

EdgeSet = frozenset  # frozenset[int] of edge ids


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    edges: np.ndarray  # (m, 2) int64, column 0 = tail/source, column 1 = head
    directed: bool = False
    ids: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", edges)
        m = len(edges)
        ids = np.arange(m, dtype=np.int64) if self.ids is None else np.asarray(self.ids, dtype=np.int64)
        if ids.shape != (m,):
            raise ValueError("ids must have one entry per edge")
        if len(np.unique(ids)) != m:
            raise ValueError("edge ids must be unique")
        object.__setattr__(self, "ids", ids)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (m,):
                raise ValueError("weights must have one entry per edge")
            object.__setattr__(self, "weights", w)
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        if m:
            if edges.min() < 0 or edges.max() >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loops are not allowed")
            keys = edges if self.directed else np.sort(edges, axis=1)
            if len(np.unique(keys, axis=0)) != m:
                raise ValueError("duplicate edge")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], directed: bool = False) -> Graph:
        return cls(n, np.array(list(edges), dtype=np.int64).reshape(-1, 2), directed)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def dense_ids(self) -> bool:
        return bool(np.array_equal(self.ids, np.arange(self.m)))

    @cached_property
    def _index_of(self) -> dict[int, int]:
        return {int(e): k for k, e in enumerate(self.ids)}

    def index(self, edge_id: int) -> int:
        """Row of ``edges`` holding ``edge_id``."""
        try:
            return self._index_of[int(edge_id)]
        except KeyError:
            raise KeyError(f"unknown edge id {edge_id}") from None

    def endpoints(self, edge_id: int) -> tuple[int, int]:
        u, v = self.edges[self.index(edge_id)]
        return int(u), int(v)

    def edge_id(self, u: int, v: int) -> int:
        """Id of the edge u->v (or {u, v} when undirected)."""
        key = (u, v) if self.directed else (min(u, v), max(u, v))
        try:
            return self._pair_to_id[key]
        except KeyError:
            raise KeyError(f"no edge {key}") from None

    @cached_property
    def _pair_to_id(self) -> dict[tuple[int, int], int]:
        out = {}
        for (u, v), e in zip(self.edges.tolist(), self.ids.tolist()):
            out[(u, v) if self.directed else (min(u, v), max(u, v))] = e
        return out

    def edge_pairs(self) -> set[tuple[int, int]]:
        if self.directed:
            return {(u, v) for u, v in self.edges.tolist()}
        return {(min(u, v), max(u, v)) for u, v in self.edges.tolist()}

    def degrees(self) -> np.ndarray:
        """Total degree (in + out for directed graphs)."""
        return np.bincount(self.edges.ravel(), minlength=self.n)

    @cached_property
    def incident(self) -> list[list[int]]:
        """Per vertex, the edge ids touching it, in increasing id order."""
        out: list[list[int]] = [[] for _ in range(self.n)]
        order = np.argsort(self.ids, kind="stable")
        for k in order.tolist():
            u, v = self.edges[k]
            e = int(self.ids[k])
            out[u].append(e)
            out[v].append(e)
        return out

    def mask(self, deleted: Iterable[int] = ()) -> np.ndarray:
        """Boolean row mask of the edges that survive ``deleted``."""
        keep = np.ones(self.m, dtype=bool)
        for e in deleted:
            keep[self.index(e)] = False
        return keep

    def compact(self) -> Graph:
        """Same graph with edge ids renumbered densely in row order."""
        return Graph(self.n, self.edges.copy(), self.directed, None, self.weights)


@dataclass(frozen=True, eq=False)
class ComponentAnalysis:
    labels: np.ndarray  # component id per vertex
    sizes: np.ndarray
    edge_counts: np.ndarray
    is_tree: np.ndarray
    bridges: frozenset  # all bridge edge ids
    component_bridges: tuple  # per component frozenset of bridge ids
    vertices: tuple  # per component sorted vertex array

    @property
    def count(self) -> int:
        return len(self.sizes)


@dataclass(frozen=True, eq=False)
class HardnessInstance:
    graph: Graph
    seeds: tuple[int, int, int]
    candidates: frozenset
    k: int
    z: int
    base_n: int


def components(n: int, u: np.ndarray, v: np.ndarray) -> tuple[int, np.ndarray]:
    """Connected components of the undirected graph with edge arrays u, v."""
    adj = coo_matrix((np.ones(len(u), dtype=np.int8), (u, v)), shape=(n, n))
    return connected_components(adj, directed=False)


def find_bridges(n: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Boolean mask over edge rows marking bridges (iterative lowlink DFS).

    The parent edge is skipped by row index, not by vertex, so the routine
    stays correct if parallel edges are ever present.
    """
    m = len(u)
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for k, (a, b) in enumerate(zip(u.tolist(), v.tolist())):
        adj[a].append((b, k))
        adj[b].append((a, k))
    order = [-1] * n
    low = [0] * n
    is_bridge = np.zeros(m, dtype=bool)
    counter = 0
    for root in range(n):
        if order[root] != -1 or not adj[root]:
            continue
        order[root] = low[root] = counter
        counter += 1
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            x, parent_edge, it = stack[-1]
            advanced = False
            for y, k in it:
                if k == parent_edge:
                    continue
                if order[y] == -1:
                    order[y] = low[y] = counter
                    counter += 1
                    stack.append((y, k, iter(adj[y])))
                    advanced = True
                    break
                low[x] = min(low[x], order[y])
            if advanced:
                continue
            stack.pop()
            if stack:
                p = stack[-1][0]
                low[p] = min(low[p], low[x])
                if low[x] > order[p]:
                    is_bridge[parent_edge] = True
    return is_bridge


def analyze(g: Graph, deleted: Iterable[int] = ()) -> ComponentAnalysis:
    """Components, tree flags and bridges of ``g`` minus ``deleted`` (edges taken as undirected)."""
    keep = g.mask(deleted)
    u, v = g.edges[keep, 0], g.edges[keep, 1]
    ids = g.ids[keep]
    count, labels = components(g.n, u, v)
    sizes = np.bincount(labels, minlength=count)
    edge_counts = np.bincount(labels[u], minlength=count)
    is_tree = edge_counts == sizes - 1
    bmask = find_bridges(g.n, u, v)
    per_comp: list[set[int]] = [set() for _ in range(count)]
    for e, a in zip(ids[bmask].tolist(), u[bmask].tolist()):
        per_comp[labels[a]].add(e)
    order = np.argsort(labels, kind="stable")
    split = np.split(order, np.cumsum(sizes)[:-1]) if count else []
    return ComponentAnalysis(
        labels=labels,
        sizes=sizes,
        edge_counts=edge_counts,
        is_tree=is_tree,
        bridges=frozenset(ids[bmask].tolist()),
        component_bridges=tuple(frozenset(s) for s in per_comp),
        vertices=tuple(split),
    )


def delete_edges(g: Graph, P: Iterable[int]) -> Graph:
    keep = g.mask(P)
    w = None if g.weights is None else g.weights[keep]
    return Graph(g.n, g.edges[keep], g.directed, g.ids[keep], w)


# --- generators -------------------------------------------------------------


def _pair_from_index(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Map linear indices into the row-major upper triangle (i < j) back to pairs."""
    k = np.asarray(k, dtype=np.int64)
    # row i starts at offset i*n - i*(i+1)/2
    i = np.floor((2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8.0 * k)) / 2).astype(np.int64)
    i = np.clip(i, 0, max(n - 2, 0))
    start = i * n - i * (i + 1) // 2
    for _ in range(2):  # float rounding can be off by one in either direction
        over = start > k
        i[over] -= 1
        start = i * n - i * (i + 1) // 2
        nxt = (i + 1) * n - (i + 1) * (i + 2) // 2
        under = nxt <= k
        i[under] += 1
        start = i * n - i * (i + 1) // 2
    j = k - start + i + 1
    return i, j


def _bernoulli_subset(rng: np.random.Generator, total: int, p: float) -> np.ndarray:
    """Sorted indices of a Bernoulli(p) subset of range(total)."""
    if total == 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    count = rng.binomial(total, p)
    return np.sort(rng.choice(total, size=count, replace=False)).astype(np.int64)


def gen_er(n: int, p: float, seed) -> Graph:
    """G(n, p): every unordered pair present independently with probability p."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    idx = _bernoulli_subset(rng, n * (n - 1) // 2, p)
    i, j = _pair_from_index(idx, n)
    return Graph(n, np.column_stack([i, j]))


def gen_sbm(block_size: int, kappa: int, Q, seed) -> Graph:
    """Stochastic block model with ``kappa`` communities of ``block_size`` vertices each."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if Q.shape != (kappa, kappa):
        raise ValueError(f"Q must be {kappa}x{kappa}")
    if not np.allclose(Q, Q.T, atol=0.0):
        raise ValueError("Q must be symmetric")
    if np.any(Q < 0) or np.any(Q > 1):
        raise ValueError("Q entries must lie in [0, 1]")
    if block_size < 1 or kappa < 1:
        raise ValueError("block_size and kappa must be positive")
    rng = np.random.default_rng(seed)
    parts = []
    b = block_size
    for a in range(kappa):
        for c in range(a, kappa):
            if a == c:
                idx = _bernoulli_subset(rng, b * (b - 1) // 2, Q[a, a])
                i, j = _pair_from_index(idx, b)
                parts.append(np.column_stack([i + a * b, j + a * b]))
            else:
                idx = _bernoulli_subset(rng, b * b, Q[a, c])
                parts.append(np.column_stack([idx // b + a * b, idx % b + c * b]))
    edges = np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
    edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    return Graph(kappa * b, edges)


def perturb_adversarial(g: Graph, num_adv: int, nu: int, seed) -> Graph:
    """Give ``num_adv`` uniformly chosen vertices ``nu`` new edges each to random non-neighbours."""
    if g.directed:
        raise ValueError("adversarial perturbation expects an undirected graph")
    if not 0 <= num_adv <= g.n:
        raise ValueError("num_adv must lie in [0, n]")
    if num_adv == 0 or nu == 0:
        return g
    rng = np.random.default_rng(seed)
    present = g.edge_pairs()
    neighbours: list[set[int]] = [set() for _ in range(g.n)]
    for a, b in present:
        neighbours[a].add(b)
        neighbours[b].add(a)
    new_edges = []
    for a in sorted(rng.choice(g.n, size=num_adv, replace=False).tolist()):
        free = np.array([x for x in range(g.n) if x != a and x not in neighbours[a]], dtype=np.int64)
        if len(free) < nu:
            raise ValueError(f"vertex {a} has only {len(free)} non-neighbours, cannot add {nu}")
        for b in sorted(rng.choice(free, size=nu, replace=False).tolist()):
            neighbours[a].add(b)
            neighbours[b].add(a)
            new_edges.append((min(a, b), max(a, b)))
    edges = np.concatenate([g.edges, np.array(new_edges, dtype=np.int64).reshape(-1, 2)])
    ids = np.concatenate([g.ids, g.ids.max(initial=-1) + 1 + np.arange(len(new_edges))])
    return Graph(g.n, edges, False, ids)


def degree_cap_preprocess(g: Graph, max_deg: int) -> tuple[Graph, frozenset]:
    """Strip edges from maximum-degree vertices until every degree is at most ``max_deg``.

    Ties go to the lowest vertex id, then to its lowest edge id.
    """
    if max_deg < 0:
        raise ValueError("max_deg must be non-negative")
    deg = g.degrees().astype(np.int64)
    alive = {v: list(es) for v, es in enumerate(g.incident)}
    removed: set[int] = set()
    while g.n and deg.max() > max_deg:
        x = int(np.argmax(deg))
        e = next(e for e in alive[x] if e not in removed)
        removed.add(e)
        a, b = g.endpoints(e)
        deg[a] -= 1
        deg[b] -= 1
    return delete_edges(g, removed), frozenset(removed)


def build_hardness_instance(g3: Graph, b: int) -> HardnessInstance:
    """Reduction from minimum bisection of a 3-regular graph.

    Three star centres (the seeds) are attached to every vertex of ``g3``;
    every edge is a candidate, the budget is ``b + 3n/2`` and the
    reachability threshold ``3 + n/2``.
    """
    n = g3.n
    if g3.directed:
        raise ValueError("expected an undirected graph")
    if n % 2:
        raise ValueError("vertex count must be even")
    if n == 0 or np.any(g3.degrees() != 3):
        raise ValueError("graph must be 3-regular")
    base = g3.compact().edges
    stars = [(n + s, v) for s in range(3) for v in range(n)]
    edges = np.concatenate([base, np.array(stars, dtype=np.int64)])
    G = Graph(n + 3, edges)
    return HardnessInstance(
        graph=G,
        seeds=(n, n + 1, n + 2),
        candidates=frozenset(range(G.m)),
        k=b + 3 * n // 2,
        z=3 + n // 2,
        base_n=n,
    )


# --- edge-list I/O ----------------------------------------------------------


class EdgeListError(ValueError):
    pass


def load_edge_list(path, directed: bool | None = None) -> Graph:
    """Read whitespace-separated ``u v [weight]`` lines; ``#`` starts a comment.

    The header comments ``# nodes: N`` and ``# directed`` written by
    :func:`save_edge_list` are honoured so isolated vertices survive a round trip.
    """
    n_header = None
    header_directed = False
    edges, weights, linenos = [], [], []
    has_weight = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line, _, comment = raw.partition("#")
        comment = comment.strip().lower()
        if not line.strip():
            if comment.startswith("nodes:"):
                try:
                    n_header = int(comment.split(":", 1)[1])
                except ValueError:
                    raise EdgeListError(f"line {lineno}: bad nodes header") from None
            elif comment == "directed":
                header_directed = True
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListError(f"line {lineno}: expected 2 or 3 columns, got {len(parts)}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(f"line {lineno}: non-integer endpoint in {line.strip()!r}") from None
        if u < 0 or v < 0:
            raise EdgeListError(f"line {lineno}: negative vertex id")
        if u == v:
            raise EdgeListError(f"line {lineno}: self-loop on {u}")
        if has_weight is None:
            has_weight = len(parts) == 3
        elif has_weight != (len(parts) == 3):
            raise EdgeListError(f"line {lineno}: inconsistent column count")
        if has_weight:
            try:
                weights.append(float(parts[2]))
            except ValueError:
                raise EdgeListError(f"line {lineno}: bad weight {parts[2]!r}") from None
        edges.append((u, v))
        linenos.append(lineno)
    is_directed = header_directed if directed is None else directed
    seen = set()
    for lineno, (u, v) in zip(linenos, edges):
        key = (u, v) if is_directed else (min(u, v), max(u, v))
        if key in seen:
            raise EdgeListError(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
    n = max((max(u, v) for u, v in edges), default=-1) + 1
    if n_header is not None:
        if n_header < n:
            raise EdgeListError(f"nodes header {n_header} smaller than largest vertex id {n - 1}")
        n = n_header
    return Graph(n, np.array(edges, dtype=np.int64).reshape(-1, 2), is_directed, None, weights if has_weight else None)


def save_edge_list(g: Graph, path) -> None:
    lines = [f"# nodes: {g.n}"]
    if g.directed:
        lines.append("# directed")
    for k, (u, v) in enumerate(g.edges.tolist()):
        if g.weights is None:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{u} {v} {float(g.weights[k])!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def expected_er_edges(n: int, p: float) -> tuple[float, float]:
    """Mean and standard deviation of the G(n, p) edge count."""
    pairs = n * (n - 1) / 2
    return pairs * p, math.sqrt(pairs * p * (1 - p))
