"""Deterministic mean-field SIR dynamics and the supermodular infection bound.

For a directed edge ``j -> i`` with rate ``B[i, j]`` the state evolves as::

    x(t+1) = x(t) + (I - X(t) - R(t)) B x(t) - D x(t)
    r(t+1) = r(t) + D x(t)

``sigma_hat`` bounds the cumulative new infections by summing the linearised
dynamics ``M = I - D + (I - X(0) - R(0)) B`` as a geometric series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg

from .graph import Graph
from .optimize import GreedyTrace, select_best

STATE_TOL = 1e-12


class UnstableSystemError(ValueError):
    """The linearised dynamics do not contract, so the bound is undefined."""


class NonConvergenceError(RuntimeError):
    def __init__(self, message: str, value: float, steps: int):
        super().__init__(message)
        self.value = value
        self.steps = steps


@dataclass(frozen=True, eq=False)
class DsirSystem:
    g: Graph  # directed; row (j, i) carries rate B[i, j]
    rates: np.ndarray
    D: np.ndarray
    x0: np.ndarray
    r0: np.ndarray

    def __post_init__(self):
        if not self.g.directed:
            raise ValueError("D-SIR systems need a directed graph")
        if not self.g.dense_ids:
            raise ValueError("D-SIR systems need dense edge ids; call Graph.compact() first")
        n, m = self.g.n, self.g.m
        for name, size in (("rates", m), ("D", n), ("x0", n), ("r0", n)):
            arr = np.asarray(getattr(self, name), dtype=float).reshape(-1)
            if arr.shape != (size,):
                raise ValueError(f"{name} must have length {size}")
            object.__setattr__(self, name, arr)
        if np.any(self.rates < 0):
            raise ValueError("infection rates must be non-negative")
        if np.any(self.D < 0) or np.any(self.D >= 1):
            raise ValueError("healing rates must lie in [0, 1)")
        if np.any(self.x0 < 0) or np.any(self.r0 < 0) or np.any(self.x0 + self.r0 > 1 + STATE_TOL):
            raise ValueError("initial probabilities must satisfy x0, r0 >= 0 and x0 + r0 <= 1")
        if np.any(self.row_sums() >= 1):
            raise ValueError("every row sum of B must be below 1")

    @property
    def n(self) -> int:
        return self.g.n

    @property
    def susceptible0(self) -> np.ndarray:
        return 1.0 - self.x0 - self.r0

    def row_sums(self) -> np.ndarray:
        return np.bincount(self.g.edges[:, 1], weights=self.rates, minlength=self.n)

    def B(self, P: Iterable[int] = ()) -> np.ndarray:
        """Dense infection-rate matrix with the rows of deleted edges zeroed."""
        keep = self.g.mask(P)
        out = np.zeros((self.n, self.n))
        src, dst = self.g.edges[keep, 0], self.g.edges[keep, 1]
        out[dst, src] = self.rates[keep]
        return out


@dataclass(frozen=True)
class DsirState:
    x: np.ndarray
    r: np.ndarray
    t: int = 0


def step(sys: DsirSystem, P: Iterable[int], s: DsirState, B: np.ndarray | None = None) -> DsirState:
    B = sys.B(P) if B is None else B
    x = s.x + (1.0 - s.x - s.r) * (B @ s.x) - sys.D * s.x
    r = s.r + sys.D * s.x
    for name, arr in (("x", x), ("r", r), ("x+r", x + r)):
        if arr.min() < -STATE_TOL or arr.max() > 1 + STATE_TOL:
            raise ValueError(f"state {name} left [0, 1] at t={s.t + 1}; parameters are invalid")
    return DsirState(np.clip(x, 0.0, 1.0), np.clip(r, 0.0, 1.0), s.t + 1)


def simulate_sigma(sys: DsirSystem, P: Iterable[int] = (), tol: float = 1e-10, t_max: int = 10**5) -> float:
    """New infections ``|m(t) - m(0)|_1``, iterating until ``max x < tol``.

    Raises :class:`NonConvergenceError` (carrying the partial value) when
    ``t_max`` steps do not suffice.
    """
    B = sys.B(P)
    s = DsirState(sys.x0.copy(), sys.r0.copy())
    m0 = sys.x0 + sys.r0
    while s.x.max(initial=0.0) >= tol:
        if s.t >= t_max:
            value = float(np.abs(s.x + s.r - m0).sum())
            raise NonConvergenceError(f"no convergence within {t_max} steps", value, s.t)
        s = step(sys, P, s, B)
    return float(np.abs(s.x + s.r - m0).sum())


def transition_matrix(sys: DsirSystem, P: Iterable[int] = ()) -> np.ndarray:
    """``M = I - diag(D) + diag(1 - x0 - r0) B`` with deleted edges removed."""
    return np.diag(1.0 - sys.D) + sys.susceptible0[:, None] * sys.B(P)


@dataclass(frozen=True)
class Stability:
    margin: float
    stable: bool


def check_stability(sys: DsirSystem, Q: Iterable[int] | None = None) -> Stability:
    """Largest ``eps`` with ``(1 - x0_i - r0_i) * sum_j B_ij <= D_i - eps`` for all i.

    The empty deletion set dominates every subset of Q, so Q does not change
    the margin. A positive margin bounds the infinity norm (max row sum) and the
    spectral radius of every ``M_{-P}`` by ``1 - eps``; the 2-norm can exceed it.
    """
    slack = sys.D - sys.susceptible0 * sys.row_sums()
    margin = float(slack.min(initial=np.inf)) if sys.n else np.inf
    return Stability(max(margin, 0.0), margin > 0)


def spectral_radius(M: np.ndarray) -> float:
    return float(np.abs(np.linalg.eigvals(M)).max(initial=0.0)) if M.size else 0.0


def sigma_hat_matrix(M: np.ndarray, D: np.ndarray, x0: np.ndarray) -> float:
    """``1^T (M + diag(D) - I)(I - M)^{-1} x0`` for an arbitrary transition matrix."""
    n = len(x0)
    A = np.eye(n) - M
    y = np.linalg.solve(A, x0)
    return float((M + np.diag(D) - np.eye(n)).sum(axis=0) @ y)


def sigma_hat(sys: DsirSystem, P: Iterable[int] = (), check: bool = True) -> float:
    """Supermodular upper bound on the new infections after deleting P."""
    P = frozenset(P)
    M = transition_matrix(sys, P)
    if check and spectral_radius(M) >= 1.0:
        raise UnstableSystemError("spectral radius of the transition matrix is >= 1")
    try:
        lu = scipy.linalg.lu_factor(np.eye(sys.n) - M, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise UnstableSystemError(str(exc)) from exc
    y = scipy.linalg.lu_solve(lu, sys.x0)
    v = sys.susceptible0 @ sys.B(P)  # column sums of (M + D - I)
    return float(v @ y)


class SurrogateCache:
    """Keeps ``H = (I - M_{-P})^{-1}`` and the vectors needed for O(1) marginal gains.

    With ``g = H x0``, ``u = v^T H`` and ``s = v^T g`` (``v`` the column sums of
    ``M_{-P} + D - I``), deleting a set S of edges ``(j_a -> i_a)`` with
    weights ``c_a = (1 - x0_i - r0_i) B_ij`` changes the bound by::

        ((u_I + 1) * c)^T  (I + H[J, I] diag(c))^{-1}  g_J

    which is the Woodbury form of the rank-|S| update.
    """

    def __init__(self, sys: DsirSystem, P: Iterable[int] = ()):
        self.sys = sys
        self.P = frozenset(P)
        self.src = sys.g.edges[:, 0]
        self.dst = sys.g.edges[:, 1]
        self.c = sys.susceptible0[self.dst] * sys.rates
        self.c[list(self.P)] = 0.0
        M = transition_matrix(sys, self.P)
        self.H = scipy.linalg.inv(np.eye(sys.n) - M, check_finite=False)
        self.v = np.bincount(self.src, weights=self.c, minlength=sys.n)
        self._refresh()

    def _refresh(self):
        self.gvec = self.H @ self.sys.x0
        self.u = self.v @ self.H
        self.value = float(self.v @ self.gvec)

    def gains(self, groups: Sequence[Sequence[int]]) -> np.ndarray:
        """Predicted drop of the bound for each group of edge ids."""
        out = np.zeros(len(groups))
        by_size: dict[int, list[int]] = {}
        for t, grp in enumerate(groups):
            by_size.setdefault(len(grp), []).append(t)
        for size, rows in by_size.items():
            E = np.array([groups[t] for t in rows], dtype=np.int64).reshape(len(rows), size)
            c = self.c[E]
            I, J = self.dst[E], self.src[E]
            lhs = (self.u[I] + 1.0) * c
            gJ = self.gvec[J]
            if size == 1:
                out[rows] = lhs[:, 0] * gJ[:, 0] / (1.0 + self.H[J[:, 0], I[:, 0]] * c[:, 0])
                continue
            K = self.H[J[:, :, None], I[:, None, :]] * c[:, None, :]
            K += np.eye(size)
            sol = np.linalg.solve(K, gJ[:, :, None])[:, :, 0]
            out[rows] = np.einsum("ij,ij->i", lhs, sol)
        return out

    def apply(self, edges: Sequence[int]) -> None:
        E = np.array([e for e in edges if self.c[e] != 0.0], dtype=np.int64)
        self.P = self.P | frozenset(edges)
        if len(E):
            c = self.c[E]
            I, J = self.dst[E], self.src[E]
            K = np.eye(len(E)) + self.H[np.ix_(J, I)] * c[None, :]
            self.H -= (self.H[:, I] * c[None, :]) @ np.linalg.solve(K, self.H[J, :])
            np.subtract.at(self.v, J, c)
            self.c[E] = 0.0
        self._refresh()


def greedy_dsir(
    sys: DsirSystem,
    Q: Iterable,
    k: int,
    groups: Mapping | None = None,
) -> GreedyTrace:
    """Greedy minimisation of ``sigma_hat`` using rank-one inverse updates.

    ``Q`` holds candidate labels. By default a label is a directed edge id;
    ``groups`` maps a label to several edge ids deleted together (both
    directions of a physical contact, say).
    """
    labels = sorted(Q)
    if not 0 <= k <= len(labels):
        raise ValueError(f"budget {k} outside [0, {len(labels)}]")
    members = {lab: tuple(groups[lab]) if groups is not None else (lab,) for lab in labels}
    stability = check_stability(sys)
    M0 = transition_matrix(sys)
    if spectral_radius(M0) >= 1.0:
        raise UnstableSystemError("spectral radius of the transition matrix is >= 1")
    cache = SurrogateCache(sys)
    trace = GreedyTrace(
        [], [cache.value], [],
        {"objective": "sigma_hat", "guarantee": stability.stable, "margin": stability.margin},
    )
    remaining = list(labels)
    for _ in range(k):
        gains = cache.gains([members[lab] for lab in remaining])
        t = select_best(remaining, gains)
        lab = remaining.pop(t)
        before = cache.value
        cache.apply(members[lab])
        trace.chosen.append(lab)
        trace.gains.append(before - cache.value)
        trace.objective_values.append(cache.value)
    trace.metadata["deleted_edges"] = sorted(cache.P)
    return trace


def nonconvexity_example_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Two 3-node star/path instances whose bound is not convex in the edge weights.

    Returns ``(M1, M2, D, x0)``.
    """
    D = np.full(3, 0.25)
    x0 = np.array([1.0, 0.0, 0.0])
    s0 = 1.0 - x0
    mats = []
    for contacts in ([(0, 1), (0, 2)], [(0, 1), (1, 2)]):
        B = np.zeros((3, 3))
        for a, b in contacts:
            B[a, b] = B[b, a] = 1.0 / 12.0
        mats.append(np.eye(3) - np.diag(D) + s0[:, None] * B)
    return mats[0], mats[1], D, x0


@dataclass
class SystemFile:
    """Parsed D-SIR system file: the system plus its candidate edge ids."""

    system: DsirSystem
    candidates: list[int] = field(default_factory=list)


def system_from_dict(doc: Mapping) -> SystemFile:
    """Build a system from the mapping form of a system file (see README)."""
    n = int(doc["n"])
    rows = doc.get("edges", [])
    edges = [(int(r[0]), int(r[1])) for r in rows]
    rates = [float(r[2]) for r in rows]
    g = Graph.from_edges(n, edges, directed=True)
    zeros = [0.0] * n
    D = doc["D"]
    D = [float(D)] * n if np.isscalar(D) else D
    sys = DsirSystem(g, np.array(rates), np.array(D, dtype=float),
                     np.array(doc.get("x0", zeros), dtype=float), np.array(doc.get("r0", zeros), dtype=float))
    cands = doc.get("candidates", list(range(g.m)))
    return SystemFile(sys, [int(c) for c in cands])
