import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epimit import icsir
from epimit.graph import Graph
from epimit.instances import random_ic_instance
from epimit.optimize import check_supermodular

CFG = icsir.EstimatorConfig(rounds=10_000, seed=1)


def inst_of(n, edges, p, seeds=(0,), Q=None):
    g = Graph.from_edges(n, edges)
    p = np.broadcast_to(np.asarray(p, dtype=float), (g.m,))
    return icsir.IcInstance(g, p, seeds, frozenset(range(g.m)) if Q is None else Q)


def reach_oracle(inst, active):
    """Non-seed vertices reachable from the seeds through ``active`` edge rows (plain BFS)."""
    adj = {v: [] for v in range(inst.n)}
    for e in active:
        a, b = inst.g.edges[e]
        adj[int(a)].append(int(b))
        adj[int(b)].append(int(a))
    seen = set(inst.seeds)
    todo = list(inst.seeds)
    while todo:
        for w in adj[todo.pop()]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen - set(inst.seeds)


def exact_by_enumeration(inst, P=()):
    live = [e for e in range(inst.g.m) if e not in set(P)]
    total = 0.0
    for bits in itertools.product((0, 1), repeat=len(live)):
        w = 1.0
        act = []
        for e, b in zip(live, bits):
            w *= inst.p[e] if b else 1 - inst.p[e]
            if b:
                act.append(e)
        total += w * len(reach_oracle(inst, act))
    return total


# --- instance validation -------------------------------------------------------


def test_instance_validation():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError, match="seed"):
        icsir.IcInstance(g, [0.5], ())
    with pytest.raises(ValueError, match="probabilit"):
        icsir.IcInstance(g, [1.5], (0,))
    with pytest.raises(ValueError, match="undirected"):
        icsir.IcInstance(Graph.from_edges(3, [(0, 1)], directed=True), [0.5], (0,))
    with pytest.raises(ValueError, match="candidate"):
        icsir.IcInstance(g, [0.5], (0,), frozenset({4}))


# --- cascade --------------------------------------------------------------------


def test_cascade_extremes():
    inst = inst_of(4, [(0, 1), (1, 2), (2, 3)], 0.0)
    assert all(icsir.cascade(inst, (), s) == set() for s in range(20))
    inst = inst_of(4, [(0, 1), (1, 2), (2, 3)], 1.0)
    assert icsir.cascade(inst, (), 0) == {1, 2, 3}
    assert icsir.cascade(inst, {1}, 0) == {1}


def test_cascade_bernoulli_frequency():
    inst = inst_of(2, [(0, 1)], 0.3)
    rng = np.random.default_rng(3)
    hits = np.mean([len(icsir.cascade(inst, (), rng)) for _ in range(10_000)])
    assert abs(hits - 0.3) <= 3 * math.sqrt(0.3 * 0.7 / 10_000)


# --- estimators -----------------------------------------------------------------


def test_estimate_sigma_examples():
    assert icsir.estimate_sigma(inst_of(3, [(0, 1), (1, 2)], 0.0), (), CFG).mean == 0.0
    two = inst_of(2, [(0, 1)], 0.5)
    est = icsir.estimate_sigma(two, (), CFG)
    assert abs(est.mean - 0.5) <= est.half_width
    path = inst_of(3, [(0, 1), (1, 2)], 0.5)
    assert icsir.brute_force_expected_sigma(path) == pytest.approx(0.75)
    est = icsir.estimate_sigma(path, (), CFG)
    assert abs(est.mean - 0.75) <= est.half_width
    assert est.mean == est.successes * 3 / est.rounds
    assert est.half_width == pytest.approx(3 * math.sqrt(math.log(20) / 20_000))


def test_seed_terminals_count_as_failures():
    inst = inst_of(2, [(0, 1)], 1.0, seeds=(0, 1))
    assert icsir.estimate_sigma(inst, (), CFG).mean == 0.0


def test_estimator_is_deterministic_and_thread_invariant():
    inst = random_ic_instance(np.random.default_rng(2), 9, 14)
    a = icsir.estimate_sigma(inst, (), icsir.EstimatorConfig(rounds=5000, seed=4, threads=1))
    b = icsir.estimate_sigma(inst, (), icsir.EstimatorConfig(rounds=5000, seed=4, threads=4))
    assert a == b


def test_default_rounds():
    assert icsir.default_rounds(0.1, 100) == math.ceil(300 * 100 * math.log(100))
    assert icsir.EstimatorConfig(rounds=7).rounds_for(50) == 7


def test_estimator_unbiased_over_runs():
    inst = random_ic_instance(np.random.default_rng(11), 7, 12, seeds=2)
    exact = icsir.brute_force_expected_sigma(inst)
    hits = 0
    for s in range(100):
        est = icsir.estimate_sigma(inst, (), icsir.EstimatorConfig(rounds=2000, seed=s))
        hits += abs(est.mean - exact) <= est.half_width
    assert hits >= 90


@given(st.integers(0, 2**32))
@settings(max_examples=30)
def test_brute_force_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    inst = random_ic_instance(rng, int(rng.integers(2, 7)), 8, seeds=int(rng.integers(1, 3)))
    P = [e for e in range(inst.g.m) if rng.random() < 0.3]
    assert icsir.brute_force_expected_sigma(inst, P) == pytest.approx(exact_by_enumeration(inst, P), abs=1e-12)


def test_brute_force_size_limit():
    g = Graph.from_edges(30, [(i, i + 1) for i in range(25)])
    inst = icsir.IcInstance(g, np.full(25, 0.5), (0,))
    with pytest.raises(ValueError):
        icsir.brute_force_expected_sigma(inst)
    assert icsir.brute_force_expected_sigma(inst, range(10)) >= 0


# --- conditional estimator ------------------------------------------------------


def test_sigma_prime_unavailable_when_supercritical():
    inst = inst_of(4, [(0, 1), (0, 2), (0, 3)], 0.5)
    assert inst.expected_degree_bound() == pytest.approx(1.5)
    with pytest.raises(icsir.EstimatorUnavailable):
        icsir.estimate_sigma_prime(inst, (), CFG)
    est = icsir.estimate_sigma_prime(inst, (), icsir.EstimatorConfig(rounds=2000, d_end=0.5))
    assert est.mean > 0


def test_sigma_prime_zero_and_forest():
    assert icsir.estimate_sigma_prime(inst_of(3, [(0, 1), (1, 2)], 0.0), (), CFG).mean == 0.0
    tree = inst_of(5, [(0, 1), (1, 2), (1, 3), (3, 4)], 0.3)
    a = icsir.estimate_sigma(tree, (), CFG)
    b = icsir.estimate_sigma_prime(tree, (), icsir.EstimatorConfig(rounds=10_000, seed=2))
    assert abs(a.mean - b.mean) <= a.half_width + b.half_width
    # same draws: on a forest every component is a tree and one seed cannot collide
    c = icsir.estimate_sigma_prime(tree, (), CFG)
    assert c.mean == a.mean and c.resamples == 0


def test_triangle_conditional_below_plain():
    tri = inst_of(3, [(0, 1), (1, 2), (0, 2)], 0.9)
    cfg = icsir.EstimatorConfig(rounds=20_000, seed=5, d_end=0.5)
    L = icsir.compute_L(0.5, 3)
    exact = icsir.brute_force_expected_sigma(tri)
    exact_prime = icsir.brute_force_expected_sigma_prime(tri, (), L)
    # enumeration by hand: the two leaves are reached unless both incident edges fail
    assert exact == pytest.approx(2 * (1 - 0.1 * (1 - 0.9 * 0.9)) - 0.0, abs=1e-12)
    assert exact_prime < exact
    plain = icsir.estimate_sigma(tri, (), cfg)
    prime = icsir.estimate_sigma_prime(tri, (), cfg)
    assert abs(plain.mean - exact) <= plain.half_width
    assert abs(prime.mean - exact_prime) <= prime.half_width
    assert prime.mean < plain.mean


def test_resample_exhaustion():
    inst = inst_of(3, [(0, 1), (1, 2)], 1.0, seeds=(0, 2))
    with pytest.raises(icsir.ResampleExhausted):
        icsir.estimate_sigma_prime(inst, (), icsir.EstimatorConfig(rounds=10, d_end=0.5, max_resamples=5))


# --- per-sample quantities -------------------------------------------------------


@given(st.integers(0, 2**32))
@settings(max_examples=40)
def test_sigma_tilde_matches_bfs(seed):
    rng = np.random.default_rng(seed)
    inst = random_ic_instance(rng, int(rng.integers(2, 9)), 14, seeds=int(rng.integers(1, 3)))
    sample = icsir.sample_contagion(inst, rng)
    P = {e for e in range(inst.g.m) if rng.random() < 0.3}
    assert icsir.sigma_tilde(inst, sample, P) == len(reach_oracle(inst, sample.activated - P))
    assert icsir.rho(inst, sample, P) <= icsir.sigma_tilde(inst, sample, P)


@given(st.integers(0, 2**32))
@settings(max_examples=40)
def test_rho_monotone_supermodular(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 10))
    inst = random_ic_instance(rng, n, 2 * n, p_range=(0.5, 0.95), seeds=int(rng.integers(1, 3)))
    sample = icsir.sample_contagion(inst, rng)
    if not icsir.passes_filters(inst, sample, icsir.compute_L(0.5, n)):
        return
    act = sorted(sample.activated)
    if not act:
        return
    Q = sorted(rng.choice(act, size=min(6, len(act)), replace=False).tolist())
    verdict = check_supermodular(lambda P: icsir.rho(inst, sample, P), Q, tol=0.0)
    assert verdict.supermodular and verdict.monotone


def test_filters():
    inst = inst_of(4, [(0, 1), (1, 2), (2, 3)], 1.0, seeds=(0, 3))
    sample = icsir.sample_contagion(inst, 0)
    assert not icsir.passes_filters(inst, sample, 10)  # two seeds share a component
    inst = inst_of(4, [(0, 1), (1, 2), (2, 3)], 1.0)
    sample = icsir.sample_contagion(inst, 0)
    assert icsir.passes_filters(inst, sample, 4) and not icsir.passes_filters(inst, sample, 3)


# --- greedy ------------------------------------------------------------------------


def test_greedy_k0():
    inst = random_ic_instance(np.random.default_rng(1), 6, 9)
    tr = icsir.greedy_icsir(inst, 0, CFG)
    assert tr.chosen == [] and len(tr.objective_values) == 1


def test_greedy_trace_consistent_with_sample_set():
    inst = random_ic_instance(np.random.default_rng(3), 30, 60, p_range=(0.1, 0.4), seeds=2, edge_prob=0.15)
    cfg = icsir.EstimatorConfig(rounds=5000, seed=8)
    ss = icsir.draw_sample_set(inst, cfg)
    tr = icsir.greedy_icsir(inst, 10, cfg, samples=ss)
    vals = np.array(tr.objective_values)
    assert (np.diff(vals) <= 0).all()
    for k in (0, 3, 10):
        assert ss.estimate(tr.chosen[:k]).mean == pytest.approx(tr.objective_values[k], abs=1e-12)
    # the stored samples and the plain estimator count the same successes
    assert icsir.estimate_sigma(inst, tr.chosen, cfg).mean == pytest.approx(tr.objective_values[-1], abs=1e-12)


def test_greedy_sigma_prime_consistent():
    inst = random_ic_instance(np.random.default_rng(4), 25, 40, p_range=(0.1, 0.3), seeds=2, edge_prob=0.15)
    cfg = icsir.EstimatorConfig(rounds=4000, seed=2, d_end=0.8)
    tr = icsir.greedy_icsir(inst, 8, cfg, objective="sigma_prime")
    assert icsir.estimate_sigma_prime(inst, tr.chosen, cfg).mean == pytest.approx(tr.objective_values[-1], abs=1e-12)


def test_greedy_gains_are_bridge_counts():
    rng = np.random.default_rng(6)
    for _ in range(5):
        inst = random_ic_instance(rng, 8, 12, p_range=(0.3, 0.8))
        cfg = icsir.EstimatorConfig(rounds=3000, seed=int(rng.integers(1000)))
        ss = icsir.draw_sample_set(inst, cfg)
        tr = icsir.greedy_icsir(inst, 3, cfg, samples=ss)
        P = []
        for e, gain in zip(tr.chosen, tr.gains):
            drops = {c: ss.estimate(P).mean - ss.estimate(P + [c]).mean for c in sorted(inst.Q - set(P))}
            best = max(drops.values())
            assert gain == pytest.approx(best, abs=1e-12)
            assert e == min(c for c, d in drops.items() if d >= best - 1e-12)
            P.append(e)


def test_greedy_rejects_budget():
    inst = random_ic_instance(np.random.default_rng(1), 5, 6, candidates=2)
    with pytest.raises(ValueError):
        icsir.greedy_icsir(inst, 3, CFG)


# --- conversions and constants -------------------------------------------------------


def test_rates_to_activation():
    assert icsir.rates_to_activation(0.3, 1.0) == pytest.approx(0.3)
    assert icsir.rates_to_activation(1.0, 0.4) == pytest.approx(1.0)
    assert icsir.rates_to_activation(0.1, 0.5) == pytest.approx(2 / 11)
    with pytest.raises(ValueError):
        icsir.rates_to_activation(0.0, 0.0)


@given(st.floats(0.001, 1.0), st.floats(0.05, 1.0))
def test_rates_to_activation_series(B, D):
    # long enough that the geometric tail is below float precision
    t = np.arange(20_000)
    series = float(np.sum(((1 - D) * (1 - B)) ** t * B))
    assert icsir.rates_to_activation(B, D) == pytest.approx(series, abs=1e-10)


def test_compute_L():
    assert icsir.compute_L(0.0, math.e) == 9
    assert icsir.compute_L(0.5, 100) == 166
    assert icsir.compute_L(0.5, 500) == 224
    with pytest.raises(ValueError):
        icsir.compute_L(1.0, 100)


def test_sbm_constants():
    Q = np.full((5, 5), 0.0041)
    np.fill_diagonal(Q, 0.023)
    c = icsir.sbm_constants(Q, 100, 5, p=0.21)
    assert c["d_init"] == pytest.approx(100 * 0.023 * 0.21)
    assert c["d_end"] == pytest.approx(100 * (0.023 + 4 * 0.0041) * 0.21)
    assert c["L_star"] == icsir.compute_L(c["d_end"], 500)
    assert c["L_star_squared"] < c["L_star"]


def test_branching_statistics_shapes():
    st_ = icsir.er_contagion_statistics(100, 0.5, 2, 300, seed=1)
    assert st_.max_component.shape == (300,) and st_.collision.dtype == bool
    assert (st_.cycle_mass >= 0).all()
    again = icsir.er_contagion_statistics(100, 0.5, 2, 300, seed=1, threads=3)
    assert np.array_equal(st_.max_component, again.max_component)
