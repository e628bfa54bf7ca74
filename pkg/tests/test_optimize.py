import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from epimit.graph import Graph
from epimit.optimize import (
    brute_force_opt,
    check_supermodular,
    greedy,
    max_degree_order,
    random_baseline,
    random_order,
    select_best,
)


def modular(weights):
    return lambda P: -sum(weights[e] for e in P)


def test_select_best_ties():
    assert select_best([3, 1, 2], np.array([1.0, 1.0, 0.5])) == 1
    assert select_best([0, 1], np.array([1.0, 1.0 + 1e-15])) == 0
    assert select_best([0, 1], np.array([1.0, 1.1])) == 1


def test_greedy_modular_and_evaluations():
    w = {0: 1.0, 1: 3.0, 2: 2.0, 3: 3.0}
    tr = greedy(modular(w), w, 3)
    assert tr.chosen == [1, 3, 2]
    assert tr.objective_values == [0.0, -3.0, -6.0, -8.0]
    assert tr.gains == [3.0, 3.0, 2.0]
    assert tr.metadata["evaluations"] == 1 + 4 + 3 + 2
    assert tr.prefix(2) == frozenset({1, 3})
    assert greedy(modular(w), w, 0).chosen == []
    with pytest.raises(ValueError):
        greedy(modular(w), w, 5)


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=7), st.data())
def test_greedy_optimal_on_modular(ws, data):
    w = dict(enumerate(ws))
    k = data.draw(st.integers(0, len(w)))
    tr = greedy(modular(w), w, k)
    _, opt = brute_force_opt(modular(w), w, k)
    assert tr.objective_values[-1] == pytest.approx(opt)


def test_brute_force_ties_and_limit():
    f = lambda P: 0.0 if len(P) else 1.0
    assert brute_force_opt(f, [5, 2, 9], 2) == (frozenset({2, 5}), 0.0)
    assert brute_force_opt(f, [5, 2, 9], 0) == (frozenset(), 1.0)
    with pytest.raises(ValueError, match="enumeration"):
        brute_force_opt(f, range(60), 10)


def test_check_supermodular_classes():
    w = {0: 1.0, 1: 2.0, 2: 0.5}
    v = check_supermodular(modular(w), w)
    assert v.modular and v.monotone and v.counterexample is None

    sup = lambda P: (3 - len(P)) ** 2  # convex in |P|: decreasing marginal drops
    v = check_supermodular(sup, range(3))
    assert v.supermodular and not v.submodular and v.monotone

    sub = lambda P: 9 - len(P) ** 2
    v = check_supermodular(sub, range(3))
    assert not v.supermodular and v.submodular
    c = v.counterexample
    assert c.smaller <= c.larger and c.element not in c.larger
    assert c.lhs < c.rhs
    assert c.lhs == pytest.approx(sub(c.smaller) - sub(c.smaller | {c.element}))
    assert c.rhs == pytest.approx(sub(c.larger) - sub(c.larger | {c.element}))

    grow = lambda P: len(P)
    v = check_supermodular(grow, range(2))
    assert not v.monotone and v.monotone_counterexample.lhs < v.monotone_counterexample.rhs


@given(st.integers(0, 2**32))
def test_check_supermodular_matches_naive(seed):
    rng = np.random.default_rng(seed)
    q = int(rng.integers(1, 5))
    table = {frozenset(s): float(rng.integers(0, 4))
             for r in range(q + 1) for s in itertools.combinations(range(q), r)}
    f = table.__getitem__
    sup = mono = True
    for A in table:
        for B in table:
            if A <= B:
                mono &= f(A) >= f(B)
                for e in set(range(q)) - B:
                    sup &= f(A) - f(A | {e}) >= f(B) - f(B | {e})
    v = check_supermodular(f, range(q), tol=0.0)
    assert v.supermodular == sup and v.monotone == mono


def test_check_size_limit():
    with pytest.raises(ValueError):
        check_supermodular(len, range(13))


def test_max_degree_examples():
    star = Graph.from_edges(5, [(0, i) for i in range(1, 5)] + [(1, 2)])
    assert max_degree_order(star, range(star.m), 3) == [0, 1, 2]
    # hub without candidates falls back to the best endpoint of a candidate
    assert max_degree_order(star, {4}, 1) == [4]
    with pytest.raises(ValueError):
        max_degree_order(star, {4}, 2)


def test_random_baseline_uniform():
    Q = range(5)
    counts = {}
    rng = np.random.default_rng(0)
    for _ in range(5000):
        s = random_baseline(Q, 2, rng)
        counts[s] = counts.get(s, 0) + 1
    assert len(counts) == math.comb(5, 2)
    assert sps.chisquare(list(counts.values())).pvalue > 0.001
    assert random_order(Q, 3) == random_order(Q, 3)
    assert sorted(random_order(Q, 3)) == list(Q)
