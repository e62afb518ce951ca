import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from mecoffload.bilp import (
    FEAS_TOL,
    BilpInstance,
    box_lp,
    exhaustive_solve,
    relaxation_bound,
    solve,
)


def random_instance(rng, K, cap=False, integer=False):
    n = int(rng.integers(0, K + 1))
    if integer:
        e = rng.integers(-5, 6, K).astype(float)
        d = rng.integers(-3, 4, K).astype(float)
        budget = float(rng.integers(-3, 6))
    else:
        e = rng.normal(size=K)
        d = rng.normal(size=K)
        budget = float(rng.normal() * 2)
    extra = (rng.exponential(size=K), float(rng.uniform(0, 0.6 * K))) if cap else None
    return BilpInstance(e, d, budget, n, extra)


def test_empty_selection():
    inst = BilpInstance([1.0, -2.0], [1.0, 1.0], 0.0, 0)
    sol = solve(inst)
    assert sol.optimal and sol.a == (0, 0) and sol.objective == 0.0
    assert not solve(BilpInstance([1.0, -2.0], [1.0, 1.0], -1.0, 0)).optimal
    assert not exhaustive_solve(BilpInstance([1.0, -2.0], [1.0, 1.0], -1.0, 0)).optimal


def test_forced_full_selection():
    e, d = [1.0, 2.0, 3.0], [1.0, 1.0, 1.0]
    sol = solve(BilpInstance(e, d, 3.0, 3))
    assert sol.optimal and sol.a == (1, 1, 1) and sol.objective == 6.0
    assert not solve(BilpInstance(e, d, 2.5, 3)).optimal


def test_three_item_example():
    inst = BilpInstance([-1.0, 2.0, -3.0], [1.0, 1.0, 5.0], 2.0, 2)
    for solver in (solve, exhaustive_solve):
        sol = solver(inst)
        assert sol.a == (1, 1, 0)
        assert sol.objective == 1.0


def test_impossible_cardinality():
    inst = BilpInstance([1.0], [0.0], 1.0, 2)
    assert not exhaustive_solve(inst).optimal
    assert not solve(inst).optimal


def test_exhaustive_guard():
    with pytest.raises(ValueError):
        exhaustive_solve(BilpInstance(np.zeros(26), np.zeros(26), 0.0, 1))


def test_tie_break_is_lexicographically_smallest():
    inst = BilpInstance([1.0, 1.0, 1.0, 1.0], [0.0] * 4, 1.0, 2)
    assert solve(inst).a == (0, 0, 1, 1)
    assert exhaustive_solve(inst).a == (0, 0, 1, 1)


def test_bound_with_everything_fixed():
    inst = BilpInstance([0.5, -2.0, 3.0], [1.0, 1.0, 1.0], 5.0, 2)
    assert relaxation_bound(inst, [1, 1, 0]) == math.fsum([0.5, -2.0])
    assert relaxation_bound(inst, {0: 1, 1: 0, 2: 0}) == math.inf


def test_bound_cardinality_only():
    rng = np.random.default_rng(0)
    e = rng.normal(size=8)
    inst = BilpInstance(e, np.zeros(8), 1.0, 3)
    fixed = [1, -1, -1, 0, -1, -1, -1, -1]
    free = [k for k in range(8) if fixed[k] < 0]
    expected = e[0] + np.sort(e[free])[:2].sum()
    assert relaxation_bound(inst, fixed) == pytest.approx(expected, rel=1e-12)


def test_bound_infeasible_relaxation():
    inst = BilpInstance([1.0, 1.0], [2.0, 3.0], 1.0, 1)
    assert relaxation_bound(inst) == math.inf


def _scipy_lp(c, r, A, b):
    F = len(c)
    res = linprog(c, A_ub=A, b_ub=b, A_eq=np.ones((1, F)), b_eq=[r], bounds=[(0, 1)] * F, method="highs")
    return math.inf if res.status == 2 else res.fun


def test_box_lp_against_scipy():
    rng = np.random.default_rng(12)
    for _ in range(500):
        F = int(rng.integers(1, 14))
        r = int(rng.integers(0, F + 1))
        m = int(rng.integers(1, 3))
        c, A, b = rng.normal(size=F), rng.normal(size=(m, F)), rng.normal(size=m) * 2
        value, x = box_lp(c, r, A, b)
        ref = _scipy_lp(c, r, A, b)
        if ref == math.inf:
            assert x is None
            continue
        assert value == pytest.approx(ref, rel=1e-8, abs=1e-8)
        assert abs(x.sum() - r) < 1e-9
        assert np.all(A @ x <= b + 1e-9)
        assert np.all((x >= 0) & (x <= 1))


def test_bound_never_exceeds_optimum():
    rng = np.random.default_rng(2024)
    for t in range(10**4):
        inst = random_instance(rng, 10, cap=t % 3 == 0)
        opt = exhaustive_solve(inst)
        fixed = [int(v) for v in rng.integers(-1, 2, 10)] if t % 2 else None
        bound = relaxation_bound(inst, fixed)
        if fixed is None:
            if opt.optimal:
                assert bound <= opt.objective + 1e-9
        else:
            # restricted optimum by brute force over the fixed pattern
            sub = exhaustive_restricted(inst, fixed)
            if sub < math.inf:
                assert bound <= sub + 1e-9


def exhaustive_restricted(inst, fixed):
    best = math.inf
    for mask in range(2**inst.K):
        a = tuple((mask >> k) & 1 for k in range(inst.K))
        if any(f >= 0 and f != x for f, x in zip(fixed, a)):
            continue
        if inst.is_feasible(a):
            best = min(best, inst.objective(a))
    return best


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), K=st.integers(1, 12), cap=st.booleans(), integer=st.booleans())
def test_solve_matches_exhaustive(seed, K, cap, integer):
    inst = random_instance(np.random.default_rng(seed), K, cap=cap, integer=integer)
    bb, ex = solve(inst), exhaustive_solve(inst)
    assert bb.status == ex.status
    assert bb.objective == ex.objective
    assert bb.a == ex.a
    if bb.optimal:
        a = np.array(bb.a)
        assert a.sum() == inst.n
        assert inst.d @ a <= inst.budget + FEAS_TOL
        if inst.extra_weights is not None:
            w, c = inst.extra_weights
            assert w @ a <= c + FEAS_TOL


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), extra=st.floats(0, 5))
def test_budget_monotonicity(seed, extra):
    inst = random_instance(np.random.default_rng(seed), 9)
    looser = BilpInstance(inst.e, inst.d, inst.budget + extra, inst.n, inst.extra_weights)
    assert solve(looser).objective <= solve(inst).objective


def test_solve_is_deterministic_and_counts_nodes():
    inst = random_instance(np.random.default_rng(5), 12, cap=True)
    a, b = solve(inst), solve(inst)
    assert a == b
    assert a.nodes_explored >= 1
