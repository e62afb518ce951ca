"""Cardinality-constrained 0/1 linear programs.

    minimize    e^T a
    subject to  d^T a <= budget,  1^T a = n,  [w^T a <= cap],  a in {0,1}^K

solved exactly by depth-first branch and bound over an LP relaxation, plus an
enumeration oracle.  Objectives are always summed with :func:`math.fsum`, so the
value of a given selection does not depend on the order it was built in and the
two solvers can be compared with ``==``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-9
_INT_TOL = 1e-9
_PIV_TOL = 1e-11
EXHAUSTIVE_MAX_K = 25

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class BilpInstance:
    e: np.ndarray
    d: np.ndarray
    budget: float
    n: int
    extra_weights: tuple[np.ndarray, float] | None = None

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float)
        d = np.asarray(self.d, dtype=float)
        if e.ndim != 1 or e.shape != d.shape:
            raise ValueError(f"e and d must be 1-D of equal length, got {e.shape} and {d.shape}")
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "d", d)
        if self.extra_weights is not None:
            w, cap = self.extra_weights
            w = np.asarray(w, dtype=float)
            if w.shape != e.shape:
                raise ValueError(f"extra weights have shape {w.shape}, expected {e.shape}")
            object.__setattr__(self, "extra_weights", (w, float(cap)))
        if int(self.n) != self.n:
            raise ValueError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def K(self) -> int:
        return len(self.e)

    def constraint_rows(self) -> list[tuple[np.ndarray, float]]:
        rows = [(self.d, float(self.budget))]
        if self.extra_weights is not None:
            rows.append(self.extra_weights)
        return [(row, cap) for row, cap in rows if cap != math.inf]

    def is_feasible(self, a) -> bool:
        """Exact feasibility test shared by every solver (``FEAS_TOL`` slack)."""
        sel = [k for k, x in enumerate(a) if x]
        if len(a) != self.K or len(sel) != self.n:
            return False
        return all(math.fsum(row[k] for k in sel) <= cap + FEAS_TOL for row, cap in self.constraint_rows())

    def objective(self, a) -> float:
        return math.fsum(self.e[k] for k, x in enumerate(a) if x)


@dataclass(frozen=True)
class BilpSolution:
    a: tuple[int, ...] | None
    objective: float
    status: str
    nodes_explored: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def _infeasible(nodes: int = 0) -> BilpSolution:
    return BilpSolution(a=None, objective=math.inf, status=INFEASIBLE, nodes_explored=nodes)


def _better(obj, a, best_obj, best_a) -> bool:
    if best_a is None or obj < best_obj:
        return True
    return obj == best_obj and a < best_a


# --- LP relaxation -----------------------------------------------------------


def box_lp(c, r: int, A_ub, b_ub):
    """Solve ``min c^T x  s.t.  sum(x) = r,  A_ub x <= b_ub,  0 <= x <= 1``.

    Two-phase bounded-variable primal simplex with Bland's rule; intended for a
    handful of rows.  Returns ``(value, x)`` or ``(inf, None)`` if infeasible.
    """
    c = np.asarray(c, dtype=float)
    F = c.size
    A_ub = np.asarray(A_ub, dtype=float).reshape(-1, F)
    b_ub = np.asarray(b_ub, dtype=float).reshape(-1)
    m_ub = A_ub.shape[0]
    m = 1 + m_ub
    N = F + m_ub + m
    A = np.zeros((m, N))
    rhs = np.empty(m)
    A[0, :F] = 1.0
    rhs[0] = r
    A[1:, :F] = A_ub
    A[1:, F:F + m_ub] = np.eye(m_ub)
    rhs[1:] = b_ub
    neg = rhs < 0
    A[neg] *= -1.0
    rhs[neg] *= -1.0
    A[:, F + m_ub:] = np.eye(m)

    ub = np.concatenate([np.ones(F), np.full(m_ub, np.inf), np.full(m, np.inf)])
    x = np.zeros(N)
    basis = list(range(F + m_ub, N))
    x[basis] = rhs
    at_upper = np.zeros(N, dtype=bool)
    is_basic = np.zeros(N, dtype=bool)
    is_basic[basis] = True
    T = A

    def run(cost, allowed):
        for _ in range(100 * N):
            cb = cost[basis]
            reduced = cost - cb @ T
            enter = np.nonzero(
                allowed & ~is_basic & ((~at_upper & (reduced < -1e-12)) | (at_upper & (reduced > 1e-12)))
            )[0]
            if enter.size == 0:
                return
            j = int(enter[0])
            delta = -1.0 if at_upper[j] else 1.0
            col = T[:, j]
            t_best = ub[j]
            leave = -1
            leave_to_upper = False
            for i in range(m):
                alpha = delta * col[i]
                bi = basis[i]
                if alpha > _PIV_TOL:
                    t = x[bi] / alpha
                    to_upper = False
                elif alpha < -_PIV_TOL and ub[bi] < np.inf:
                    t = (ub[bi] - x[bi]) / -alpha
                    to_upper = True
                else:
                    continue
                t = max(t, 0.0)
                if t < t_best or (t == t_best and leave >= 0 and bi < basis[leave]):
                    t_best, leave, leave_to_upper = t, i, to_upper
            if not np.isfinite(t_best):
                raise RuntimeError("unbounded LP relaxation")
            x[basis] -= delta * t_best * col
            x[j] += delta * t_best
            if leave < 0:
                at_upper[j] = not at_upper[j]
                x[j] = ub[j] if at_upper[j] else 0.0
                continue
            out = basis[leave]
            x[out] = ub[out] if leave_to_upper else 0.0
            at_upper[out] = leave_to_upper
            is_basic[out] = False
            is_basic[j] = True
            at_upper[j] = False
            basis[leave] = j
            T[leave] /= T[leave, j]
            for i in range(m):
                if i != leave and T[i, j] != 0.0:
                    T[i] -= T[i, j] * T[leave]
        raise RuntimeError("simplex iteration limit reached")

    allowed = np.ones(N, dtype=bool)
    phase1 = np.zeros(N)
    phase1[F + m_ub:] = 1.0
    run(phase1, allowed)
    if x[F + m_ub:].sum() > 1e-10 * max(1.0, np.abs(rhs).max()):
        return math.inf, None
    ub[F + m_ub:] = 0.0
    allowed[F + m_ub:] = False
    cost = np.concatenate([c, np.zeros(m_ub + m)])
    run(cost, allowed)
    xs = np.clip(x[:F], 0.0, 1.0)
    return float(c @ xs), xs


def _relax(inst: BilpInstance, fixed):
    """LP bound and relaxed point for the subproblem with entries of ``fixed`` != -1 pinned."""
    free = [k for k, f in enumerate(fixed) if f < 0]
    ones = [k for k, f in enumerate(fixed) if f == 1]
    r = inst.n - len(ones)
    if r < 0 or r > len(free):
        return math.inf, None
    fixed_cost = math.fsum(inst.e[k] for k in ones)
    rows = [(row[free], cap - math.fsum(row[k] for k in ones) + FEAS_TOL) for row, cap in inst.constraint_rows()]
    x = np.zeros(inst.K)
    x[ones] = 1.0
    if not free:
        if all(rem >= 0 for _, rem in rows):
            return fixed_cost, x
        return math.inf, None
    # cheapest completion of each row alone must fit
    for row, rem in rows:
        if r and np.partition(row, r - 1)[:r].sum() > rem:
            return math.inf, None
    e_free = inst.e[free]
    order = np.lexsort((np.arange(len(free)), e_free))[:r]
    if all(row[order].sum() <= rem for row, rem in rows):
        x[np.asarray(free)[order]] = 1.0
        return fixed_cost + math.fsum(e_free[order]), x
    A_ub = np.array([row for row, _ in rows])
    b_ub = np.array([rem for _, rem in rows])
    value, xf = box_lp(e_free, r, A_ub, b_ub)
    if xf is None:
        return math.inf, None
    x[free] = xf
    return fixed_cost + value, x


def relaxation_bound(inst: BilpInstance, fixed=None) -> float:
    """Lower bound on the best objective with the given variables pinned.

    ``fixed`` maps index -> 0/1, or is a length-K sequence using -1 (or None)
    for free entries.  Returns ``inf`` when even the relaxation is infeasible.
    """
    return _relax(inst, _normalize_fixed(inst.K, fixed))[0]


def _normalize_fixed(K, fixed):
    if fixed is None:
        return [-1] * K
    if isinstance(fixed, dict):
        out = [-1] * K
        for k, v in fixed.items():
            out[k] = int(v)
        return out
    if len(fixed) != K:
        raise ValueError(f"partial assignment has length {len(fixed)}, expected {K}")
    return [-1 if f is None else int(f) for f in fixed]


# --- solvers -----------------------------------------------------------------


def solve(inst: BilpInstance) -> BilpSolution:
    """Exact branch and bound; ties go to the lexicographically smallest ``a``."""
    K, n = inst.K, inst.n
    if n < 0 or n > K:
        return _infeasible()
    abs_e = np.abs(inst.e)
    best_obj = math.inf
    best_a = None
    nodes = 0

    def visit(fixed):
        nonlocal best_obj, best_a, nodes
        nodes += 1
        bound, x = _relax(inst, fixed)
        if x is None:
            return
        if best_a is not None and bound > best_obj + FEAS_TOL * max(1.0, abs(best_obj)):
            return
        free = [k for k in range(K) if fixed[k] < 0]
        frac = [k for k in free if _INT_TOL < x[k] < 1.0 - _INT_TOL]
        if frac:
            j = max(frac, key=lambda k: (abs_e[k], -k))
            first = 1 if x[j] >= 0.5 else 0
            _branch(visit, fixed, j, (first, 1 - first))
            return
        cand = tuple(int(round(v)) for v in x)
        if inst.is_feasible(cand):
            obj = inst.objective(cand)
            if _better(obj, cand, best_obj, best_a):
                best_obj, best_a = obj, cand
            # a lexicographically smaller tie must clear one of cand's free ones
            ones_free = [k for k in free if cand[k] == 1]
            if ones_free:
                _branch(visit, fixed, ones_free[0], (0, 1))
        elif free:
            j = max(free, key=lambda k: (abs_e[k], -k))
            _branch(visit, fixed, j, (cand[j], 1 - cand[j]))

    visit([-1] * K)
    if best_a is None:
        return _infeasible(nodes)
    return BilpSolution(a=best_a, objective=best_obj, status=OPTIMAL, nodes_explored=nodes)


def _branch(visit, fixed, j, values):
    for value in values:
        child = list(fixed)
        child[j] = value
        visit(child)


def exhaustive_solve(inst: BilpInstance) -> BilpSolution:
    """Enumerate all ``C(K, n)`` selections.  Reference oracle for :func:`solve`."""
    K, n = inst.K, inst.n
    if K > EXHAUSTIVE_MAX_K:
        raise ValueError(f"exhaustive search is limited to K <= {EXHAUSTIVE_MAX_K}, got K={K}")
    if n < 0 or n > K:
        return _infeasible()
    best_obj = math.inf
    best_a = None
    count = 0
    for sel in itertools.combinations(range(K), n):
        count += 1
        a = [0] * K
        for k in sel:
            a[k] = 1
        a = tuple(a)
        if not inst.is_feasible(a):
            continue
        obj = inst.objective(a)
        if _better(obj, a, best_obj, best_a):
            best_obj, best_a = obj, a
    if best_a is None:
        return _infeasible(count)
    return BilpSolution(a=best_a, objective=best_obj, status=OPTIMAL, nodes_explored=count)
