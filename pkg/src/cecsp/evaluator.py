"""Scoring of event orders by linear programming.

Once the order of events is fixed, the best schedule for that order is
the solution of an LP over event times ``t_i`` and per-interval
consumptions ``p_{j,i}``. Bound and capacity rows carry nonnegative slack
columns whose use is penalized, so infeasible orders still get a finite,
informative score. Orders whose release/deadline rows contradict the
order itself have no LP solution at all and score ``+inf``.
"""
from dataclasses import dataclass
import math

import numpy as np

from .core import Schedule, DEFAULT_TOL
from . import lp as lpmod
from .lp import LinearProgram, LE, GE, EQ, Status


@dataclass(frozen=True)
class PenaltyWeights:
    """Objective cost per unit of slack.

    ``bound`` applies to the lower/upper consumption-rate slacks and
    ``capacity`` to the resource-availability slack.
    """
    bound: float = 5.0
    capacity: float = 5.0

    def __post_init__(self):
        if self.bound < 0 or self.capacity < 0:
            raise ValueError("penalty weights must be nonnegative")


def tname(i):
    return f"t_{i}"


def pname(j, i):
    return f"p_{j}_{i}"


def build_schedule_lp(inst, order, weights=PenaltyWeights()):
    """Build the LP that finds the best schedule for ``order``.

    Parameters
    ----------
    inst : Instance
    order : EventOrder
    weights : PenaltyWeights or None
        Slack penalties. ``None`` builds the slack-free LP, in which the
        bound and capacity rows are hard constraints.

    Returns
    -------
    LinearProgram
    """
    if order.n != inst.n:
        raise ValueError("order does not match the instance size")
    n = inst.n
    m = 2 * n
    seq = order.sequence
    lp = LinearProgram("schedule")
    tcol = [None] * (m + 1)
    for i in range(1, m + 1):
        tcol[i] = lp.add_var(tname(i))
    for j, jb in enumerate(inst.jobs, start=1):
        tcol_c = tcol[2 * j]
        lp.cost[tcol_c] = jb.weight
        lp.objective_offset += jb.offset

    pcol = {}
    for j in range(1, n + 1):
        for i in order.active_intervals(j):
            pcol[(j, i)] = lp.add_var(pname(j, i))

    slack = weights is not None
    s_lo, s_hi, s_cap = {}, {}, {}
    if slack:
        for (j, i) in pcol:
            s_lo[(j, i)] = lp.add_var(f"s_lo_{j}_{i}", cost=weights.bound)
            s_hi[(j, i)] = lp.add_var(f"s_hi_{j}_{i}", cost=weights.bound)
        for e in range(1, m):
            i = seq[e - 1]
            s_cap[i] = lp.add_var(f"s_cap_{i}", cost=weights.capacity)

    for e in range(1, m):
        a, b = seq[e - 1], seq[e]
        lp.add_row(f"order_{e}", [(tcol[a], 1.0), (tcol[b], -1.0)], LE, 0.0)

    for j, jb in enumerate(inst.jobs, start=1):
        lp.add_row(f"work_{j}",
                   [(pcol[(j, i)], 1.0) for i in order.active_intervals(j)],
                   EQ, jb.e_total)
        lp.add_row(f"release_{j}", [(tcol[2 * j - 1], 1.0)], GE, jb.release)
        lp.add_row(f"deadline_{j}", [(tcol[2 * j], 1.0)], LE, jb.deadline)

    for j, jb in enumerate(inst.jobs, start=1):
        for e in order.window(j):
            i, nxt = seq[e - 1], seq[e]
            p = pcol[(j, i)]
            # p >= P-(t_next - t_i) - s_lo
            lo = [(p, 1.0), (tcol[nxt], -jb.p_min), (tcol[i], jb.p_min)]
            hi = [(p, 1.0), (tcol[nxt], -jb.p_max), (tcol[i], jb.p_max)]
            if slack:
                lo.append((s_lo[(j, i)], 1.0))
                hi.append((s_hi[(j, i)], -1.0))
            lp.add_row(f"lower_{j}_{i}", lo, GE, 0.0)
            lp.add_row(f"upper_{j}_{i}", hi, LE, 0.0)

    running = {}
    for j in range(1, n + 1):
        for i in order.active_intervals(j):
            running.setdefault(i, []).append(pcol[(j, i)])
    for e in range(1, m):
        i, nxt = seq[e - 1], seq[e]
        row = [(c, 1.0) for c in running.get(i, [])]
        row += [(tcol[nxt], -inst.capacity), (tcol[i], inst.capacity)]
        if slack:
            row.append((s_cap[i], -1.0))
        lp.add_row(f"capacity_{i}", row, LE, 0.0)
    return lp


def solve_schedule_lp(lp, time_limit=None):
    """Solve a schedule LP; thin wrapper around the HiGHS backend."""
    return lpmod.solve(lp, relax=True, time_limit=time_limit)


def extract_schedule(inst, order, lp, sol):
    """Turn an optimal LP solution into a :class:`Schedule`."""
    x = sol.x
    times = np.zeros(inst.n_events + 1)
    for i in range(1, inst.n_events + 1):
        times[i] = x[lp.col(tname(i))]
    cons, s_lo, s_hi, s_cap = {}, {}, {}, {}
    for j in range(1, inst.n + 1):
        for i in order.active_intervals(j):
            cons[(j, i)] = max(0.0, float(x[lp.col(pname(j, i))]))
            if lp.has_col(f"s_lo_{j}_{i}"):
                s_lo[(j, i)] = max(0.0, float(x[lp.col(f"s_lo_{j}_{i}")]))
                s_hi[(j, i)] = max(0.0, float(x[lp.col(f"s_hi_{j}_{i}")]))
    for e in range(1, inst.n_events):
        i = order.at(e)
        if lp.has_col(f"s_cap_{i}"):
            s_cap[i] = max(0.0, float(x[lp.col(f"s_cap_{i}")]))
    return Schedule(order=order, times=times, consumption=cons,
                    slack_lower=s_lo, slack_upper=s_hi, slack_capacity=s_cap,
                    score=sol.objective)


def score_order(inst, order, weights=PenaltyWeights(), time_limit=None):
    """Score ``order`` by solving its LP.

    Returns
    -------
    schedule : Schedule or None
        ``None`` when the LP is infeasible.
    score : float
        LP objective, or ``inf`` for LP-infeasible orders.

    Raises
    ------
    lp.SolverError
        When the backend fails or stops on a limit.
    """
    lp = build_schedule_lp(inst, order, weights)
    sol = solve_schedule_lp(lp, time_limit=time_limit)
    if sol.status is Status.INFEASIBLE:
        return None, math.inf
    if not sol.optimal:
        raise lpmod.SolverError(f"schedule LP not solved: {sol.status.value}")
    sched = extract_schedule(inst, order, lp, sol)
    return sched, sol.objective


class Evaluator:
    """Scores orders of one instance, memoizing by order.

    Solves are deterministic, so a cache hit returns the same result a
    rebuild would. A single evaluator is not meant to be shared between
    threads.
    """

    def __init__(self, inst, weights=PenaltyWeights(), cache_size=200_000):
        self.inst = inst
        self.weights = weights
        self.cache_size = cache_size
        self._cache = {}
        self.n_solves = 0

    def __call__(self, order):
        key = order.sequence
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        self.n_solves += 1
        res = score_order(self.inst, order, self.weights)
        if len(self._cache) < self.cache_size:
            self._cache[key] = res
        return res

    def is_feasible(self, sched, tol=DEFAULT_TOL):
        return sched is not None and sched.is_slack_free(tol)
