"""Exact methods: the full MILP model and an enumeration oracle.

The MILP uses binary order variables ``a_{i,k}`` (event ``i`` before
event ``k``) and successor variables ``b_{i,k}`` (``k`` immediately after
``i``) for every ordered pair of distinct events. It can be written to an
LP file for external solvers or, for small models, handed to HiGHS.

For small instances :func:`enumerate_exact` gives a solver-independent
optimum by scoring every precedence-respecting event order with the
slack-free schedule LP.
"""
from dataclasses import dataclass
import enum
import math
import time

import numpy as np

from .core import EventOrder, PrecedenceSet, implicit_precedences
from .evaluator import build_schedule_lp, solve_schedule_lp, extract_schedule
from .lp import LinearProgram, LE, GE, EQ, Status, solve, write_lp, read_lp

MAX_ENUM_JOBS = 7


def aname(i, k):
    return f"a_{i}_{k}"


def bname(i, k):
    return f"b_{i}_{k}"


def build_milp(inst, valid_inequalities=True):
    """Build the mixed-integer model of the whole problem.

    Big-M constants use the horizon ``H = max_j deadline_j``:
    ``E_j`` for the processing-window rows, ``P+_j H`` for upper bounds,
    ``P-_j H`` for lower bounds, ``P H`` for capacity, ``H`` for time
    ordering and ``2n`` for the successor rows.

    Parameters
    ----------
    inst : Instance
    valid_inequalities : bool
        Add the processing-time bounds
        ``E_j / P+_j <= t_{2j} - t_{2j-1} <= E_j / P-_j``.

    Returns
    -------
    LinearProgram
        Model with integer columns for the ``a`` and ``b`` variables.
    """
    n = inst.n
    m = 2 * n
    events = range(1, m + 1)
    big_h = inst.horizon()
    lp = LinearProgram("cecsp_milp")

    t = {i: lp.add_var(f"t_{i}") for i in events}
    p = {}
    for j in range(1, n + 1):
        for i in events:
            ub = 0.0 if i == 2 * j else math.inf
            p[(j, i)] = lp.add_var(f"p_{j}_{i}", ub=ub)
    a, b = {}, {}
    for i in events:
        for k in events:
            if i != k:
                lo = 1.0 if (i % 2 == 1 and k == i + 1) else 0.0
                a[(i, k)] = lp.add_var(aname(i, k), lb=lo, ub=1.0, integer=True)
    for i in events:
        for k in events:
            if i != k:
                b[(i, k)] = lp.add_var(bname(i, k), ub=1.0, integer=True)

    for j, jb in enumerate(inst.jobs, start=1):
        lp.cost[t[2 * j]] = jb.weight
        lp.objective_offset += jb.offset

    for j, jb in enumerate(inst.jobs, start=1):
        lp.add_row(f"work_{j}", [(p[(j, i)], 1.0) for i in events],
                   EQ, jb.e_total)
    for j, jb in enumerate(inst.jobs, start=1):
        lp.add_row(f"release_{j}", [(t[2 * j - 1], 1.0)], GE, jb.release)
        lp.add_row(f"deadline_{j}", [(t[2 * j], 1.0)], LE, jb.deadline)

    # consumption only between the job's own start and completion
    for j, jb in enumerate(inst.jobs, start=1):
        s, c = 2 * j - 1, 2 * j
        for i in events:
            if i != c:
                lp.add_row(f"before_end_{j}_{i}",
                           [(p[(j, i)], 1.0), (a[(i, c)], -jb.e_total)], LE, 0.0)
            if i != s:
                lp.add_row(f"after_start_{j}_{i}",
                           [(p[(j, i)], 1.0), (a[(s, i)], -jb.e_total)], LE, 0.0)

    for j, jb in enumerate(inst.jobs, start=1):
        big = jb.p_max * big_h
        for i in events:
            for k in events:
                if i == k:
                    continue
                # p_ji <= P+ (t_k - t_i) + M a_ki
                lp.add_row(f"upper_{j}_{i}_{k}",
                           [(p[(j, i)], 1.0), (t[k], -jb.p_max),
                            (t[i], jb.p_max), (a[(k, i)], -big)], LE, 0.0)

    for j, jb in enumerate(inst.jobs, start=1):
        s, c = 2 * j - 1, 2 * j
        big = jb.p_min * big_h
        for i in events:
            for k in events:
                # intervals opened by the completion, or closed by the
                # start, are outside the job's window
                if i == k or i == c or k == s:
                    continue
                # p_ji >= P- (t_k - t_i) - M (1 - b_ik + a_ks + a_ci)
                row = [(p[(j, i)], 1.0), (t[k], -jb.p_min), (t[i], jb.p_min),
                       (b[(i, k)], -big)]
                if k != s:
                    row.append((a[(k, s)], big))
                if i != c:
                    row.append((a[(c, i)], big))
                lp.add_row(f"lower_{j}_{i}_{k}", row, GE, -big)

    big = inst.capacity * big_h
    for i in events:
        for k in events:
            if i == k:
                continue
            row = [(p[(j, i)], 1.0) for j in range(1, n + 1)]
            row += [(t[k], -inst.capacity), (t[i], inst.capacity),
                    (a[(k, i)], -big)]
            lp.add_row(f"capacity_{i}_{k}", row, LE, 0.0)

    for i in events:
        for k in events:
            if i != k:
                lp.add_row(f"order_{i}_{k}",
                           [(t[i], 1.0), (t[k], -1.0), (a[(k, i)], -big_h)],
                           LE, 0.0)

    for i in events:
        for k in events:
            if i < k:
                lp.add_row(f"antisym_{i}_{k}",
                           [(a[(i, k)], 1.0), (a[(k, i)], 1.0)], EQ, 1.0)

    big = 2 * n
    for i in events:
        for k in events:
            if i == k:
                continue
            # (#events after i) - (#events after k) = 1 when b_ik = 1
            diff = [(a[(i, x)], 1.0) for x in events if x != i]
            diff += [(a[(k, x)], -1.0) for x in events if x != k]
            lp.add_row(f"succ_hi_{i}_{k}", diff + [(b[(i, k)], big)],
                       LE, 1.0 + big)
            lp.add_row(f"succ_lo_{i}_{k}", diff + [(b[(i, k)], -big)],
                       GE, 1.0 - big)
    lp.add_row("succ_count", [(c, 1.0) for c in b.values()], EQ, m - 1)

    if valid_inequalities:
        for j, jb in enumerate(inst.jobs, start=1):
            dur = [(t[2 * j], 1.0), (t[2 * j - 1], -1.0)]
            if jb.p_min > 0:
                lp.add_row(f"max_duration_{j}", dur, LE, jb.e_total / jb.p_min)
            lp.add_row(f"min_duration_{j}", dur, GE, jb.e_total / jb.p_max)
    return lp


def export_milp(model, path):
    """Write ``model`` to ``path`` in CPLEX LP format."""
    with open(path, "w") as fh:
        write_lp(model, fh)


def load_milp(path):
    with open(path) as fh:
        return read_lp(fh)


def order_assignment(order):
    """Values of the ``a`` and ``b`` variables that encode ``order``."""
    m = len(order)
    vals = {}
    for i in range(1, m + 1):
        for k in range(1, m + 1):
            if i != k:
                pi, pk = order.position(i), order.position(k)
                vals[aname(i, k)] = 1.0 if pi < pk else 0.0
                vals[bname(i, k)] = 1.0 if pk == pi + 1 else 0.0
    return vals


def fix_order(model, order):
    """Copy of ``model`` with the order variables fixed to ``order``."""
    fixed = model.copy()
    for name, v in order_assignment(order).items():
        fixed.set_bounds(name, v, v)
    return fixed


def solve_fixed_relaxation(model, order):
    """Solve the continuous relaxation with binaries fixed to ``order``."""
    return solve(fix_order(model, order), relax=True)


def solve_milp(model, time_limit=None):
    """Solve the MILP with HiGHS. Only practical for very small ``n``."""
    return solve(model, time_limit=time_limit)


def order_from_milp_solution(model, x, n):
    """Recover the event order encoded by the ``a`` variables of ``x``."""
    m = 2 * n
    after = {i: sum(round(x[model.col(aname(i, k))])
                    for k in range(1, m + 1) if k != i)
             for i in range(1, m + 1)}
    return EventOrder(sorted(after, key=lambda i: (-after[i], i)))


class ExactStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    NOT_RUN = "not-run"


@dataclass
class ExactResult:
    status: ExactStatus
    objective: float = math.inf
    order: EventOrder = None
    schedule: object = None
    explored: int = 0
    wall_time: float = 0.0


def linear_extensions(prec):
    """Yield every event sequence respecting ``prec``, lexicographically."""
    m = 2 * prec.n
    pred = prec.predecessors()
    placed = [False] * (m + 1)
    seq = []

    def rec():
        if len(seq) == m:
            yield tuple(seq)
            return
        for i in range(1, m + 1):
            if not placed[i] and all(placed[k] for k in pred[i]):
                placed[i] = True
                seq.append(i)
                yield from rec()
                seq.pop()
                placed[i] = False

    yield from rec()


def count_linear_extensions(prec):
    return sum(1 for _ in linear_extensions(prec))


def enumerate_exact(inst, prec=None, max_jobs=MAX_ENUM_JOBS, tol=1e-9):
    """Optimum over all event orders, by brute force.

    Every linear extension of ``prec`` is scored with the slack-free
    schedule LP. Ties are resolved towards the lexicographically smallest
    order.

    Parameters
    ----------
    inst : Instance
    prec : PrecedenceSet, optional
        Defaults to the implicit precedences, which no feasible schedule
        can violate.
    max_jobs : int
        Refuse instances with more jobs than this.

    Returns
    -------
    ExactResult
    """
    if inst.n > max_jobs:
        raise ValueError(f"enumeration refused for n={inst.n} > {max_jobs}")
    t0 = time.monotonic()
    prec = prec or implicit_precedences(inst)
    best = ExactResult(ExactStatus.INFEASIBLE)
    for seq in linear_extensions(prec):
        best.explored += 1
        order = EventOrder(seq)
        lp = build_schedule_lp(inst, order, None)
        sol = solve_schedule_lp(lp)
        if sol.status is Status.INFEASIBLE:
            continue
        if not sol.optimal:
            raise RuntimeError(f"schedule LP not solved: {sol.status.value}")
        if sol.objective < best.objective - tol:
            best.status = ExactStatus.OPTIMAL
            best.objective = sol.objective
            best.order = order
            best.schedule = extract_schedule(inst, order, lp, sol)
    best.wall_time = time.monotonic() - t0
    return best
