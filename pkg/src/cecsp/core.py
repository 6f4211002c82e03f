"""Domain model: jobs, instances, events, event orders and schedules.

Events are identified by 1-based integers. Job ``j`` (also 1-based) owns
the start event ``2j - 1`` and the completion event ``2j``. An interval is
identified by the event that opens it.
"""
from dataclasses import dataclass, field
import math

import numpy as np

DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class Job:
    """A single job competing for the shared continuous resource.

    Parameters
    ----------
    e_total : float
        Total amount of resource the job must consume.
    release : float
        Earliest start time.
    deadline : float
        Latest completion time.
    p_min, p_max : float
        Bounds on the consumption rate while the job is active.
    weight : float
        Cost per unit of completion time.
    offset : float
        Constant cost added to the objective.
    """
    e_total: float
    release: float
    deadline: float
    p_min: float
    p_max: float
    weight: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if not self.e_total > 0:
            raise ValueError(f"e_total must be positive, got {self.e_total}")
        if not 0 <= self.p_min <= self.p_max:
            raise ValueError(
                f"need 0 <= p_min <= p_max, got {self.p_min}, {self.p_max}")
        if self.release < 0:
            raise ValueError(f"release must be >= 0, got {self.release}")
        if not self.deadline > self.release:
            raise ValueError("deadline must lie after the release time")
        # relative slack absorbs float error in decimal-rounded windows
        if self.deadline - self.release < self.min_duration * (1 - 1e-12):
            raise ValueError(
                "job cannot be completed inside its window at rate p_max "
                f"(window {self.deadline - self.release:g}, "
                f"needs {self.min_duration:g})")

    @property
    def min_duration(self):
        """Shortest possible processing time, ``e_total / p_max``."""
        if self.p_max == 0:
            return math.inf
        return self.e_total / self.p_max

    def cost(self, completion):
        return self.weight * completion + self.offset


@dataclass(frozen=True)
class Instance:
    """A capacity ``P`` shared by an ordered tuple of jobs."""
    capacity: float
    jobs: tuple

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if not self.capacity > 0:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        if len(self.jobs) < 1:
            raise ValueError("an instance needs at least one job")

    @property
    def n(self):
        return len(self.jobs)

    @property
    def n_events(self):
        return 2 * len(self.jobs)

    def job(self, j):
        """Return job ``j`` (1-based)."""
        _check_job(j, self.n)
        return self.jobs[j - 1]

    def as_array(self):
        """Job data as an ``(n, 7)`` array.

        Columns are ``E, r, deadline, p_min, p_max, w, B``.
        """
        return np.array([[jb.e_total, jb.release, jb.deadline, jb.p_min,
                          jb.p_max, jb.weight, jb.offset]
                         for jb in self.jobs], dtype=float)

    def horizon(self):
        return max(jb.deadline for jb in self.jobs)

    def completion_lower_bound(self):
        """Objective lower bound from each job finishing as early as possible."""
        return sum(jb.offset + jb.weight * (jb.release + jb.min_duration)
                   for jb in self.jobs)


def _check_job(j, n):
    if not 1 <= j <= n:
        raise IndexError(f"job index {j} out of range 1..{n}")


def start_event(j, n=None):
    """Event id of the start of job ``j``."""
    if n is not None:
        _check_job(j, n)
    elif j < 1:
        raise IndexError(f"job index {j} out of range")
    return 2 * j - 1


def completion_event(j, n=None):
    """Event id of the completion of job ``j``."""
    if n is not None:
        _check_job(j, n)
    elif j < 1:
        raise IndexError(f"job index {j} out of range")
    return 2 * j


def job_of(i, n=None):
    """Map an event id to ``(job index, is_start)``."""
    if i < 1 or (n is not None and i > 2 * n):
        raise IndexError(f"event id {i} out of range")
    return (i + 1) // 2, i % 2 == 1


class EventOrder:
    """Chronological sequence of all ``2n`` events.

    Immutable. ``at(e)`` gives the event at 1-based position ``e`` and
    ``position(i)`` the position of event ``i``.

    Parameters
    ----------
    sequence : iterable of int
        A permutation of ``1..2n`` with every start before its completion.
    """
    __slots__ = ("_seq", "_pos")

    def __init__(self, sequence):
        seq = tuple(int(i) for i in sequence)
        m = len(seq)
        if m == 0 or m % 2:
            raise ValueError("an event order must contain 2n events")
        if sorted(seq) != list(range(1, m + 1)):
            raise ValueError("sequence is not a permutation of 1..2n")
        pos = [0] * (m + 1)
        for e, i in enumerate(seq, start=1):
            pos[i] = e
        for j in range(1, m // 2 + 1):
            if pos[2 * j - 1] > pos[2 * j]:
                raise ValueError(f"job {j} completes before it starts")
        self._seq = seq
        self._pos = tuple(pos)

    @property
    def sequence(self):
        return self._seq

    @property
    def n(self):
        return len(self._seq) // 2

    def __len__(self):
        return len(self._seq)

    def __iter__(self):
        return iter(self._seq)

    def __eq__(self, other):
        return isinstance(other, EventOrder) and self._seq == other._seq

    def __hash__(self):
        return hash(self._seq)

    def __repr__(self):
        return f"EventOrder({list(self._seq)})"

    def position(self, i):
        return self._pos[i]

    def at(self, e):
        if not 1 <= e <= len(self._seq):
            raise IndexError(f"position {e} out of range")
        return self._seq[e - 1]

    def window(self, j):
        """Positions ``E(2j-1) .. E(2j)-1``: intervals in which job ``j`` runs."""
        return range(self._pos[2 * j - 1], self._pos[2 * j])

    def active_intervals(self, j):
        """Opening event ids of the intervals in which job ``j`` runs."""
        return [self._seq[e - 1] for e in self.window(j)]

    def swapped(self, e):
        """Copy with positions ``e`` and ``e + 1`` exchanged (unchecked)."""
        seq = list(self._seq)
        seq[e - 1], seq[e] = seq[e], seq[e - 1]
        return EventOrder(seq)

    def label(self):
        parts = []
        for i in self._seq:
            j, is_start = job_of(i)
            parts.append(f"{'S' if is_start else 'C'}{j}")
        return " ".join(parts)


@dataclass(frozen=True)
class PrecedenceSet:
    """Ordered event pairs ``(before, after)`` every valid order respects."""
    n: int
    pairs: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        for a, b in self.pairs:
            if a == b:
                raise ValueError(f"reflexive precedence ({a}, {a})")
        for j in range(1, self.n + 1):
            if (2 * j - 1, 2 * j) not in self.pairs:
                raise ValueError(f"missing start-before-completion pair of job {j}")

    def __contains__(self, pair):
        return pair in self.pairs

    def __len__(self):
        return len(self.pairs)

    def related(self, a, b):
        """True if ``a`` and ``b`` are ordered either way."""
        return (a, b) in self.pairs or (b, a) in self.pairs

    def predecessors(self):
        """Map from event id to the set of events that must precede it."""
        pred = {i: set() for i in range(1, 2 * self.n + 1)}
        for a, b in self.pairs:
            pred[b].add(a)
        return pred

    def respected_by(self, order):
        return all(order.position(a) < order.position(b) for a, b in self.pairs)

    def is_acyclic(self):
        pred = self.predecessors()
        placed = set()
        remaining = set(pred)
        while remaining:
            ready = [i for i in remaining if pred[i] <= placed]
            if not ready:
                return False
            placed.update(ready)
            remaining.difference_update(ready)
        return True

    @classmethod
    def trivial(cls, n):
        """Only the start-before-completion pairs."""
        return cls(n, frozenset((2 * j - 1, 2 * j) for j in range(1, n + 1)))


def event_windows(inst):
    """Earliest and latest possible time for every event.

    Returns
    -------
    lo, hi : ndarray
        Arrays of length ``2n + 1``; entry 0 is unused.
    """
    lo = np.zeros(inst.n_events + 1)
    hi = np.zeros(inst.n_events + 1)
    for j, jb in enumerate(inst.jobs, start=1):
        u = jb.min_duration
        lo[2 * j - 1], hi[2 * j - 1] = jb.release, jb.deadline - u
        lo[2 * j], hi[2 * j] = jb.release + u, jb.deadline
    return lo, hi


def implicit_precedences(inst):
    """Precedences implied by the time windows of the events.

    Start events may happen in ``[r_j, d_j - u_j]`` and completions in
    ``[r_j + u_j, d_j]`` where ``u_j = E_j / P+_j``. Event ``i`` must
    precede ``i'`` whenever the latest time of ``i`` is strictly before
    the earliest time of ``i'``.
    """
    lo, hi = event_windows(inst)
    m = inst.n_events
    pairs = {(2 * j - 1, 2 * j) for j in range(1, inst.n + 1)}
    for a in range(1, m + 1):
        for b in range(1, m + 1):
            if a != b and hi[a] < lo[b]:
                pairs.add((a, b))
    return PrecedenceSet(inst.n, frozenset(pairs))


@dataclass(frozen=True)
class Schedule:
    """Event times and per-interval consumption for a fixed event order.

    ``times[i]`` is the time of event ``i`` (index 0 unused).
    ``consumption[(j, i)]`` is the amount job ``j`` consumes in the
    interval opened by event ``i``. Slack dictionaries follow the same
    keys; ``slack_capacity`` is keyed by the opening event.
    """
    order: EventOrder
    times: np.ndarray
    consumption: dict
    slack_lower: dict = field(default_factory=dict)
    slack_upper: dict = field(default_factory=dict)
    slack_capacity: dict = field(default_factory=dict)
    score: float = math.nan

    def time(self, i):
        return float(self.times[i])

    def completion(self, j):
        return float(self.times[2 * j])

    def interval_length(self, e):
        """Length of the interval at position ``e``."""
        o = self.order
        return float(self.times[o.at(e + 1)] - self.times[o.at(e)])

    def total_slack(self):
        return (sum(self.slack_lower.values()) + sum(self.slack_upper.values())
                + sum(self.slack_capacity.values()))

    def max_slack(self):
        vals = [*self.slack_lower.values(), *self.slack_upper.values(),
                *self.slack_capacity.values()]
        return max(vals, default=0.0)

    def is_slack_free(self, tol=DEFAULT_TOL):
        return self.max_slack() <= tol

    def objective(self, inst):
        """Unpenalized cost ``sum_j w_j C_j + B_j``."""
        return sum(jb.cost(self.completion(j))
                   for j, jb in enumerate(inst.jobs, start=1))


@dataclass
class Violation:
    constraint: str
    where: tuple
    magnitude: float


@dataclass
class ValidationReport:
    """Constraint violations of a schedule, grouped by constraint name."""
    violations: dict
    tol: float

    @property
    def is_feasible(self):
        return all(v.magnitude <= self.tol
                   for vs in self.violations.values() for v in vs)

    def worst(self):
        """Largest violation magnitude (0 when there are none)."""
        return max((v.magnitude for vs in self.violations.values()
                    for v in vs), default=0.0)

    def summary(self):
        lines = []
        for name, vs in self.violations.items():
            bad = [v for v in vs if v.magnitude > self.tol]
            if bad:
                w = max(bad, key=lambda v: v.magnitude)
                lines.append(f"{name}: {len(bad)} violation(s), worst "
                             f"{w.magnitude:.6g} at {w.where}")
        return "\n".join(lines) if lines else "feasible"


CONSTRAINTS = ("order", "C1", "C2", "C3", "C4", "C5", "C6")


def validate_schedule(inst, order, sched, tol=DEFAULT_TOL):
    """Check a schedule against the true problem constraints.

    Slack values are ignored. Every check records a violation with its
    magnitude whenever the magnitude is positive; feasibility compares
    magnitudes against ``tol``. Intervals of length at most ``tol`` are
    exempt from the lower bound on consumption.

    Raises
    ------
    ValueError
        If the schedule has consumption keyed on an interval outside the
        job's processing window under ``order``.
    """
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    n = inst.n
    if order.n != n:
        raise ValueError("order does not match the instance size")
    t = np.asarray(sched.times, dtype=float)
    if t.shape[0] != 2 * n + 1:
        raise ValueError("times must have 2n + 1 entries (index 0 unused)")
    viol = {name: [] for name in CONSTRAINTS}

    windows = {j: set(order.active_intervals(j)) for j in range(1, n + 1)}
    for (j, i), amount in sched.consumption.items():
        if not 1 <= j <= n or i not in windows[j]:
            raise ValueError(
                f"consumption keyed on ({j}, {i}) outside the job's window")
        if amount < 0:
            viol["C4"].append(Violation("C4", (j, i), -amount))

    for e in range(1, 2 * n):
        gap = t[order.at(e)] - t[order.at(e + 1)]
        if gap > 0:
            viol["order"].append(Violation("order", (e,), gap))

    for j, jb in enumerate(inst.jobs, start=1):
        got = sum(sched.consumption.get((j, i), 0.0) for i in windows[j])
        if abs(got - jb.e_total) > 0:
            viol["C1"].append(Violation("C1", (j,), abs(got - jb.e_total)))
        if t[2 * j - 1] < jb.release:
            viol["C2"].append(Violation("C2", (j,), jb.release - t[2 * j - 1]))
        if t[2 * j] > jb.deadline:
            viol["C3"].append(Violation("C3", (j,), t[2 * j] - jb.deadline))

    for e in range(1, 2 * n):
        i = order.at(e)
        dt = t[order.at(e + 1)] - t[i]
        used = 0.0
        for j, jb in enumerate(inst.jobs, start=1):
            if i not in windows[j]:
                continue
            p = sched.consumption.get((j, i), 0.0)
            used += p
            over = p - jb.p_max * dt
            if over > 0:
                viol["C5"].append(Violation("C5", (j, i), over))
            if dt > tol:
                under = jb.p_min * dt - p
                if under > 0:
                    viol["C5"].append(Violation("C5", (j, i), under))
        excess = used - inst.capacity * dt
        if excess > 0:
            viol["C6"].append(Violation("C6", (i,), excess))

    return ValidationReport(viol, tol)


def interval_totals(inst, order, times, profiles, **quad_kw):
    """Integrate consumption profiles over the intervals of an order.

    Parameters
    ----------
    profiles : dict
        Job index to a callable ``p_j(t)`` giving the consumption rate.
    """
    from scipy.integrate import quad

    totals = {}
    for j in range(1, inst.n + 1):
        f = profiles[j]
        for e in order.window(j):
            i = order.at(e)
            a, b = float(times[i]), float(times[order.at(e + 1)])
            totals[(j, i)] = quad(f, a, b, **quad_kw)[0] if b > a else 0.0
    return totals


def piecewise_constant_average(inst, order, sched, profiles=None):
    """Replace consumption profiles by their per-interval averages.

    Given a schedule already expressed as per-interval totals this is the
    identity on consumption; with ``profiles`` (job index to rate
    function) the totals are obtained by integrating each profile over
    the intervals of ``order`` using the event times of ``sched``. The
    score is recomputed from the completion times.
    """
    times = np.asarray(sched.times, dtype=float)
    if profiles is None:
        consumption = dict(sched.consumption)
    else:
        consumption = interval_totals(inst, order, times, profiles)
    out = Schedule(order=order, times=times.copy(), consumption=consumption)
    return Schedule(order=order, times=out.times, consumption=consumption,
                    score=out.objective(inst))
