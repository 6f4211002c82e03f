"""Simulated annealing over event orders.

The search state is an :class:`~cecsp.core.EventOrder`; every candidate is
scored by solving its schedule LP. Neighbors come from three operators:
swapping adjacent events, moving one event, and moving both events of a
job by the same offset. All operators respect a
:class:`~cecsp.core.PrecedenceSet`.
"""
from dataclasses import dataclass, field, asdict
import json
import logging
import math
import time

import numpy as np

from .core import EventOrder, DEFAULT_TOL, implicit_precedences
from .evaluator import Evaluator, PenaltyWeights

log = logging.getLogger(__name__)

SWAP, MOVE, PAIR = 0, 1, 2
OPERATOR_NAMES = ("swap", "move", "pair")


@dataclass
class RestartConfig:
    enabled: bool = False
    min_wall_seconds: float = 1800.0
    n_random_swaps: int = 100


@dataclass
class SAConfig:
    """Simulated-annealing parameters.

    Use :meth:`for_instance` to obtain the defaults that scale with the
    number of jobs: ``t_init = n`` and ``alpha_period = 4 (2n - 1)``.
    """
    t_init: float = 1.0
    alpha: float = 0.95
    alpha_period: int = 4
    max_iter: int = 10_000
    penalties: PenaltyWeights = field(default_factory=PenaltyWeights)
    op_probs: tuple = (0.75, 0.15, 0.1)
    restart: RestartConfig = field(default_factory=RestartConfig)
    seed: int = None
    time_limit: float = None
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if isinstance(self.penalties, dict):
            self.penalties = PenaltyWeights(**self.penalties)
        if isinstance(self.restart, dict):
            self.restart = RestartConfig(**self.restart)
        self.op_probs = tuple(float(p) for p in self.op_probs)
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if len(self.op_probs) != 3 or min(self.op_probs) < 0 \
                or abs(sum(self.op_probs) - 1) > 1e-9:
            raise ValueError("op_probs must be three probabilities summing to 1")
        if self.alpha_period < 1 or self.max_iter < 0:
            raise ValueError("alpha_period must be positive, max_iter >= 0")
        if self.t_init < 0:
            raise ValueError("t_init must be nonnegative")
        if self.restart.n_random_swaps < 0:
            raise ValueError("n_random_swaps must be nonnegative")

    @classmethod
    def for_instance(cls, n, **overrides):
        params = dict(t_init=float(n), alpha_period=(2 * n - 1) * 4)
        params.update(overrides)
        return cls(**params)

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


# -- initial solution --------------------------------------------------------

def greedy_initial_order(inst, eps=1e-9):
    """Event order extracted from a deadline-greedy resource assignment.

    The horizon is cut at every distinct release time and deadline. In
    each period, available jobs first get the minimum they need to still
    meet their deadline at full rate; if those minima fit in the period,
    the rest of the period's resource goes to jobs by increasing
    deadline. Lower bounds and costs are ignored.
    """
    n = inst.n
    jobs = inst.jobs
    by_deadline = sorted(range(1, n + 1), key=lambda j: (jobs[j - 1].deadline, j))
    remaining = {j: jobs[j - 1].e_total for j in range(1, n + 1)}
    started, done = set(), set()
    seq = []

    def give(j, amount):
        if amount <= 0:
            return
        if j not in started:
            started.add(j)
            seq.append(2 * j - 1)
        remaining[j] -= amount
        if remaining[j] <= eps and j not in done:
            remaining[j] = 0.0
            done.add(j)
            seq.append(2 * j)

    cuts = sorted({jb.release for jb in jobs} | {jb.deadline for jb in jobs})
    for ts, te in zip(cuts[:-1], cuts[1:]):
        dt = te - ts
        avail = [j for j in by_deadline
                 if jobs[j - 1].release <= ts and jobs[j - 1].deadline >= te
                 and j not in done]
        if not avail:
            continue
        got = {}
        for j in avail:
            jb = jobs[j - 1]
            got[j] = max(0.0, remaining[j] - (jb.deadline - te) * jb.p_max)
        budget = dt * inst.capacity - sum(got.values())
        for j in avail:
            give(j, got[j])
        if budget < 0:
            continue
        for j in avail:
            if j in done or budget <= eps:
                continue
            jb = jobs[j - 1]
            amount = min(remaining[j], jb.p_max * dt - got[j], budget)
            if amount > eps:
                give(j, amount)
                budget -= amount
    for j in by_deadline:
        if j not in started:
            started.add(j)
            seq.append(2 * j - 1)
    for j in by_deadline:
        if j not in done:
            done.add(j)
            seq.append(2 * j)
    return repair_order(seq, implicit_precedences(inst))


def repair_order(seq, prec):
    """Stable topological sort of ``seq`` under ``prec``.

    Orders that already respect ``prec`` come back unchanged; otherwise
    each event is held back just until its predecessors are placed.
    """
    pred = prec.predecessors()
    placed = set()
    pending = list(seq)
    out = []
    while pending:
        for k, i in enumerate(pending):
            if pred[i] <= placed:
                break
        else:
            raise ValueError("precedences contain a cycle")
        out.append(pending.pop(k))
        placed.add(out[-1])
    return EventOrder(out)


# -- neighborhood operators --------------------------------------------------

def op_swap_adjacent(order, prec, e):
    """Swap the events at positions ``e`` and ``e + 1``.

    Returns ``None`` when the swap would break a precedence.
    """
    if not 1 <= e < len(order):
        raise IndexError(f"swap position {e} out of range")
    a, b = order.at(e), order.at(e + 1)
    if (a, b) in prec:
        return None
    return order.swapped(e)


def movement_limits(order, prec, e, ignore=None):
    """How far the event at position ``e`` may move left and right.

    Movement stops just short of the nearest event, on either side, that
    has a precedence relation with it. ``ignore`` is an event that neither
    blocks nor counts (the partner in a paired move).
    """
    i = order.at(e)
    seq = order.sequence
    left = 0
    for k in range(e - 2, -1, -1):
        other = seq[k]
        if other == ignore:
            continue
        if prec.related(i, other):
            break
        left += 1
    right = 0
    for k in range(e, len(seq)):
        other = seq[k]
        if other == ignore:
            continue
        if prec.related(i, other):
            break
        right += 1
    return left, right


def _relocate(order, e, new_e):
    seq = list(order.sequence)
    i = seq.pop(e - 1)
    seq.insert(new_e - 1, i)
    return EventOrder(seq)


def op_move_single(order, prec, e, rng):
    """Move the event at position ``e`` to a nearby position.

    Candidate positions lie within its movement limits; a position at
    distance ``k`` is drawn with probability proportional to ``1/k``.
    Returns ``None`` when the event cannot move.
    """
    if not 1 <= e <= len(order):
        raise IndexError(f"move position {e} out of range")
    left, right = movement_limits(order, prec, e)
    if left == 0 and right == 0:
        return None
    cand = np.array(list(range(e - left, e)) + list(range(e + 1, e + right + 1)))
    w = 1.0 / np.abs(cand - e)
    new_e = int(rng.choice(cand, p=w / w.sum()))
    return _relocate(order, e, new_e)


def pair_offset_range(order, prec, j):
    """Allowed common offsets ``(lo, hi)`` for the two events of job ``j``."""
    a, b = 2 * j - 1, 2 * j
    la, ra = movement_limits(order, prec, order.position(a), ignore=b)
    lb, rb = movement_limits(order, prec, order.position(b), ignore=a)
    return -min(la, lb), min(ra, rb)


def shift_pair(order, j, offset):
    """Shift both events of job ``j`` by ``offset`` positions (unchecked)."""
    a, b = 2 * j - 1, 2 * j
    pa, pb = order.position(a) + offset, order.position(b) + offset
    if not (1 <= pa and pb <= len(order)):
        raise IndexError("pair shifted out of range")
    rest = [i for i in order.sequence if i != a and i != b]
    rest.insert(pa - 1, a)
    rest.insert(pb - 1, b)
    return EventOrder(rest)


def op_move_pair(order, prec, j, rng):
    """Move both events of job ``j`` by the same, uniformly drawn offset.

    Returns ``None`` when neither direction is open.
    """
    if not 1 <= j <= order.n:
        raise IndexError(f"job {j} out of range")
    lo, hi = pair_offset_range(order, prec, j)
    offsets = [k for k in range(lo, hi + 1) if k != 0]
    if not offsets:
        return None
    return shift_pair(order, j, int(rng.choice(offsets)))


def random_swaps(order, prec, count, rng):
    """Apply ``count`` random precedence-respecting adjacent swaps."""
    for _ in range(count):
        ok = [e for e in range(1, len(order))
              if (order.at(e), order.at(e + 1)) not in prec]
        if not ok:
            break
        order = order.swapped(int(rng.choice(ok)))
    return order


# -- annealing ---------------------------------------------------------------

@dataclass
class SearchResult:
    best_order: EventOrder
    best_schedule: object
    best_score: float
    iterations: int
    accepted_moves: int
    wall_time: float
    feasible: bool
    initial_score: float = math.inf
    best_feasible_order: EventOrder = None
    best_feasible_schedule: object = None
    best_feasible_score: float = math.inf
    restarts: int = 0
    evaluations: int = 0
    history: list = field(default_factory=list, repr=False)


def _accept(delta, temperature, rng):
    if math.isnan(delta) or delta <= 0:
        # nan only arises from inf - inf: both infeasible, treat as a tie
        return True
    if temperature <= 0 or math.isinf(delta):
        return False
    return rng.random() < math.exp(-delta / temperature)


class _Annealer:
    def __init__(self, inst, prec, config, evaluator, rng):
        self.inst = inst
        self.prec = prec
        self.cfg = config
        self.evaluate = evaluator
        self.rng = rng
        self.n = inst.n

    def candidates(self, op, order):
        rng = self.rng
        if op == SWAP:
            for e in rng.permutation(np.arange(1, 2 * self.n)):
                yield op_swap_adjacent(order, self.prec, int(e))
        elif op == MOVE:
            for e in rng.permutation(np.arange(1, 2 * self.n + 1)):
                yield op_move_single(order, self.prec, int(e), rng)
        else:
            for j in rng.permutation(np.arange(1, self.n + 1)):
                yield op_move_pair(order, self.prec, int(j), rng)

    def neighbor(self, order, score, temperature, deadline):
        first = int(self.rng.choice(3, p=self.cfg.op_probs))
        ops = [first] + [o for o in (SWAP, MOVE, PAIR) if o != first]
        for op in ops:
            for cand in self.candidates(op, order):
                if cand is None:
                    continue
                sched, cscore = self.evaluate(cand)
                if _accept(cscore - score, temperature, self.rng):
                    return cand, sched, cscore, op
                if deadline is not None and time.monotonic() > deadline:
                    return None
        return None


def simulated_annealing(inst, prec=None, config=None, initial=None,
                        evaluator=None, trace=False):
    """Run simulated annealing from ``initial``.

    Each iteration returns one accepted neighbor. Improvements and ties
    are always accepted, a worse candidate with probability
    ``exp(-delta / T)``. Every ``alpha_period`` iterations ``T`` is
    multiplied by ``alpha``. The run stops after ``max_iter`` iterations
    or when no operator yields an accepted candidate; with restarts
    enabled an early stop instead perturbs the current order and resets
    the temperature, until ``min_wall_seconds`` have passed.

    Parameters
    ----------
    inst : Instance
    prec : PrecedenceSet, optional
        Defaults to the implicit precedences of ``inst``.
    config : SAConfig, optional
        Defaults to ``SAConfig.for_instance(inst.n)``.
    initial : EventOrder, optional
        Defaults to the greedy order.
    evaluator : Evaluator, optional
        Reuse a scoring cache across runs.
    trace : bool
        Record every current order in ``SearchResult.history``.

    Returns
    -------
    SearchResult
    """
    t0 = time.monotonic()
    cfg = config or SAConfig.for_instance(inst.n)
    prec = prec or implicit_precedences(inst)
    order = initial or greedy_initial_order(inst)
    if not prec.respected_by(order):
        raise ValueError("initial order violates the precedences")
    rng = np.random.default_rng(cfg.seed)
    evaluate = evaluator or Evaluator(inst, cfg.penalties)
    deadline = None if cfg.time_limit is None else t0 + cfg.time_limit
    ann = _Annealer(inst, prec, cfg, evaluate, rng)

    sched, score = evaluate(order)
    res = SearchResult(order, sched, score, 0, 0, 0.0, False,
                       initial_score=score)
    history = [(0, order, score)] if trace else []

    def track(order, sched, score):
        if score < res.best_score:
            res.best_order, res.best_schedule, res.best_score = order, sched, score
        if sched is not None and sched.is_slack_free(cfg.tol) \
                and score < res.best_feasible_score:
            res.best_feasible_order = order
            res.best_feasible_schedule = sched
            res.best_feasible_score = score

    track(order, sched, score)
    temperature = cfg.t_init
    it = 0
    while it < cfg.max_iter:
        if deadline is not None and time.monotonic() > deadline:
            break
        step = ann.neighbor(order, score, temperature, deadline)
        if step is None:
            elapsed = time.monotonic() - t0
            if cfg.restart.enabled and elapsed < cfg.restart.min_wall_seconds \
                    and (deadline is None or time.monotonic() < deadline):
                order = random_swaps(order, prec, cfg.restart.n_random_swaps, rng)
                sched, score = evaluate(order)
                track(order, sched, score)
                temperature = cfg.t_init
                res.restarts += 1
                if trace:
                    history.append((it, order, score))
                continue
            break
        order, sched, score, op = step
        it += 1
        res.accepted_moves += 1
        track(order, sched, score)
        if trace:
            history.append((it, order, score))
        if it % cfg.alpha_period == 0:
            temperature *= cfg.alpha

    res.iterations = it
    res.wall_time = time.monotonic() - t0
    res.feasible = res.best_schedule is not None \
        and res.best_schedule.is_slack_free(cfg.tol)
    res.evaluations = getattr(evaluate, "n_solves", 0)
    res.history = history
    log.debug("SA finished: %d iterations, best %.6g, %d restarts",
              it, res.best_score, res.restarts)
    return res


def solve(inst, config=None, seed=None):
    """Greedy start followed by simulated annealing with default settings."""
    cfg = config or SAConfig.for_instance(inst.n, seed=seed)
    return simulated_annealing(inst, implicit_precedences(inst), cfg,
                               greedy_initial_order(inst))
