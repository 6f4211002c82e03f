import math

import numpy as np
import pytest

from cecsp import (EventOrder, Evaluator, PenaltyWeights, build_schedule_lp,
                   score_order, validate_schedule)
from cecsp.lp import EQ, LE

from conftest import random_instance, random_order


def time_conflict(inst, order):
    """True if some start is ordered before a completion whose deadline
    precedes the start's release; then no event times exist at all."""
    seq = order.sequence
    for pos_s, s in enumerate(seq):
        if s % 2 == 0:
            continue
        r = inst.job((s + 1) // 2).release
        for c in seq[pos_s + 1:]:
            if c % 2 == 0 and inst.job(c // 2).deadline < r:
                return True
    return False


class TestModel:
    def test_dimensions(self, example):
        order = EventOrder([1, 3, 4, 5, 2, 6])
        lp = build_schedule_lp(example, order)
        t_cols = [nm for nm in lp.col_names if nm.startswith("t_")]
        assert len(t_cols) == 6
        order_rows = [nm for nm in lp.row_names if nm.startswith("order_")]
        assert len(order_rows) == 5
        p2 = [nm for nm in lp.col_names if nm.startswith("p_2_")]
        assert p2 == ["p_2_3"]

    def test_slack_costs(self, example):
        lp = build_schedule_lp(example, EventOrder([1, 3, 4, 5, 2, 6]))
        for nm in lp.col_names:
            if nm.startswith("s_"):
                assert lp.cost[lp.col(nm)] == 5.0

    def test_slack_free_has_no_slacks(self, example):
        lp = build_schedule_lp(example, EventOrder([1, 3, 4, 5, 2, 6]), None)
        assert not any(nm.startswith("s_") for nm in lp.col_names)

    def test_work_rows_are_equalities(self, example):
        lp = build_schedule_lp(example, EventOrder([1, 2, 3, 4, 5, 6]))
        for r, nm in enumerate(lp.row_names):
            if nm.startswith("work_"):
                assert lp.row_sense[r] == EQ
            if nm.startswith("capacity_"):
                assert lp.row_sense[r] == LE

    def test_negative_penalty_rejected(self):
        with pytest.raises(ValueError):
            PenaltyWeights(bound=-1.0)


class TestScoring:
    def test_single_job(self, single_job):
        sched, score = score_order(single_job, EventOrder([1, 2]))
        assert score == pytest.approx(1.0)
        assert sched.completion(1) == pytest.approx(1.0)
        assert sched.is_slack_free()

    def test_example_optimum_order(self, example):
        sched, score = score_order(example, EventOrder([1, 3, 4, 5, 2, 6]))
        assert score == pytest.approx(163 / 6, abs=1e-6)
        assert sched.is_slack_free()

    def test_random_orders(self):
        rng = np.random.default_rng(7)
        n_inf = 0
        for k in range(1000):
            inst = random_instance(4, k % 50)
            order = EventOrder(random_order(4, rng))
            sched, score = score_order(inst, order)
            if time_conflict(inst, order):
                assert sched is None and math.isinf(score)
                n_inf += 1
            else:
                assert sched is not None and math.isfinite(score)
                assert sched.score == pytest.approx(score)
        assert 0 < n_inf < 1000

    def test_completion_lower_bound(self):
        rng = np.random.default_rng(3)
        checked = 0
        for k in range(60):
            inst = random_instance(4, k)
            if any(5.0 * jb.p_max < jb.weight for jb in inst.jobs):
                continue
            order = EventOrder(random_order(4, rng))
            _, score = score_order(inst, order)
            assert score >= inst.completion_lower_bound() - 1e-6
            checked += 1
        assert checked > 20

    def test_slack_free_solutions_validate(self):
        rng = np.random.default_rng(11)
        n_ok = 0
        for k in range(200):
            inst = random_instance(3, k)
            order = EventOrder(random_order(3, rng))
            sched, _ = score_order(inst, order)
            if sched is not None and sched.is_slack_free():
                rep = validate_schedule(inst, order, sched)
                assert rep.is_feasible, rep.summary()
                n_ok += 1
        assert n_ok > 10

    def test_tied_swap_never_worse(self):
        rng = np.random.default_rng(0)
        n_tied = 0
        for k in range(150):
            inst = random_instance(4, k)
            order = EventOrder(random_order(4, rng))
            sched, score = score_order(inst, order)
            if sched is None:
                continue
            for e in range(1, 8):
                a, b = order.at(e), order.at(e + 1)
                if (a + 1) // 2 == (b + 1) // 2:
                    continue
                if abs(sched.times[a] - sched.times[b]) > 1e-9:
                    continue
                _, swapped = score_order(inst, order.swapped(e))
                assert swapped <= score + 1e-6
                n_tied += 1
        assert n_tied > 0

    def test_deterministic(self, example):
        order = EventOrder([1, 3, 2, 4, 5, 6])
        s1, v1 = score_order(example, order)
        s2, v2 = score_order(example, order)
        assert v1 == v2
        np.testing.assert_array_equal(s1.times, s2.times)


class TestEvaluator:
    def test_cache(self, example):
        ev = Evaluator(example)
        order = EventOrder([1, 3, 4, 5, 2, 6])
        a = ev(order)
        b = ev(EventOrder(order.sequence))
        assert a is b
        assert ev.n_solves == 1

    def test_feasible_flag(self, example):
        ev = Evaluator(example)
        sched, _ = ev(EventOrder([1, 3, 4, 5, 2, 6]))
        assert ev.is_feasible(sched)
        assert not ev.is_feasible(None)
