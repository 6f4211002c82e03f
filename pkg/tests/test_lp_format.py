import io
import math

import numpy as np
import pytest

from cecsp import EventOrder, build_schedule_lp, build_milp
from cecsp.lp import LinearProgram, LE, GE, EQ, read_lp, write_lp, solve, Status


def roundtrip(lp):
    buf = io.StringIO()
    write_lp(lp, buf)
    buf.seek(0)
    return read_lp(buf), buf.getvalue()


def small_lp():
    lp = LinearProgram("toy")
    x = lp.add_var("x", cost=1.0)
    y = lp.add_var("y", lb=-2.0, ub=3.0, cost=-2.0)
    z = lp.add_var("z", ub=1.0, integer=True)
    lp.objective_offset = 4.5
    lp.add_row("c1", [(x, 1.0), (y, 1.0)], GE, 1.0)
    lp.add_row("c2", [(x, 2.0), (z, -1.5)], LE, 10.0)
    lp.add_row("c3", [(y, 1.0), (z, 1.0)], EQ, 2.0)
    return lp


def test_roundtrip_toy():
    lp = small_lp()
    back, text = roundtrip(lp)
    assert "Binaries" in text
    assert back.col_names == lp.col_names
    assert back.row_names == lp.row_names
    assert back.row_sense == lp.row_sense
    np.testing.assert_allclose(back.rhs, lp.rhs)
    np.testing.assert_allclose(back.cost, lp.cost)
    np.testing.assert_allclose(back.col_lb, lp.col_lb)
    np.testing.assert_allclose(back.col_ub, lp.col_ub)
    assert back.objective_offset == pytest.approx(4.5)
    assert (back.matrix() != lp.matrix()).nnz == 0


def test_roundtrip_same_optimum():
    lp = small_lp()
    back, _ = roundtrip(lp)
    a, b = solve(lp), solve(back)
    assert a.status is Status.OPTIMAL
    assert a.objective == pytest.approx(b.objective)


def test_schedule_lp_roundtrip(example):
    lp = build_schedule_lp(example, EventOrder([1, 3, 4, 5, 2, 6]))
    back, _ = roundtrip(lp)
    assert solve(back, relax=True).objective == pytest.approx(
        solve(lp, relax=True).objective, abs=1e-7)


def test_long_rows_wrapped(example):
    _, text = roundtrip(build_milp(example))
    assert max(len(line) for line in text.splitlines()) <= 255


def test_infinite_bounds():
    lp = LinearProgram()
    lp.add_var("free", lb=-math.inf, cost=0.0)
    back, text = roundtrip(lp)
    assert "free" in text
    assert back.col_lb[0] == -math.inf
