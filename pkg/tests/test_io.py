import json

import numpy as np
import pytest

from cecsp import EventOrder, score_order, load_instance, save_instance
from cecsp.io import (FormatError, instance_filename, load_schedule,
                      save_schedule, schedule_from_dict, schedule_to_dict)


def test_instance_roundtrip(example, tmp_path):
    path = tmp_path / "i.json"
    save_instance(example, path)
    assert load_instance(path) == example


def test_schedule_roundtrip(example, tmp_path):
    sched, _ = score_order(example, EventOrder([1, 3, 4, 5, 2, 6]))
    path = tmp_path / "s.json"
    save_schedule(sched, path, example, {"feasible": True})
    back = load_schedule(path)
    assert back.order == sched.order
    np.testing.assert_array_equal(back.times, sched.times)
    assert back.consumption == sched.consumption
    assert back.slack_capacity == sched.slack_capacity
    assert back.score == sched.score
    assert json.loads(path.read_text())["feasible"] is True


def test_infinite_score_is_null(example):
    sched, _ = score_order(example, EventOrder([1, 3, 4, 5, 2, 6]))
    d = schedule_to_dict(sched)
    d["score"] = None
    assert schedule_from_dict(d).score == float("inf")


@pytest.mark.parametrize("payload", [
    {"capacity": 10},
    {"capacity": 10, "jobs": [{"E": 1.0}]},
    {"version": 2, "capacity": 10, "jobs": []},
])
def test_malformed_instance(payload, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    with pytest.raises(FormatError):
        load_instance(path)


def test_malformed_schedule(example):
    sched, _ = score_order(example, EventOrder([1, 3, 4, 5, 2, 6]))
    d = schedule_to_dict(sched)
    d["times"] = d["times"][:-1]
    with pytest.raises(FormatError):
        schedule_from_dict(d)


def test_filename():
    assert instance_filename(10, 50.0, True, 3) == "cecsp_n10_P50_adv1_3.json"
