import numpy as np
import pytest
from scipy.optimize import linprog

from cecsp import Job, Instance, build_network, check_feasibility
from cecsp.feasibility import SOURCE, SINK

from conftest import random_instance


def flow_lp_value(net):
    """Max flow through ``net`` solved as a plain LP."""
    arcs = list(net.arcs)
    nodes = [v for v in net.nodes if v not in (SOURCE, SINK)]
    a_eq = np.zeros((len(nodes), len(arcs)))
    for c, (u, v) in enumerate(arcs):
        if u in nodes:
            a_eq[nodes.index(u), c] -= 1
        if v in nodes:
            a_eq[nodes.index(v), c] += 1
    cost = np.array([-1.0 if u == SOURCE else 0.0 for u, _ in arcs])
    res = linprog(cost, A_eq=a_eq, b_eq=np.zeros(len(nodes)),
                  bounds=[(0, net.arcs[a]) for a in arcs], method="highs")
    return -res.fun


def test_example_network(example):
    net = build_network(example)
    assert net.intervals == [(0.0, 1.5), (1.5, 2.5), (2.5, 3.0), (3.0, 4.0)]
    job1 = [net.arcs[(("job", 1), ("interval", k))] for k in range(3)]
    assert job1 == pytest.approx([45.0, 30.0, 15.0])
    assert (("job", 1), ("interval", 3)) not in net.arcs
    rep = check_feasibility(example)
    assert rep.max_flow_value == pytest.approx(135.0)
    assert rep.passes
    assert rep.shortfall == {}


def test_overloaded():
    inst = Instance(100.0, [Job(100.0, 0.0, 1.0, 0.0, 100.0),
                            Job(100.0, 0.0, 1.0, 0.0, 100.0)])
    rep = check_feasibility(inst)
    assert not rep.passes
    assert rep.max_flow_value == pytest.approx(100.0)
    assert sum(rep.shortfall.values()) == pytest.approx(100.0)
    assert rep.saturated_intervals == [(0.0, 1.0)]


def test_single_job(single_job):
    net = build_network(single_job)
    assert len(net.nodes) == 4
    assert len(net.arcs) == 3
    assert check_feasibility(single_job).passes


@pytest.mark.parametrize("seed", range(15))
def test_against_lp_oracle(seed):
    inst = random_instance(6, seed, capacity=30.0)
    net = build_network(inst)
    rep = check_feasibility(inst)
    assert rep.max_flow_value == pytest.approx(flow_lp_value(net), abs=1e-6)


@pytest.mark.parametrize("seed", range(15))
def test_structure_and_bound(seed):
    inst = random_instance(6, seed, capacity=20.0)
    net = build_network(inst)
    assert all(te > ts for ts, te in net.intervals)
    total_len = net.intervals[-1][1] - net.intervals[0][0]
    rep = check_feasibility(inst)
    bound = min(rep.demand, total_len * inst.capacity)
    assert rep.max_flow_value <= bound + 1e-9


def test_permutation_invariant():
    inst = random_instance(7, 4, capacity=25.0)
    rng = np.random.default_rng(0)
    perm = rng.permutation(inst.n)
    shuffled = Instance(inst.capacity, [inst.jobs[k] for k in perm])
    a, b = check_feasibility(inst), check_feasibility(shuffled)
    assert a.max_flow_value == pytest.approx(b.max_flow_value)
    assert a.passes == b.passes


def test_report_dict(example):
    d = check_feasibility(example).to_dict()
    assert d["passes"] is True
    assert d["demand"] == pytest.approx(135.0)
