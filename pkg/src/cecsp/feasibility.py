"""Max-flow screen for instance feasibility, ignoring lower bounds.

Jobs and time intervals form a bipartite network: the source feeds job
``j`` with ``E_j``, job ``j`` may push ``(t_e - t_s) P+_j`` into every
interval inside its window, and each interval drains ``(t_e - t_s) P``
into the sink. If the maximum flow does not reach ``sum_j E_j`` no
schedule exists. The converse does not hold, because the lower bounds
on consumption are not modeled.
"""
from dataclasses import dataclass, field

import networkx as nx

SOURCE, SINK = "source", "sink"
FLOW_TOL = 1e-9


@dataclass
class FlowNetwork:
    """Bipartite job/interval network.

    ``intervals`` lists ``(t_s, t_e)`` pairs; ``arcs`` maps
    ``(tail, head)`` to capacity. Job nodes are ``("job", j)`` and
    interval nodes ``("interval", k)`` with ``k`` indexing ``intervals``.
    """
    n_jobs: int
    intervals: list
    arcs: dict

    @property
    def nodes(self):
        return ([SOURCE, SINK] + [("job", j) for j in range(1, self.n_jobs + 1)]
                + [("interval", k) for k in range(len(self.intervals))])

    def to_networkx(self):
        g = nx.DiGraph()
        g.add_nodes_from(self.nodes)
        for (u, v), cap in self.arcs.items():
            g.add_edge(u, v, capacity=cap)
        return g


@dataclass
class FeasibilityReport:
    max_flow_value: float
    demand: float
    passes: bool
    job_flow: dict = field(default_factory=dict)
    shortfall: dict = field(default_factory=dict)
    saturated_intervals: list = field(default_factory=list)

    def to_dict(self):
        return {"passes": self.passes, "max_flow": self.max_flow_value,
                "demand": self.demand,
                "shortfall": {str(j): v for j, v in self.shortfall.items()},
                "saturated_intervals": [list(iv) for iv in
                                        self.saturated_intervals]}


def build_network(inst):
    """Construct the flow network of ``inst``."""
    cuts = sorted({jb.release for jb in inst.jobs}
                  | {jb.deadline for jb in inst.jobs})
    intervals = list(zip(cuts[:-1], cuts[1:]))
    arcs = {}
    for j, jb in enumerate(inst.jobs, start=1):
        arcs[(SOURCE, ("job", j))] = jb.e_total
        for k, (ts, te) in enumerate(intervals):
            if jb.release <= ts and te <= jb.deadline:
                arcs[(("job", j), ("interval", k))] = (te - ts) * jb.p_max
    for k, (ts, te) in enumerate(intervals):
        arcs[(("interval", k), SINK)] = (te - ts) * inst.capacity
    return FlowNetwork(inst.n, intervals, arcs)


def check_feasibility(inst, tol=FLOW_TOL):
    """Run the max-flow screen on ``inst``.

    Returns
    -------
    FeasibilityReport
        ``passes`` is True when the flow saturates total demand within
        ``tol``. ``shortfall`` lists, per job, the part of its requirement
        the maximum flow could not route; ``saturated_intervals`` are the
        intervals on the source side of a minimum cut, whose arcs into the
        sink are therefore cut: the bottleneck periods.
    """
    net = build_network(inst)
    g = net.to_networkx()
    value, flow = nx.maximum_flow(g, SOURCE, SINK)
    demand = sum(jb.e_total for jb in inst.jobs)
    passes = value >= demand - tol
    job_flow = {j: flow[SOURCE][("job", j)] for j in range(1, inst.n + 1)}
    report = FeasibilityReport(value, demand, passes, job_flow)
    if not passes:
        report.shortfall = {j: jb.e_total - job_flow[j]
                            for j, jb in enumerate(inst.jobs, start=1)
                            if jb.e_total - job_flow[j] > tol}
        _, (reach, _) = nx.minimum_cut(g, SOURCE, SINK)
        report.saturated_intervals = [
            net.intervals[k] for k in range(len(net.intervals))
            if ("interval", k) in reach]
    return report
