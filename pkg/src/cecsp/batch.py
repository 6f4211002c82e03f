"""Experiment runner producing one CSV row per instance.

Columns follow the layout of the usual result tables: instance identity,
flow-test outcome, simulated-annealing time/objective/feasibility and
initial objective, and the exact optimum where it was computed.
"""
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import math
import os

from .core import implicit_precedences
from .exact import enumerate_exact, ExactStatus
from .feasibility import check_feasibility
from .search import SAConfig, simulated_annealing, greedy_initial_order

CSV_COLUMNS = ("n", "P", "adv", "idx", "flow_feas", "sa_time", "sa_obj",
               "sa_feasible", "init_obj", "exact_time", "exact_obj")


@dataclass
class InstanceId:
    n: int
    capacity: float
    adversarial: bool
    index: int


@dataclass
class RunRecord:
    instance: InstanceId
    flow_pass: bool
    sa: dict = field(default_factory=dict)
    exact: dict = None
    best_known: float = None

    def row(self, timing=True):
        iid = self.instance
        sa_obj = self.sa.get("score")
        out = {"n": iid.n, "P": f"{iid.capacity:g}", "adv": int(iid.adversarial),
               "idx": iid.index, "flow_feas": int(self.flow_pass),
               "sa_time": _fmt(self.sa.get("wall_time")) if timing else "",
               "sa_obj": _fmt(sa_obj),
               "sa_feasible": int(bool(self.sa.get("feasible"))),
               "init_obj": _fmt(self.sa.get("init_score")),
               "exact_time": "", "exact_obj": ""}
        if self.exact is not None:
            if timing:
                out["exact_time"] = _fmt(self.exact.get("wall_time"))
            out["exact_obj"] = _fmt(self.exact.get("objective"))
        if self.best_known is not None:
            out["best_known"] = _fmt(self.best_known)
        return out

    def to_dict(self):
        return {"instance": vars(self.instance), "flow_pass": self.flow_pass,
                "best_known": self.best_known, "sa": self.sa,
                "exact": self.exact}


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float) and not math.isfinite(v):
        return "inf"
    return f"{v:.6f}"


def sa_summary(res):
    """Reported SA outcome: best feasible solution if any, else best seen."""
    feasible = res.best_feasible_order is not None
    score = res.best_feasible_score if feasible else res.best_score
    return {"wall_time": res.wall_time, "score": score, "feasible": feasible,
            "init_score": res.initial_score, "iterations": res.iterations,
            "restarts": res.restarts}


def run_instance(inst, iid, sa_config=None, exact_max_jobs=None):
    """Flow check, greedy + SA, and optionally the enumeration oracle."""
    flow = check_feasibility(inst)
    cfg = sa_config or SAConfig.for_instance(inst.n)
    res = simulated_annealing(inst, implicit_precedences(inst), cfg,
                              greedy_initial_order(inst))
    rec = RunRecord(iid, flow.passes, sa_summary(res))
    if exact_max_jobs is not None and inst.n <= exact_max_jobs:
        ex = enumerate_exact(inst, max_jobs=exact_max_jobs)
        rec.exact = {"wall_time": ex.wall_time,
                     "objective": ex.objective
                     if ex.status is ExactStatus.OPTIMAL else None,
                     "status": ex.status.value}
    return rec


def _job(args):
    return run_instance(*args)


def run_batch(items, sa_overrides=None, seed=0, exact_max_jobs=None,
              workers=None):
    """Run every ``(instance, InstanceId)`` in ``items``.

    Run ``k`` uses SA seed ``seed + k``, so results do not depend on the
    number of workers.
    """
    jobs = []
    for k, (inst, iid) in enumerate(items):
        cfg = SAConfig.for_instance(inst.n, seed=seed + k,
                                    **(sa_overrides or {}))
        jobs.append((inst, iid, cfg, exact_max_jobs))
    workers = workers or os.cpu_count() or 1
    if workers == 1 or len(jobs) <= 1:
        return [_job(a) for a in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_job, jobs))


def read_reference(path):
    """Best-known values keyed by ``(n, P, adv, idx)``."""
    ref = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (int(row["n"]), float(row["P"]), int(row["adv"]),
                   int(row["idx"]))
            ref[key] = float(row["best_known"])
    return ref


def write_csv(records, fh, timing=True):
    cols = list(CSV_COLUMNS)
    if any(r.best_known is not None for r in records):
        cols.append("best_known")
    w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n", restval="")
    w.writeheader()
    for r in records:
        w.writerow(r.row(timing))
