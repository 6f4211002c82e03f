"""JSON file formats for instances and schedules."""
import json
import math

import numpy as np

from .core import Job, Instance, EventOrder, Schedule

FORMAT_VERSION = 1


class FormatError(ValueError):
    """A file does not follow the expected JSON layout."""


def instance_to_dict(inst):
    return {"version": FORMAT_VERSION, "capacity": inst.capacity,
            "jobs": [{"E": jb.e_total, "r": jb.release,
                      "deadline": jb.deadline, "p_min": jb.p_min,
                      "p_max": jb.p_max, "w": jb.weight, "B": jb.offset}
                     for jb in inst.jobs]}


def instance_from_dict(d):
    try:
        if d.get("version", FORMAT_VERSION) != FORMAT_VERSION:
            raise FormatError(f"unsupported instance version {d['version']}")
        jobs = [Job(e_total=float(j["E"]), release=float(j["r"]),
                    deadline=float(j["deadline"]), p_min=float(j["p_min"]),
                    p_max=float(j["p_max"]), weight=float(j.get("w", 1.0)),
                    offset=float(j.get("B", 0.0)))
                for j in d["jobs"]]
        return Instance(float(d["capacity"]), jobs)
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"malformed instance: {exc!r}") from exc


def dumps_instance(inst):
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def save_instance(inst, path):
    with open(path, "w") as fh:
        fh.write(dumps_instance(inst))


def load_instance(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from exc
    return instance_from_dict(d)


def instance_filename(n, capacity, adversarial, index):
    return f"cecsp_n{n}_P{capacity:g}_adv{int(bool(adversarial))}_{index}.json"


def _finite(x):
    return None if x is None or not math.isfinite(x) else float(x)


def schedule_to_dict(sched, inst=None, extra=None):
    """Serialize a schedule.

    Event times are listed for events ``1..2n`` in id order; consumption
    and slack entries are keyed by job and opening event.
    """
    d = {"version": FORMAT_VERSION,
         "order": list(sched.order.sequence),
         "times": [float(v) for v in np.asarray(sched.times)[1:]],
         "consumption": [{"job": j, "event": i, "amount": float(v)}
                         for (j, i), v in sorted(sched.consumption.items())],
         "slack_lower": [{"job": j, "event": i, "amount": float(v)}
                         for (j, i), v in sorted(sched.slack_lower.items())],
         "slack_upper": [{"job": j, "event": i, "amount": float(v)}
                         for (j, i), v in sorted(sched.slack_upper.items())],
         "slack_capacity": [{"event": i, "amount": float(v)}
                            for i, v in sorted(sched.slack_capacity.items())],
         "score": _finite(sched.score)}
    if inst is not None:
        d["objective"] = float(sched.objective(inst))
    if extra:
        d.update(extra)
    return d


def schedule_from_dict(d):
    try:
        order = EventOrder(d["order"])
        times = np.concatenate([[0.0], np.asarray(d["times"], dtype=float)])
        if times.shape[0] != len(order) + 1:
            raise FormatError("times and order have different lengths")
        cons = {(int(c["job"]), int(c["event"])): float(c["amount"])
                for c in d["consumption"]}
        s_lo = {(int(c["job"]), int(c["event"])): float(c["amount"])
                for c in d.get("slack_lower", [])}
        s_hi = {(int(c["job"]), int(c["event"])): float(c["amount"])
                for c in d.get("slack_upper", [])}
        s_cap = {int(c["event"]): float(c["amount"])
                 for c in d.get("slack_capacity", [])}
        score = d.get("score")
        return Schedule(order=order, times=times, consumption=cons,
                        slack_lower=s_lo, slack_upper=s_hi,
                        slack_capacity=s_cap,
                        score=math.inf if score is None else float(score))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed schedule: {exc!r}") from exc


def save_schedule(sched, path, inst=None, extra=None):
    with open(path, "w") as fh:
        json.dump(schedule_to_dict(sched, inst, extra), fh, indent=2)
        fh.write("\n")


def load_schedule(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from exc
    return schedule_from_dict(d)
