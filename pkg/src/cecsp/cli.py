"""Command-line interface to the cecsp scheduling toolkit.

Exit codes:

    0  success (for ``check``/``validate``: the instance/schedule passed)
    1  ``check`` or ``validate`` found the instance/schedule infeasible
    2  bad command-line usage
    3  input file not found
    4  malformed input file
    5  conflicting or invalid flags
    6  solver failure

Output files default to the directory in ``$CECSP_OUTPUT_DIR`` (or the
current directory).
"""
import argparse
import glob
import json
import logging
import os
import re
import sys
import time

from . import io
from .batch import (InstanceId, RunRecord, run_batch, read_reference,
                    write_csv, sa_summary)
from .core import implicit_precedences, validate_schedule, EventOrder, DEFAULT_TOL
from .evaluator import PenaltyWeights, build_schedule_lp
from .exact import (enumerate_exact, build_milp, export_milp, ExactStatus,
                    MAX_ENUM_JOBS)
from .feasibility import check_feasibility
from .generator import GenConfig, generate_instance
from .gantt import save_svg
from .lp import SolverError, write_lp
from .search import SAConfig, RestartConfig, simulated_annealing, greedy_initial_order

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE = 0, 1, 2
EXIT_MISSING, EXIT_MALFORMED, EXIT_CONFLICT, EXIT_SOLVER = 3, 4, 5, 6
OUTPUT_ENV = "CECSP_OUTPUT_DIR"

log = logging.getLogger("cecsp")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def output_dir():
    return os.environ.get(OUTPUT_ENV, ".")


def _out_path(path, default_name):
    if path:
        return path
    d = output_dir()
    os.makedirs(d, exist_ok=True)
    return os.path.join(d, default_name)


def _load_instance(path):
    if not os.path.exists(path):
        raise CliError(f"instance file not found: {path}", EXIT_MISSING)
    try:
        return io.load_instance(path)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}", EXIT_MALFORMED)


def _stem(path):
    return os.path.splitext(os.path.basename(path))[0]


_ID_RE = re.compile(r"n(\d+)_P([0-9.]+)_adv([01])_(\d+)")


def instance_id(path, inst, fallback_index=0):
    m = _ID_RE.search(os.path.basename(path))
    if m:
        return InstanceId(int(m.group(1)), float(m.group(2)),
                          bool(int(m.group(3))), int(m.group(4)))
    return InstanceId(inst.n, inst.capacity, False, fallback_index)


# -- subcommands -------------------------------------------------------------

def cmd_generate(args):
    if args.count < 1:
        raise CliError("--count must be positive", EXIT_CONFLICT)
    out = args.out or output_dir()
    os.makedirs(out, exist_ok=True)
    written = []
    for k in range(args.count):
        idx = args.index_start + k
        kw = {name: getattr(args, name) for name in
              ("a_maxlow", "a_minupp", "a_rshift", "a_pws")
              if getattr(args, name) is not None}
        try:
            cfg = GenConfig.preset(args.n, args.P, args.adversarial,
                                   seed=args.seed + k,
                                   with_offsets=args.with_offsets, **kw)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_CONFLICT)
        notes = []
        inst = generate_instance(cfg, log_messages=notes)
        for msg in notes:
            log.info("%s", msg)
        path = os.path.join(out, io.instance_filename(args.n, args.P,
                                                      args.adversarial, idx))
        io.save_instance(inst, path)
        written.append(path)
        print(path)
    return EXIT_OK


def cmd_check(args):
    inst = _load_instance(args.instance)
    rep = check_feasibility(inst)
    if args.json:
        print(json.dumps(rep.to_dict(), indent=2))
    else:
        print(f"{'pass' if rep.passes else 'FAIL'}  max_flow={rep.max_flow_value:.6f}"
              f"  demand={rep.demand:.6f}")
        for j, v in sorted(rep.shortfall.items()):
            print(f"  job {j}: shortfall {v:.6f}")
    return EXIT_OK if rep.passes else EXIT_INFEASIBLE


def sa_config_from_args(args, n):
    cfg = {}
    if args.config:
        if not os.path.exists(args.config):
            raise CliError(f"config file not found: {args.config}", EXIT_MISSING)
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CliError(f"{args.config}: {exc}", EXIT_MALFORMED)
    base = SAConfig.for_instance(n).to_dict()
    base.update(cfg)
    flags = {"t_init": args.t_init, "alpha": args.alpha,
             "alpha_period": args.alpha_period, "max_iter": args.max_iter,
             "seed": args.seed, "time_limit": args.time_limit}
    base.update({k: v for k, v in flags.items() if v is not None})
    pen = dict(base["penalties"])
    if args.penalty_bound is not None:
        pen["bound"] = args.penalty_bound
    if args.penalty_capacity is not None:
        pen["capacity"] = args.penalty_capacity
    base["penalties"] = pen
    probs = list(base["op_probs"])
    for k, v in enumerate((args.p_swap, args.p_move, args.p_pair)):
        if v is not None:
            probs[k] = v
    base["op_probs"] = probs
    rs = dict(base["restart"])
    if args.restart:
        rs["enabled"] = True
    if args.restart_min_wall is not None:
        rs["min_wall_seconds"] = args.restart_min_wall
    if args.restart_swaps is not None:
        rs["n_random_swaps"] = args.restart_swaps
    base["restart"] = rs
    try:
        return SAConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid search settings: {exc}", EXIT_CONFLICT)


def cmd_solve(args):
    inst = _load_instance(args.instance)
    cfg = sa_config_from_args(args, inst.n)
    prec = implicit_precedences(inst)
    try:
        res = simulated_annealing(inst, prec, cfg, greedy_initial_order(inst))
    except SolverError as exc:
        raise CliError(str(exc), EXIT_SOLVER)
    feasible = res.best_feasible_order is not None
    sched = res.best_feasible_schedule if feasible else res.best_schedule
    summary = sa_summary(res)
    stem = _stem(args.instance)
    if sched is not None:
        path = _out_path(args.out, f"{stem}.schedule.json")
        io.save_schedule(sched, path, inst, {"feasible": feasible})
        print(f"schedule: {path}")
    rec = RunRecord(instance_id(args.instance, inst),
                    check_feasibility(inst).passes, summary)
    if args.record:
        with open(args.record, "w") as fh:
            json.dump(rec.to_dict(), fh, indent=2)
            fh.write("\n")
    if args.gantt and sched is not None:
        save_svg(inst, sched, args.gantt, title=stem)
    status = "feasible" if feasible else "infeasible (slack used)"
    print(f"score={summary['score']:.6f}  init={summary['init_score']:.6f}  "
          f"{status}  iterations={res.iterations}  time={res.wall_time:.2f}s")
    return EXIT_OK


def cmd_exact(args):
    inst = _load_instance(args.instance)
    if inst.n > args.max_jobs or args.export_only:
        path = args.export or _out_path(None, f"{_stem(args.instance)}.lp")
        export_milp(build_milp(inst), path)
        if args.export_only:
            print(f"MILP written to {path}")
        else:
            print(f"n={inst.n} > {args.max_jobs}: MILP written to {path}")
        return EXIT_OK
    try:
        res = enumerate_exact(inst, max_jobs=args.max_jobs)
    except SolverError as exc:
        raise CliError(str(exc), EXIT_SOLVER)
    if args.export:
        export_milp(build_milp(inst), args.export)
    if res.status is ExactStatus.OPTIMAL:
        path = _out_path(args.out, f"{_stem(args.instance)}.exact.json")
        io.save_schedule(res.schedule, path, inst, {"feasible": True})
        print(f"schedule: {path}")
        print(f"optimal objective={res.objective:.6f}  orders={res.explored}  "
              f"time={res.wall_time:.2f}s")
    else:
        print(f"infeasible  orders={res.explored}  time={res.wall_time:.2f}s")
    if args.record:
        with open(args.record, "w") as fh:
            json.dump({"status": res.status.value,
                       "objective": res.objective
                       if res.status is ExactStatus.OPTIMAL else None,
                       "wall_time": res.wall_time, "explored": res.explored},
                      fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def _parse_order(text):
    try:
        return EventOrder(int(v) for v in re.split(r"[,\s]+", text.strip()) if v)
    except ValueError as exc:
        raise CliError(f"bad --order: {exc}", EXIT_CONFLICT)


def cmd_export(args):
    inst = _load_instance(args.instance)
    if args.order and args.no_valid_inequalities:
        raise CliError("--no-valid-inequalities applies to the MILP only",
                       EXIT_CONFLICT)
    if args.order:
        order = _parse_order(args.order)
        if order.n != inst.n:
            raise CliError("--order has the wrong number of events", EXIT_CONFLICT)
        weights = None if args.slack_free else PenaltyWeights(
            args.penalty_bound, args.penalty_capacity)
        model = build_schedule_lp(inst, order, weights)
        path = _out_path(args.out, f"{_stem(args.instance)}.schedule.lp")
        with open(path, "w") as fh:
            write_lp(model, fh)
    else:
        model = build_milp(inst, valid_inequalities=not args.no_valid_inequalities)
        path = _out_path(args.out, f"{_stem(args.instance)}.lp")
        export_milp(model, path)
    print(f"{path}: {model.n_cols} columns, {model.n_rows} rows")
    return EXIT_OK


def cmd_validate(args):
    inst = _load_instance(args.instance)
    if not os.path.exists(args.schedule):
        raise CliError(f"schedule file not found: {args.schedule}", EXIT_MISSING)
    try:
        sched = io.load_schedule(args.schedule)
        rep = validate_schedule(inst, sched.order, sched, args.tol)
    except ValueError as exc:
        raise CliError(f"{args.schedule}: {exc}", EXIT_MALFORMED)
    print("feasible" if rep.is_feasible else "INFEASIBLE")
    if not rep.is_feasible:
        print(rep.summary())
    print(f"objective={sched.objective(inst):.6f}")
    return EXIT_OK if rep.is_feasible else EXIT_INFEASIBLE


def cmd_batch(args):
    generated = args.n is not None
    if generated == bool(args.instances):
        raise CliError("give either --instances or --n/--P (not both)",
                       EXIT_CONFLICT)
    items = []
    if args.instances:
        if not os.path.isdir(args.instances):
            raise CliError(f"not a directory: {args.instances}", EXIT_MISSING)
        paths = sorted(glob.glob(os.path.join(args.instances, "*.json")))
        for k, path in enumerate(paths):
            inst = _load_instance(path)
            items.append((inst, instance_id(path, inst, k)))
    else:
        if args.P is None:
            raise CliError("--n needs --P", EXIT_CONFLICT)
        for k in range(args.count):
            cfg = GenConfig.preset(args.n, args.P, args.adversarial,
                                   seed=args.gen_seed + k)
            items.append((generate_instance(cfg),
                          InstanceId(args.n, args.P, args.adversarial, k)))
    overrides = {}
    if args.max_iter is not None:
        overrides["max_iter"] = args.max_iter
    if args.time_limit is not None:
        overrides["time_limit"] = args.time_limit
    if args.restart:
        overrides["restart"] = RestartConfig(True, args.restart_min_wall, 100)
    t0 = time.monotonic()
    try:
        records = run_batch(items, overrides, seed=args.seed,
                            exact_max_jobs=args.exact_max_jobs,
                            workers=args.workers)
    except SolverError as exc:
        raise CliError(str(exc), EXIT_SOLVER)
    if args.reference:
        if not os.path.exists(args.reference):
            raise CliError(f"reference not found: {args.reference}", EXIT_MISSING)
        try:
            ref = read_reference(args.reference)
        except (KeyError, ValueError) as exc:
            raise CliError(f"{args.reference}: {exc}", EXIT_MALFORMED)
        for r in records:
            i = r.instance
            r.best_known = ref.get((i.n, float(i.capacity), int(i.adversarial),
                                    i.index))
    path = _out_path(args.out, "results.csv")
    with open(path, "w", newline="") as fh:
        write_csv(records, fh, timing=not args.no_timing)
    print(f"{len(records)} runs written to {path} "
          f"({time.monotonic() - t0:.1f}s)")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _add_sa_flags(p):
    g = p.add_argument_group("simulated annealing (defaults scale with n)")
    g.add_argument("--config", help="JSON file with SAConfig fields")
    g.add_argument("--seed", type=int)
    g.add_argument("--max-iter", type=int)
    g.add_argument("--t-init", type=float, help="default: n")
    g.add_argument("--alpha", type=float, help="default: 0.95")
    g.add_argument("--alpha-period", type=int, help="default: 4 (2n - 1)")
    g.add_argument("--penalty-bound", type=float, help="default: 5")
    g.add_argument("--penalty-capacity", type=float, help="default: 5")
    g.add_argument("--p-swap", type=float, help="default: 0.75")
    g.add_argument("--p-move", type=float, help="default: 0.15")
    g.add_argument("--p-pair", type=float, help="default: 0.1")
    g.add_argument("--restart", action="store_true",
                   help="restart after early termination")
    g.add_argument("--restart-min-wall", type=float, help="default: 1800 s")
    g.add_argument("--restart-swaps", type=int, help="default: 100")
    g.add_argument("--time-limit", type=float, help="wall-clock limit (s)")


def build_parser():
    ap = argparse.ArgumentParser(prog="cecsp", description=__doc__.split("\n")[0],
                                 formatter_class=argparse.RawDescriptionHelpFormatter,
                                 epilog=__doc__.split("\n", 2)[2])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate random instances")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--P", type=float, required=True)
    p.add_argument("--adversarial", action="store_true")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--index-start", type=int, default=0)
    p.add_argument("--a-maxlow", dest="a_maxlow", type=float)
    p.add_argument("--a-minupp", dest="a_minupp", type=float)
    p.add_argument("--a-rshift", dest="a_rshift", type=float)
    p.add_argument("--a-pws", dest="a_pws", type=float)
    p.add_argument("--with-offsets", action="store_true")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("check", help="max-flow feasibility screen")
    p.add_argument("instance")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="greedy start + simulated annealing")
    p.add_argument("instance")
    p.add_argument("--out", help="schedule file")
    p.add_argument("--record", help="write the run record (JSON)")
    p.add_argument("--gantt", help="write an SVG resource profile")
    _add_sa_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="enumeration oracle (small n) or MILP export")
    p.add_argument("instance")
    p.add_argument("--max-jobs", type=int, default=MAX_ENUM_JOBS)
    p.add_argument("--out", help="schedule file")
    p.add_argument("--export", help="also write the MILP to this .lp file")
    p.add_argument("--export-only", action="store_true")
    p.add_argument("--record", help="write the result (JSON)")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("export", help="write the MILP or a schedule LP")
    p.add_argument("instance")
    p.add_argument("--out")
    p.add_argument("--no-valid-inequalities", action="store_true")
    p.add_argument("--order", help="comma-separated event ids: dump the "
                                   "schedule LP of this order instead")
    p.add_argument("--slack-free", action="store_true")
    p.add_argument("--penalty-bound", type=float, default=5.0)
    p.add_argument("--penalty-capacity", type=float, default=5.0)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("validate", help="check a schedule file")
    p.add_argument("instance")
    p.add_argument("schedule")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("batch", help="run a suite and write a results CSV")
    p.add_argument("--instances", help="directory of instance files")
    p.add_argument("--n", type=int)
    p.add_argument("--P", type=float)
    p.add_argument("--adversarial", action="store_true")
    p.add_argument("--count", type=int, default=4)
    p.add_argument("--gen-seed", type=int, default=0)
    p.add_argument("--seed", type=int, default=0, help="base SA seed")
    p.add_argument("--max-iter", type=int)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--restart", action="store_true")
    p.add_argument("--restart-min-wall", type=float, default=1800.0)
    p.add_argument("--exact-max-jobs", type=int,
                   help="run the enumeration oracle when n <= this")
    p.add_argument("--workers", type=int, help="default: all cores")
    p.add_argument("--reference", help="CSV with a best_known column")
    p.add_argument("--no-timing", action="store_true",
                   help="leave time columns empty (reproducible output)")
    p.add_argument("--out", help="CSV path")
    p.set_defaults(func=cmd_batch)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
