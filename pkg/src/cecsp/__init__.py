"""Scheduling jobs on a continuous, shared resource.

Hybrid local search (simulated annealing over event orders, each order
scored by a linear program), an exact MILP model, a max-flow feasibility
screen and a random instance generator.
"""
from .core import (Job, Instance, EventOrder, PrecedenceSet, Schedule,
                   ValidationReport, start_event, completion_event, job_of,
                   implicit_precedences, validate_schedule,
                   piecewise_constant_average)
from .evaluator import (PenaltyWeights, Evaluator, build_schedule_lp,
                        solve_schedule_lp, score_order)
from .exact import (build_milp, export_milp, enumerate_exact, ExactResult,
                    ExactStatus)
from .feasibility import build_network, check_feasibility
from .generator import GenConfig, generate_instance
from .search import (SAConfig, RestartConfig, SearchResult,
                     greedy_initial_order, op_swap_adjacent, op_move_single,
                     op_move_pair, simulated_annealing)
from .io import load_instance, save_instance, load_schedule, save_schedule

__version__ = "0.1.0"


def three_job_instance():
    """The three-job example instance with ``P = 50``."""
    return Instance(50.0, [
        Job(70.0, 0.0, 3.0, 10.0, 30.0, 1.0, 0.0),
        Job(20.0, 1.5, 3.0, 10.0, 40.0, 3.5, 0.0),
        Job(45.0, 2.5, 4.0, 10.0, 50.0, 5.0, 0.0),
    ])
