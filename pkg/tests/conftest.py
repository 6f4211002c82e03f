import numpy as np
import pytest

from cecsp import three_job_instance, Job, Instance
from cecsp.generator import GenConfig, generate_instance

# optimum of the three-job example, frozen from the enumeration oracle and
# confirmed independently by solving the full MILP with HiGHS
EXAMPLE_OPTIMUM = 163 / 6
EXAMPLE_OPTIMAL_ORDER = (1, 3, 4, 5, 2, 6)


@pytest.fixture
def example():
    return three_job_instance()


@pytest.fixture
def single_job():
    return Instance(10.0, [Job(10.0, 0.0, 10.0, 0.0, 10.0, 1.0, 0.0)])


def random_instance(n, seed, capacity=50.0, adversarial=False):
    return generate_instance(GenConfig.preset(n, capacity, adversarial, seed=seed))


def random_order(n, rng):
    """Uniformly shuffled events, each job's pair put start-first."""
    seq = list(rng.permutation(np.arange(1, 2 * n + 1)))
    seen = set()
    out = []
    for i in seq:
        j = (int(i) + 1) // 2
        out.append(2 * j if j in seen else 2 * j - 1)
        seen.add(j)
    return out
