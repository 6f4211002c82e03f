"""Random instance generation.

All requirements ``E_j`` are drawn first because the release-time and
deadline distributions scale with their sum. Every value is rounded to
two decimals; rounding is directed where it could otherwise break a job
invariant (lower bounds down, upper bounds and deadlines up).
"""
from dataclasses import dataclass, asdict
import logging
import math

import numpy as np

from .core import Job, Instance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenConfig:
    n: int
    capacity: float
    adversarial: bool = False
    a_maxlow: float = 0.25
    a_minupp: float = 0.25
    a_rshift: float = 0.125
    a_pws: float = 2.0
    seed: int = None
    with_offsets: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not self.capacity > 0:
            raise ValueError("capacity must be positive")
        if not (0 < self.a_maxlow <= 1 and 0 < self.a_minupp <= 1):
            raise ValueError("a_maxlow and a_minupp must lie in (0, 1]")
        if not 0 <= self.a_rshift < 1:
            raise ValueError("a_rshift must lie in [0, 1)")
        if not self.a_pws > 0:
            raise ValueError("a_pws must be positive")

    @classmethod
    def preset(cls, n, capacity, adversarial=False, seed=None, **kw):
        """Scaling parameters tuned per instance size (P = 50)."""
        a_pws = 2.0 if n <= 10 else 1.5
        params = dict(a_maxlow=0.25, a_minupp=0.25, a_rshift=0.125, a_pws=a_pws)
        params.update(kw)
        return cls(n=n, capacity=capacity, adversarial=adversarial, seed=seed,
                   **params)

    def to_dict(self):
        return asdict(self)


def round2(x):
    return round(float(x), 2)


def floor2(x):
    return math.floor(round(float(x) * 100, 6)) / 100


def ceil2(x):
    return math.ceil(round(float(x) * 100, 6)) / 100


def generate_instance(config, rng=None, log_messages=None):
    """Draw one random instance.

    Parameters
    ----------
    config : GenConfig
    rng : numpy.random.Generator, optional
        Defaults to ``default_rng(config.seed)``.
    log_messages : list, optional
        Repairs made during generation are appended here as strings.

    Returns
    -------
    Instance
    """
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    notes = log_messages if log_messages is not None else []
    n, cap = config.n, float(config.capacity)

    e = [round2(v) for v in rng.uniform(10, 100, size=n)]
    scale = sum(e) / cap
    rows = []
    for j in range(n):
        ej = e[j]
        p_min = floor2(rng.uniform(0, min(config.a_maxlow * cap,
                                          config.a_minupp * ej)))
        p_max = min(ceil2(rng.uniform(config.a_minupp * ej, ej)), ej)
        if p_min > p_max:
            p_min = p_max
        r = rng.uniform(-config.a_rshift * scale, (1 - config.a_rshift) * scale)
        r = round2(max(0.0, r))
        shortest = ej / min(cap, p_max)
        longest = config.a_pws * scale
        if longest < shortest:
            span = shortest
            # keep the stream aligned with the non-degenerate case
            rng.uniform(0, 1)
            notes.append(f"job {j + 1}: window upper bound {longest:.4g} below "
                         f"minimum processing time {shortest:.4g}; using the "
                         "minimum")
        else:
            span = rng.uniform(shortest, longest)
        d = round2(r + span)
        if d < r + shortest:
            d = ceil2(r + shortest)
            if d < r + shortest:
                d = round2(d + 0.01)
            notes.append(f"job {j + 1}: deadline rounded up to {d}")
        w = round2(rng.uniform(0, 5))
        b = round2(rng.uniform(0, 10)) if config.with_offsets else 0.0
        rows.append([ej, r, d, p_min, p_max, w, b])

    if config.adversarial:
        weights = sorted(row[5] for row in rows)
        rank = sorted(range(n), key=lambda k: (rows[k][2], k))
        for w, k in zip(weights, rank):
            rows[k][5] = w

    for msg in notes:
        log.debug(msg)
    jobs = [Job(e_total=ej, release=r, deadline=d, p_min=lo, p_max=hi,
                weight=w, offset=b) for ej, r, d, lo, hi, w, b in rows]
    return Instance(cap, jobs)


def generate_suite(n, capacity, adversarial, count, seed=0, **kw):
    """``count`` preset instances; instance ``k`` uses seed ``seed + k``."""
    return [generate_instance(GenConfig.preset(n, capacity, adversarial,
                                               seed=seed + k, **kw))
            for k in range(count)]
