import numpy as np
import pytest

from cecsp import GenConfig, generate_instance
from cecsp.generator import generate_suite, floor2, ceil2
from cecsp.io import dumps_instance


def two_decimals(x):
    return abs(round(x * 100) - x * 100) < 1e-6


@pytest.mark.parametrize("n", [3, 10, 30])
def test_supports(n):
    for seed in range(20):
        cfg = GenConfig.preset(n, 50.0, seed=seed)
        inst = generate_instance(cfg)
        total = sum(jb.e_total for jb in inst.jobs)
        scale = total / 50.0
        for jb in inst.jobs:
            assert 10 <= jb.e_total <= 100
            assert 0 <= jb.p_min <= min(0.25 * 50, 0.25 * jb.e_total) + 1e-9
            assert 0.25 * jb.e_total - 0.01 <= jb.p_max <= jb.e_total
            assert 0 <= jb.release <= (1 - 0.125) * scale + 0.01
            assert 0 <= jb.weight <= 5
            assert jb.offset == 0
            for v in (jb.e_total, jb.release, jb.deadline, jb.p_min,
                      jb.p_max, jb.weight):
                assert two_decimals(v)


def test_adversarial_weights_follow_deadlines():
    for seed in range(20):
        inst = generate_instance(GenConfig.preset(8, 50.0, True, seed=seed))
        pairs = sorted((jb.deadline, jb.weight) for jb in inst.jobs)
        weights = [w for _, w in pairs]
        assert weights == sorted(weights)


def test_adversarial_uses_same_weights():
    plain = generate_instance(GenConfig.preset(8, 50.0, False, seed=3))
    adv = generate_instance(GenConfig.preset(8, 50.0, True, seed=3))
    assert sorted(j.weight for j in plain.jobs) == sorted(
        j.weight for j in adv.jobs)


def test_seed_reproducible():
    a = generate_instance(GenConfig.preset(10, 50.0, seed=99))
    b = generate_instance(GenConfig.preset(10, 50.0, seed=99))
    c = generate_instance(GenConfig.preset(10, 50.0, seed=100))
    assert dumps_instance(a) == dumps_instance(b)
    assert dumps_instance(a) != dumps_instance(c)


def test_explicit_rng():
    cfg = GenConfig.preset(5, 50.0)
    a = generate_instance(cfg, rng=np.random.default_rng(1))
    b = generate_instance(cfg, rng=np.random.default_rng(1))
    assert a == b


def test_degenerate_window_logged():
    # a tiny a_pws makes the window bound shorter than the processing time
    cfg = GenConfig.preset(4, 50.0, seed=0, a_pws=0.01)
    notes = []
    inst = generate_instance(cfg, log_messages=notes)
    assert any("minimum processing time" in m for m in notes)
    for jb in inst.jobs:
        assert jb.deadline - jb.release >= jb.min_duration - 1e-9


def test_offsets():
    inst = generate_instance(GenConfig.preset(6, 50.0, seed=1,
                                              with_offsets=True))
    assert any(jb.offset > 0 for jb in inst.jobs)


def test_suite_seeds():
    suite = generate_suite(4, 50.0, False, 3, seed=10)
    assert suite[1] == generate_instance(GenConfig.preset(4, 50.0, seed=11))


def test_directed_rounding():
    assert floor2(1.239) == 1.23
    assert ceil2(1.231) == 1.24
    assert ceil2(1.23) == 1.23


@pytest.mark.parametrize("kw", [{"n": 0}, {"capacity": 0},
                                {"a_rshift": 1.0}, {"a_pws": 0}])
def test_invalid(kw):
    params = dict(n=3, capacity=50.0)
    params.update(kw)
    with pytest.raises(ValueError):
        GenConfig(**params)
