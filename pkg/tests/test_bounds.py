import numpy as np
import pytest

from helpers import lp_oracle, random_net, random_thresholds
from mmpassive.bounds import (
    Baseline,
    CapacityError,
    bound_activation_ratio,
    bound_naive,
    bound_per_path,
    bound_report,
    theorem1_check,
)
from mmpassive.certify import check_paths
from mmpassive.network import Network, ThresholdMap, example_network


def test_example_bounds():
    net = example_network()
    thr = ThresholdMap.uniform(net, 0.2)
    for f in (bound_naive, bound_activation_ratio, bound_per_path):
        assert f(net, thr) == pytest.approx(0.4, abs=1e-9)
    rep = bound_report(net, thr)
    assert rep.lp_value == pytest.approx(1.2, abs=1e-9)
    assert rep.c_bar == pytest.approx(2.0, abs=1e-9)
    assert rep.ordered()


def test_bounds_are_not_all_equal():
    # with uneven thresholds the per-path bound should beat the global scalings somewhere
    gaps = []
    for seed in range(40):
        rng = np.random.default_rng(800 + seed)
        net = random_net(rng, 5, p=0.6)
        rep = bound_report(net, random_thresholds(rng, net))
        gaps.append(rep.per_path - rep.activation_ratio)
        assert rep.naive <= rep.activation_ratio + 1e-9
    assert max(gaps) > 1e-3


def test_activation_ratio_uses_only_active_links():
    # the unused link's tiny threshold must not lower the ratio bound
    net = Network.build(2, {(0, 1): 1, (1, 3): 1, (0, 2): 0.0, (2, 3): 1})
    thr = ThresholdMap({(0, 1): 0.5, (1, 3): 0.5, (0, 2): 0.01, (2, 3): 0.01})
    assert bound_naive(net, thr) == pytest.approx(0.01)
    assert bound_activation_ratio(net, thr) == pytest.approx(0.5)


def test_disconnected_network_bounds_are_zero():
    net = Network.build(1, {(0, 1): 1.0})
    rep = bound_report(net, ThresholdMap.uniform(net, 0.5))
    assert (rep.naive, rep.activation_ratio, rep.per_path, rep.lp_value) == (0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("seed", range(40))
def test_bound_chain(seed):
    rng = np.random.default_rng(500 + seed)
    net = random_net(rng, int(rng.integers(1, 6)), p=0.6, cyclic=bool(seed % 2))
    thr = random_thresholds(rng, net)
    rep = bound_report(net, thr)
    assert rep.ordered(1e-9)
    for cert in rep.certificates.values():
        assert check_paths(net, cert, thr) == []
    assert rep.lp_value == pytest.approx(lp_oracle(net, thr), abs=1e-7)


def test_baseline_reuse():
    net = example_network()
    base = Baseline.of(net)
    thr = ThresholdMap.uniform(net, 0.5)
    assert bound_naive(net, thr, base) == pytest.approx(1.0)
    assert base.c_bar == pytest.approx(2.0)


def test_path_count_example():
    net = example_network(1.0)
    v = theorem1_check(net, 0.2, 1.0)
    assert (v.achievable, v.required, v.actual, v.c_bar) == (True, pytest.approx(5.0), 5, 1.0)
    assert v.schedule.rate == pytest.approx(1.0)
    v = theorem1_check(net, 0.1, 1.0)
    assert not v.achievable and v.required == pytest.approx(10.0) and v.schedule is None
    v = theorem1_check(net, ThresholdMap.uniform(net, 0.25), 0.5)
    assert v.achievable and v.schedule.rate == pytest.approx(0.5)


def test_path_count_multi_beam():
    net = Network(5, 3, example_network(1.0).links)
    v = theorem1_check(net, 0.6, 1.0)
    assert v.c_bar == 3.0 and v.required == pytest.approx(5.0) and v.achievable
    assert v.schedule.rate == pytest.approx(3.0)
    assert not theorem1_check(net, 0.5, 1.0).achievable


@pytest.mark.parametrize("seed", range(30))
def test_path_count_iff_single_beam(seed):
    rng = np.random.default_rng(600 + seed)
    net = random_net(rng, int(rng.integers(1, 7)), p=0.4, unit=True, cyclic=bool(seed % 2))
    c_bar = lp_oracle(net)
    for theta in (0.1, 0.2, 0.25):
        lp = lp_oracle(net, ThresholdMap.uniform(net, theta))
        for theta_c in (0.5, 1.0):
            v = theorem1_check(net, theta, theta_c)
            assert v.achievable == (lp >= theta_c * c_bar - 1e-9)


def test_path_count_needs_unit_capacity():
    with pytest.raises(CapacityError):
        theorem1_check(example_network(), 0.2, 1.0)
    with pytest.raises(ValueError):
        theorem1_check(example_network(1.0), 0.2, 1.5)
