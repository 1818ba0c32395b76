"""Acceptance gate: one test per criterion, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py -v`` for a pass/fail line per criterion
in the terminal summary, or ``python3 tests/test_acceptance.py``.
"""

import itertools
import time

import numpy as np
import pytest

from helpers import criterion, random_net, random_thresholds
from mmpassive.bounds import bound_report, theorem1_check
from mmpassive.certify import check_paths
from mmpassive.experiments import run_montecarlo
from mmpassive.lp.builders import approximate_capacity, passive_capacity, solve_p1
from mmpassive.network import ThresholdMap, example_network, generate_random
from mmpassive.paths import count_edge_disjoint, count_vertex_disjoint
from mmpassive.scheduler import achieved_rate, schedule_from_activations, vertex_disjoint_schedule
from mmpassive.security import passive_to_secure, worst_case_leak

MC_ARGS = dict(n_relays=10, trials=1000, theta=0.2, cap_mean=1.0, cap_var=0.1,
               topology="layered", seed=2024)


@criterion(1, "worked example: C_bar=2, C=1.2, three bounds 0.4")
def test_c01_worked_example():
    start = time.perf_counter()
    net = example_network(2.0)
    thr = ThresholdMap.uniform(net, 0.2)
    rep = bound_report(net, thr)
    elapsed = time.perf_counter() - start
    assert abs(rep.c_bar - 2.0) <= 1e-6
    assert abs(rep.lp_value - 1.2) <= 1e-6
    for value in (rep.naive, rep.activation_ratio, rep.per_path):
        assert abs(value - 0.4) <= 1e-6
    assert elapsed < 1.0
    return f"({elapsed * 1e3:.0f} ms)"


@criterion(2, "unit example: H_e=5, C=1, secure rate 1-0.2K")
def test_c02_unit_example():
    net = example_network(1.0)
    thr = ThresholdMap.uniform(net, 0.2)
    assert count_edge_disjoint(net).count == 5
    con = passive_capacity(net, thr)
    assert abs(con.rate - 1.0) <= 1e-6
    for k in range(4):
        assert abs(passive_to_secure(net, thr, k, passive=con).rate - (1 - 0.2 * k)) <= 1e-6


@criterion(3, "path LP equals edge LP on 50 random networks")
def test_c03_formulations_agree():
    start = time.perf_counter()
    worst = 0.0
    for seed in range(50):
        rng = np.random.default_rng(10_000 + seed)
        net = random_net(rng, int(rng.integers(1, 7)), p=float(rng.uniform(0.3, 0.8)),
                         cyclic=bool(seed % 2))
        thr = random_thresholds(rng, net)
        for t in (None, thr):
            p1 = solve_p1(net, t).rate
            p2 = approximate_capacity(net).rate if t is None else passive_capacity(net, t).rate
            worst = max(worst, abs(p1 - p2))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-6
    assert elapsed < 30
    return f"(max gap {worst:.1e}, {elapsed:.1f} s)"


@criterion(4, "bound chain on 200 draws with certified certificates")
def test_c04_bound_chain():
    for seed in range(200):
        rng = np.random.default_rng(20_000 + seed)
        net = random_net(rng, int(rng.integers(1, 7)), p=float(rng.uniform(0.3, 0.8)),
                         cyclic=bool(seed % 3 == 0))
        thr = random_thresholds(rng, net, lo=0.0)
        rep = bound_report(net, thr)
        assert rep.naive <= rep.activation_ratio + 1e-9
        assert rep.activation_ratio <= rep.per_path + 1e-9
        assert rep.per_path <= rep.lp_value + 1e-9
        for cert in rep.certificates.values():
            assert check_paths(net, cert, thr) == []


@criterion(5, "path-count verdict iff LP reaches theta_c*C_bar (M=1)")
def test_c05_path_count_iff():
    cases = 0
    for seed in range(100):
        rng = np.random.default_rng(30_000 + seed)
        net = random_net(rng, int(rng.integers(1, 8)), p=float(rng.uniform(0.2, 0.7)), unit=True,
                         cyclic=bool(seed % 2))
        c_bar = approximate_capacity(net).rate
        for theta in (0.1, 0.2, 0.25):
            lp = passive_capacity(net, ThresholdMap.uniform(net, theta)).rate
            for theta_c in (0.5, 1.0):
                verdict = theorem1_check(net, theta, theta_c, 1)
                assert verdict.achievable == (lp >= theta_c * c_bar - 1e-9), (seed, theta, theta_c)
                cases += 1
    return f"({cases} cases)"


@criterion(6, "multi-beam construction on parallel paths")
def test_c06_multi_beam_construction():
    for h, m, theta_c in itertools.product(range(2, 7), range(2, 5), (0.5, 1.0)):
        net = generate_random(2 * h, f"parallel-paths({h})", 1.0, 0.0, m_beams=m)
        cert = count_vertex_disjoint(net)
        assert cert.count == h
        s = vertex_disjoint_schedule(cert, m, theta_c)
        target = theta_c * min(m, h)
        assert abs(achieved_rate(s, net) - target) <= 1e-9
        assert abs(s.rate - target) <= 1e-9
        for state, _ in s.states:
            assert state.problems(net, m) == []
        assert abs(m * s.state_duration - s.gamma) <= 1e-12
        assert abs(len(s) * s.state_duration - theta_c) <= 1e-12
        tx, rx = s.node_usage()
        for v in range(1, net.destination):
            assert abs(tx[v] - s.gamma) <= 1e-12 and abs(rx[v] - s.gamma) <= 1e-12


@criterion(7, "activation maps of 100 LP optima replay from their schedules")
def test_c07_schedule_reconstruction():
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(40_000 + seed)
        net = random_net(rng, int(rng.integers(1, 8)), p=float(rng.uniform(0.3, 0.9)),
                         cyclic=bool(seed % 2))
        sol = passive_capacity(net, random_thresholds(rng, net)) if seed % 3 else approximate_capacity(net)
        sched = schedule_from_activations(net, sol.activations)
        realized = sched.link_activations()
        for key, lam in sol.activations.items():
            worst = max(worst, abs(realized.get(key, 0.0) - lam))
        assert len(sched) <= len(sol.active_links(1e-9)) + 1
        for state, _ in sched.states:
            assert state.problems(net, 1) == []
    assert worst <= 1e-7
    return f"(max error {worst:.1e})"


@criterion(8, "top-K threshold sum equals exhaustive K-subset search")
def test_c08_top_k():
    for seed in range(60):
        rng = np.random.default_rng(50_000 + seed)
        net = random_net(rng, int(rng.integers(1, 5)), p=0.5, unit=True)
        keys = net.link_keys()
        assert len(keys) <= 12
        thr = ThresholdMap({k: float(rng.choice([0.1, 0.2, 0.25, rng.uniform()])) for k in keys})
        for k in (1, 2, 3):
            if k > len(keys):
                continue
            brute = max(sum(thr[e] for e in c) for c in itertools.combinations(keys, k))
            assert abs(worst_case_leak(thr, k) - brute) <= 1e-12


_mc_csv: list[str] = []


@criterion(9, "Monte-Carlo shape, 1000 trials each")
def test_c09_montecarlo_shape():
    start = time.perf_counter()
    res = run_montecarlo(**MC_ARGS)
    assert count_edge_disjoint(res.topology).count >= 5
    for r in res.records:
        assert 0.2 - 1e-9 <= r.ratio <= 1.0 + 1e-9
    _mc_csv.append(res.to_csv())
    flat = run_montecarlo(10, 1000, 0.2, 1.0, 0.0, "parallel-paths(5)", seed=2024)
    for r in flat.records:
        assert abs(r.ratio - 1.0) <= 1e-9
        assert r.active_edge_disjoint == 5
    elapsed = time.perf_counter() - start
    assert elapsed < 300
    s = res.summary()
    return f"(mean ratio {s['mean_ratio']:.3f}, {elapsed:.0f} s)"


@criterion(10, "same seed gives a byte-identical CSV")
def test_c10_determinism():
    first = _mc_csv[0] if _mc_csv else run_montecarlo(**MC_ARGS).to_csv()
    second = run_montecarlo(**MC_ARGS).to_csv()
    assert first.encode() == second.encode()


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
