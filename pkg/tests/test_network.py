import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmpassive.errors import ParseError, ValidationError
from mmpassive.network import (
    Link,
    Network,
    Path,
    ThresholdMap,
    example_network,
    generate_random,
    load,
    load_thresholds,
    load_with_thresholds,
    parse_topology,
    resample_capacities,
    save,
    validate,
)
from mmpassive.paths import count_edge_disjoint


@st.composite
def networks(draw):
    n = draw(st.integers(0, 5))
    m = draw(st.integers(1, 3))
    dst = n + 1
    pairs = [(i, j) for i in range(dst) for j in range(1, dst + 1) if i != j]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=12)) if pairs else []
    links = []
    for tx, rx in chosen:
        cap = draw(st.floats(0, 10, allow_nan=False))
        theta = draw(st.none() | st.floats(0, 1))
        links.append(Link(tx, rx, cap, theta))
    return Network(n, m, tuple(links))


@given(networks())
def test_save_load_round_trip(net):
    assert validate(net) == []
    assert load(save(net)) == net


def test_node_numbering():
    net = Network(4)
    assert (net.source, net.destination, net.n_nodes) == (0, 5, 6)


@pytest.mark.parametrize(
    "links, fragment",
    [
        ([Link(1, 0, 1.0)], "link into source"),
        ([Link(0, 1, -1.0)], "negative capacity"),
        ([Link(0, 1, 1.0), Link(0, 1, 2.0)], "duplicate link"),
        ([Link(1, 1, 1.0)], "self-loop"),
        ([Link(3, 1, 1.0)], "link out of destination"),
        ([Link(0, 9, 1.0)], "outside"),
        ([Link(0, 1, 1.0, 1.5)], "threshold"),
        ([Link(0, 1, math.inf)], "non-finite"),
    ],
)
def test_validation_rejects(links, fragment):
    problems = validate(Network(2, 1, tuple(links)))
    assert any(fragment in p for p in problems), problems


def test_validation_reports_all_problems():
    problems = validate(Network(2, 1, (Link(1, 0, 1.0), Link(0, 1, -1.0))))
    assert len(problems) == 2


def test_load_raises_validation_error():
    doc = {"n_relays": 1, "m_beams": 1, "links": [{"tx": 2, "rx": 1, "cap": 1}]}
    with pytest.raises(ValidationError, match="out of destination"):
        load(json.dumps(doc))


@pytest.mark.parametrize(
    "text, location",
    [
        ('{"n_relays": 1,\n "m_beams": }', "line 2"),
        ('{"m_beams": 1, "links": []}', "$"),
        ('{"n_relays": 1, "m_beams": 1, "links": [{"tx": 0, "rx": 1}]}', "links[0]"),
        ('{"n_relays": 1, "m_beams": 1, "links": [{"tx": 0, "rx": 1, "cap": "a"}]}', "links[0]"),
        ('{"n_relays": 1.5, "m_beams": 1, "links": []}', "$"),
    ],
)
def test_parse_errors_carry_location(text, location):
    with pytest.raises(ParseError) as info:
        load(text)
    assert location in str(info.value)


def test_absent_theta_uses_default():
    net = Network(1, 1, (Link(0, 1, 1.0, 0.3), Link(1, 2, 1.0)))
    loaded, thr = load_with_thresholds(save(net), 0.7)
    assert thr[(0, 1)] == 0.3 and thr[(1, 2)] == 0.7
    assert json.loads(save(net))["links"][1]["theta"] is None


def test_threshold_file():
    net = example_network()
    doc = {"default": 0.4, "links": [{"tx": 0, "rx": 1, "theta": 0.1}]}
    thr = load_thresholds(json.dumps(doc), net)
    assert thr[(0, 1)] == 0.1 and thr[(0, 2)] == 0.4 and len(thr) == 10
    with pytest.raises(ParseError):
        load_thresholds('{"links": [{"tx": 1, "rx": 2, "theta": 0.1}]}', net)
    with pytest.raises(ValidationError):
        load_thresholds('{"default": 2}', net)


def test_path_capacity_is_bottleneck():
    net = Network.build(2, {(0, 1): 3.0, (1, 2): 0.5, (2, 3): 2.0})
    p = Path.on(net, (0, 1, 2, 3))
    assert p.capacity == 0.5
    assert p.links == ((0, 1), (1, 2), (2, 3)) and p.relays == (1, 2)
    for bad in [(0, 2, 3), (1, 2, 3), (0, 1, 2, 1, 2, 3)]:
        with pytest.raises(ValueError):
            Path.on(net, bad)


def test_example_network_shape():
    net = example_network()
    assert len(net.links) == 10
    assert net.capacity[(0, 1)] == 2.0 and net.capacity[(2, 6)] == 1.0
    assert example_network(1.0).is_unit_capacity()


def test_threshold_map_helpers():
    net = example_network()
    thr = ThresholdMap.uniform(net, 0.2)
    assert thr.min() == 0.2 and thr.problems(net) == []
    thr2 = thr.replaced((0, 1), 0.05)
    assert thr2.min() == 0.05 and thr.min() == 0.2
    assert ThresholdMap({}).problems(net)


def test_generation_is_deterministic():
    a = generate_random(10, "layered", 1.0, 0.1, seed=4)
    b = generate_random(10, "layered", 1.0, 0.1, seed=4)
    c = generate_random(10, "layered", 1.0, 0.1, seed=5)
    assert save(a) == save(b) and save(a) != save(c)
    assert validate(a) == []


@pytest.mark.parametrize("seed", range(10))
def test_layered_has_five_disjoint_paths(seed):
    net = generate_random(10, "layered", seed=seed)
    assert count_edge_disjoint(net).count >= 5


def test_topologies():
    dag = generate_random(3, "complete-dag", 1.0, 0.0)
    assert len(dag.links) == 10 and dag.is_unit_capacity()
    par = generate_random(10, "parallel-paths(5)", 1.0, 0.0)
    assert len(par.links) == 15 and count_edge_disjoint(par).count == 5
    layered = generate_random(12, "layered(layers=3,p=0,fanout=2)", seed=1)
    assert sum(1 for l in layered.links if l.tx == 0) == 2
    assert str(parse_topology("layered(layers=2, p=0.5)")) == "layered(layers=2,p=0.5)"
    for bad in ["ring", "parallel-paths(0)", "layered(q=1)", "parallel-paths"]:
        with pytest.raises(ValueError):
            parse_topology(bad)
    with pytest.raises(ValueError):
        generate_random(3, "parallel-paths(5)")


def test_resample_keeps_topology():
    net = generate_random(10, seed=2)
    again = resample_capacities(net, 1.0, 0.1, seed=99)
    assert net.link_keys() == again.link_keys()
    assert [l.cap for l in net.links] != [l.cap for l in again.links]
    assert all(l.cap >= 0 for l in resample_capacities(net, 0.0, 4.0, seed=1).links)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_capacities_are_gaussian_clamped(seed):
    net = generate_random(10, "complete-dag", 1.0, 0.1, seed=seed)
    caps = np.array([l.cap for l in net.links])
    assert (caps >= 0).all()
    assert abs(caps.mean() - 1.0) < 0.5
