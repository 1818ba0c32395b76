"""Path-based and edge-based scheduling LPs for single-beam (M = 1) networks.

Edge-based form: per link a flow ``F`` and an activation time ``lam``, with
``F <= lam * cap``, flow conservation at relays, and total transmit and
receive activation at most one per node.  An optional threshold caps each
``lam``.  The path-based form weights every simple path by its time share
``x_p``; with thresholds it adds ``sum_{p through link} x_p C_p / cap <= theta``
per link, which is exactly the edge-based activation of that link.

Zero-capacity links never appear as columns.
"""

from __future__ import annotations

from ..errors import PathOverflowError, SolverError
from ..network import Network, Path, ThresholdMap
from ..paths import DEFAULT_PATH_LIMIT, PathSet, enumerate_paths
from ..solutions import P1Solution, P2Solution
from .problem import EQ, LE, OPTIMAL, LpBuilder, LpProblem, LpSolution
from .simplex import solve

FLOW, ACT, PATH = "F", "lam", "x"


class BeamCountError(ValueError):
    pass


def _require_single_beam(net: Network) -> None:
    if net.m_beams != 1:
        raise BeamCountError(f"P2 is defined for M=1 (network has M={net.m_beams})")


def build_p2(net: Network, thresholds: ThresholdMap | None = None) -> LpProblem:
    _require_single_beam(net)
    lp = LpBuilder()
    dst = net.destination
    live = [l for l in net.links if l.cap > 0]
    for l in live:
        theta = 1.0 if thresholds is None else thresholds[l.key]
        lp.var((FLOW, l.tx, l.rx), obj=1.0 if l.rx == dst else 0.0)
        lp.var((ACT, l.tx, l.rx), hi=theta if thresholds is not None else float("inf"))
    for l in live:
        lp.row(
            {lp.index((FLOW, l.tx, l.rx)): 1.0, lp.index((ACT, l.tx, l.rx)): -l.cap},
            LE,
            0.0,
            f"cap_{l.tx}_{l.rx}",
        )
    for v in range(1, dst):
        coeffs = {lp.index((FLOW, l.tx, l.rx)): 1.0 for l in live if l.rx == v}
        coeffs.update({lp.index((FLOW, l.tx, l.rx)): -1.0 for l in live if l.tx == v})
        lp.row(coeffs, EQ, 0.0, f"flow_{v}")
    for v in range(dst):
        lp.row({lp.index((ACT, l.tx, l.rx)): 1.0 for l in live if l.tx == v}, LE, 1.0, f"tx_{v}")
    for v in range(1, dst + 1):
        lp.row({lp.index((ACT, l.tx, l.rx)): 1.0 for l in live if l.rx == v}, LE, 1.0, f"rx_{v}")
    return lp.build()


def build_p1(
    net: Network,
    paths: PathSet | None = None,
    thresholds: ThresholdMap | None = None,
    limit: int = DEFAULT_PATH_LIMIT,
) -> LpProblem:
    """Path-based LP with one column per path, labelled ``("x", nodes)``.

    ``paths`` defaults to every simple path; a subset gives a lower bound.
    Paths through a zero-capacity link carry nothing and are dropped.
    """
    _require_single_beam(net)
    if paths is None:
        paths = enumerate_paths(net, limit)
    elif len(paths) > limit:
        raise PathOverflowError(limit)
    usable = [p for p in paths if p.capacity > 0]
    caps = net.capacity
    lp = LpBuilder()
    for k, p in enumerate(usable):
        lp.var((PATH, p.nodes), obj=p.capacity)
    tx: dict[int, dict[int, float]] = {}
    rx: dict[int, dict[int, float]] = {}
    per_link: dict[tuple[int, int], dict[int, float]] = {}
    for k, p in enumerate(usable):
        for a, b in p.links:
            share = p.capacity / caps[(a, b)]
            tx.setdefault(a, {})[k] = share
            rx.setdefault(b, {})[k] = share
            per_link.setdefault((a, b), {})[k] = share
    for v in sorted(tx):
        lp.row(tx[v], LE, 1.0, f"tx_{v}")
    for v in sorted(rx):
        lp.row(rx[v], LE, 1.0, f"rx_{v}")
    if thresholds is not None:
        for key in sorted(per_link):
            lp.row(per_link[key], LE, thresholds[key], f"theta_{key[0]}_{key[1]}")
    return lp.build()


def _checked(sol: LpSolution) -> LpSolution:
    if sol.status != OPTIMAL:
        # every formulation here is feasible (x = 0) and bounded (beam time <= 1)
        raise SolverError(f"scheduling LP reported {sol.status}")
    return sol


def p2_solution(net: Network, sol: LpSolution) -> P2Solution:
    values = sol.by_label()
    flows = {k: 0.0 for k in net.capacity}
    acts = {k: 0.0 for k in net.capacity}
    for label, v in values.items():
        kind, a, b = label
        (flows if kind == FLOW else acts)[(a, b)] = v
    rate = sum(f for (a, b), f in flows.items() if b == net.destination)
    return P2Solution(flows, acts, rate)


def solve_p2(net: Network, thresholds: ThresholdMap | None = None) -> P2Solution:
    return p2_solution(net, _checked(solve(build_p2(net, thresholds))))


def approximate_capacity(net: Network) -> P2Solution:
    """Unconstrained edge-based optimum; its rate is the approximate capacity."""
    return solve_p2(net, None)


def passive_capacity(net: Network, thresholds: ThresholdMap) -> P2Solution:
    """Edge-based optimum with every link's activation capped by its threshold."""
    return solve_p2(net, thresholds)


def solve_p1(
    net: Network,
    thresholds: ThresholdMap | None = None,
    paths: PathSet | None = None,
    limit: int = DEFAULT_PATH_LIMIT,
) -> P1Solution:
    sol = _checked(solve(build_p1(net, paths, thresholds, limit)))
    return P1Solution(
        tuple((Path.on(net, nodes), x) for (_, nodes), x in sol.by_label().items() if x > 0)
    )
