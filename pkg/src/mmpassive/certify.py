"""Stand-alone feasibility checker for weighted path sets.

Recomputes every quantity from the raw link capacities so that a bug in
the LP builders or in :class:`~mmpassive.solutions.P1Solution` cannot hide
an infeasible certificate.
"""

from __future__ import annotations

from collections import defaultdict

from .network import Network, ThresholdMap
from .solutions import P1Solution


def check_paths(
    net: Network,
    solution: P1Solution,
    thresholds: ThresholdMap | None = None,
    m_beams: int | None = None,
    tol: float = 1e-7,
) -> list[str]:
    """List every violated constraint of ``solution``.

    Checks nonnegative time shares, per-node transmit/receive beam time
    (one beam per relay, ``m_beams`` at source and destination) and, when
    ``thresholds`` is given, the per-link activation cap.
    """
    m = net.m_beams if m_beams is None else m_beams
    src, dst = 0, net.n_relays + 1
    caps = {(l.tx, l.rx): l.cap for l in net.links}
    tx_time: dict[int, float] = defaultdict(float)
    rx_time: dict[int, float] = defaultdict(float)
    link_time: dict[tuple[int, int], float] = defaultdict(float)
    problems = []
    for path, x in solution.paths:
        nodes = list(path.nodes)
        tag = "->".join(map(str, nodes))
        if x < -tol:
            problems.append(f"path {tag}: negative time share {x}")
        if not nodes or nodes[0] != src or nodes[-1] != dst or len(set(nodes)) != len(nodes):
            problems.append(f"path {tag}: not a simple source-destination path")
            continue
        hops = list(zip(nodes, nodes[1:]))
        missing = [h for h in hops if h not in caps]
        if missing:
            problems.append(f"path {tag}: missing links {missing}")
            continue
        c_p = min(caps[h] for h in hops)
        if abs(c_p - path.capacity) > 1e-12 * (1.0 + c_p):
            problems.append(f"path {tag}: capacity {path.capacity} != bottleneck {c_p}")
        if c_p == 0.0:
            continue
        for a, b in hops:
            t = x * c_p / caps[(a, b)]
            tx_time[a] += t
            rx_time[b] += t
            link_time[(a, b)] += t
    for v, t in sorted(tx_time.items()):
        limit = m if v == src else 1
        if t > limit + tol:
            problems.append(f"node {v}: transmit time {t:.12g} > {limit}")
    for v, t in sorted(rx_time.items()):
        limit = m if v == dst else 1
        if t > limit + tol:
            problems.append(f"node {v}: receive time {t:.12g} > {limit}")
    if thresholds is not None:
        for key, t in sorted(link_time.items()):
            if t > thresholds[key] + tol:
                problems.append(f"link {key}: activation {t:.12g} > threshold {thresholds[key]}")
    return problems
