"""Path enumeration, flow decomposition and disjoint-path counting."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .errors import FlowConservationError, PathOverflowError
from .lp.problem import EPS_FEAS
from .network import LinkKey, Network, Path
from .solutions import P1Solution, P2Solution

DEFAULT_PATH_LIMIT = 10_000
DUST = 1e-12

EDGE, VERTEX = "edge-disjoint", "vertex-disjoint"


@dataclass(frozen=True)
class PathSet:
    paths: tuple[Path, ...]
    complete: bool = True

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


@dataclass(frozen=True)
class DisjointPathCertificate:
    kind: str
    count: int
    witness: tuple[Path, ...]


def enumerate_paths(net: Network, limit: int = DEFAULT_PATH_LIMIT) -> PathSet:
    """All simple source-destination paths in lexicographic node order.

    Raises :class:`PathOverflowError` once more than ``limit`` paths are found.
    """
    if limit < 1:
        raise ValueError("limit must be at least 1")
    succ = net.successors
    dst = net.destination
    found: list[Path] = []
    stack = [net.source]
    on_stack = {net.source}

    def walk(v: int) -> None:
        for w in succ.get(v, ()):
            if w == dst:
                found.append(Path.on(net, [*stack, w]))
                if len(found) > limit:
                    raise PathOverflowError(limit)
            elif w not in on_stack:
                stack.append(w)
                on_stack.add(w)
                walk(w)
                stack.pop()
                on_stack.remove(w)

    walk(net.source)
    return PathSet(tuple(found), complete=True)


# ---------------------------------------------------------------------------
# max flow

def max_flow(
    capacities: dict[tuple, float], source, sink
) -> tuple[float, dict[tuple, float]]:
    """Edmonds-Karp (shortest augmenting paths) on a directed graph.

    Returns the flow value and the per-edge flow of the input edges.
    """
    residual: dict = {}
    for (a, b), c in capacities.items():
        residual.setdefault(a, {}).setdefault(b, 0.0)
        residual.setdefault(b, {}).setdefault(a, 0.0)
        residual[a][b] += c
    for nbrs in residual.values():
        # deterministic BFS order
        for key in sorted(nbrs, key=repr):
            nbrs[key] = nbrs.pop(key)
    total = 0.0
    if source not in residual or sink not in residual:
        return 0.0, {e: 0.0 for e in capacities}
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            v = queue.popleft()
            for w, c in residual[v].items():
                if c > DUST and w not in parent:
                    parent[w] = v
                    queue.append(w)
        if sink not in parent:
            break
        push = math.inf
        w = sink
        while parent[w] is not None:
            v = parent[w]
            push = min(push, residual[v][w])
            w = v
        w = sink
        while parent[w] is not None:
            v = parent[w]
            residual[v][w] -= push
            residual[w][v] += push
            w = v
        total += push
    flow = {}
    for (a, b), c in capacities.items():
        flow[(a, b)] = max(0.0, min(c, c - residual[a][b])) if c > 0 else 0.0
    return total, flow


def _peel_unit_paths(flow: dict[tuple, float], source, sink) -> list[list]:
    """Split an integral flow into paths, discarding any circulations."""
    out_edges: dict = {}
    for (a, b), f in sorted(flow.items(), key=repr):
        if f > 0.5:
            out_edges.setdefault(a, []).append(b)
    paths = []
    while out_edges.get(source):
        walk = [source]
        pos = {source: 0}
        v = source
        while v != sink:
            w = out_edges[v].pop(0)
            if w in pos:
                # circulation: drop it and resume from w
                for u in walk[pos[w] + 1 :]:
                    del pos[u]
                walk = walk[: pos[w] + 1]
                v = w
                continue
            pos[w] = len(walk)
            walk.append(w)
            v = w
        paths.append(walk)
    return paths


def count_edge_disjoint(net: Network) -> DisjointPathCertificate:
    """Maximum number of link-disjoint source-destination paths (zero-capacity links ignored)."""
    caps = {l.key: 1.0 for l in net.links if l.cap > 0}
    _, flow = max_flow(caps, net.source, net.destination)
    witness = tuple(
        Path.on(net, nodes) for nodes in _peel_unit_paths(flow, net.source, net.destination)
    )
    return DisjointPathCertificate(EDGE, len(witness), witness)


def count_vertex_disjoint(net: Network) -> DisjointPathCertificate:
    """Maximum number of relay-disjoint source-destination paths, by node splitting."""
    src, dst = net.source, net.destination

    def tail(v):
        return v if v in (src, dst) else ("out", v)

    def head(v):
        return v if v in (src, dst) else ("in", v)

    caps: dict[tuple, float] = {}
    for v in range(1, dst):
        caps[(("in", v), ("out", v))] = 1.0
    for l in net.links:
        if l.cap > 0:
            caps[(tail(l.tx), head(l.rx))] = 1.0
    _, flow = max_flow(caps, src, dst)
    witness = []
    for split in _peel_unit_paths(flow, src, dst):
        nodes = [split[0]]
        for v in split[1:]:
            plain = v[1] if isinstance(v, tuple) else v
            if plain != nodes[-1]:
                nodes.append(plain)
        witness.append(Path.on(net, nodes))
    return DisjointPathCertificate(VERTEX, len(witness), tuple(witness))


def active_edge_disjoint(sol: P2Solution, net: Network, tol: float = EPS_FEAS) -> int:
    """Edge-disjoint path count of the sub-network of links active in ``sol``."""
    return count_edge_disjoint(net.restricted(sol.active_links(tol))).count


# ---------------------------------------------------------------------------
# flow decomposition

def _find_cycle(flow: dict[LinkKey, float]) -> list[int] | None:
    succ: dict[int, list[int]] = {}
    for a, b in sorted(flow):
        succ.setdefault(a, []).append(b)
    color: dict[int, int] = {}
    for root in sorted(succ):
        if color.get(root):
            continue
        stack = [(root, iter(succ.get(root, ())))]
        trail = [root]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            w = next(it, None)
            if w is None:
                color[v] = 2
                stack.pop()
                trail.pop()
            elif color.get(w) == 1:
                return trail[trail.index(w) :] + [w]
            elif not color.get(w):
                color[w] = 1
                trail.append(w)
                stack.append((w, iter(succ.get(w, ()))))
    return None


def _cancel_cycles(flow: dict[LinkKey, float]) -> None:
    while (cycle := _find_cycle(flow)) is not None:
        edges = list(zip(cycle, cycle[1:]))
        amount = min(flow[e] for e in edges)
        for e in edges:
            flow[e] -= amount
            if flow[e] <= DUST:
                del flow[e]


def _widest_path(flow: dict[LinkKey, float], src: int, dst: int) -> tuple[list[int], float] | None:
    """Path of maximum bottleneck in an acyclic flow; ties go to the
    lexicographically smallest node sequence."""
    succ: dict[int, list[int]] = {}
    indeg: dict[int, int] = {}
    for a, b in sorted(flow):
        succ.setdefault(a, []).append(b)
        indeg[b] = indeg.get(b, 0) + 1
        indeg.setdefault(a, 0)
    order = []
    ready = deque(sorted(v for v, d in indeg.items() if d == 0))
    while ready:
        v = ready.popleft()
        order.append(v)
        for w in succ.get(v, ()):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    best = {src: math.inf}
    for v in order:
        if v not in best:
            continue
        for w in succ.get(v, ()):
            width = min(best[v], flow[(v, w)])
            if width > best.get(w, -math.inf):
                best[w] = width
    width = best.get(dst)
    if width is None or width <= DUST:
        return None
    # nodes that reach dst through edges carrying at least `width`
    pred: dict[int, list[int]] = {}
    for (a, b), f in flow.items():
        if f >= width:
            pred.setdefault(b, []).append(a)
    reaches = {dst}
    queue = deque([dst])
    while queue:
        v = queue.popleft()
        for u in pred.get(v, ()):
            if u not in reaches:
                reaches.add(u)
                queue.append(u)
    nodes = [src]
    while nodes[-1] != dst:
        v = nodes[-1]
        nodes.append(min(w for w in succ[v] if w in reaches and flow[(v, w)] >= width))
    return nodes, width


def decompose_flow(sol: P2Solution, net: Network) -> P1Solution:
    """Turn an edge-based solution into weighted paths with ``x_p = F_p / C_p``.

    Circulations are cancelled first, then the widest remaining path is
    peeled repeatedly.  The resulting per-link activations never exceed the
    input activations and the rate is preserved.
    """
    caps = net.capacity
    flow = {k: f for k, f in sol.flows.items() if f > DUST and caps.get(k, 0.0) > 0}
    balance = {v: 0.0 for v in range(1, net.destination)}
    scale = {v: 0.0 for v in range(1, net.destination)}
    for (a, b), f in flow.items():
        if a in balance:
            balance[a] -= f
            scale[a] += f
        if b in balance:
            balance[b] += f
    for v, excess in balance.items():
        if abs(excess) > EPS_FEAS * (1.0 + scale[v]):
            raise FlowConservationError(f"relay {v}: net inflow {excess:.3g}")

    _cancel_cycles(flow)
    src, dst = net.source, net.destination
    out: list[tuple[Path, float]] = []
    while True:
        found = _widest_path(flow, src, dst)
        if found is None:
            break
        nodes, width = found
        path = Path.on(net, nodes)
        out.append((path, width / path.capacity))
        for e in path.links:
            flow[e] -= width
            if flow[e] <= DUST:
                del flow[e]

    result = P1Solution(tuple(out))
    if abs(result.rate - sol.rate) > 1e-6 * (1.0 + abs(sol.rate)):
        raise FlowConservationError(
            f"decomposition carries {result.rate:.9g}, solution claims {sol.rate:.9g}"
        )
    realized = result.link_activations(net)
    for key, lam in realized.items():
        if lam > sol.activations.get(key, 0.0) + EPS_FEAS:
            raise FlowConservationError(f"link {key}: path activation {lam:.9g} exceeds input")
    return result
