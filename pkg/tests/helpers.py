"""Random instances and brute-force oracles shared by the test modules.

Every oracle here is written from scratch and avoids the package's own
solver, path enumeration and max-flow code.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.optimize import linprog

from mmpassive.network import Network, ThresholdMap


def random_net(rng: np.random.Generator, n_relays: int, p: float = 0.5, unit: bool = False,
               m_beams: int = 1, cyclic: bool = False) -> Network:
    """Random relay graph without a direct source-destination link.

    ``cyclic`` also allows backward relay-to-relay links.
    """
    n = n_relays + 2
    caps = {}
    for i in range(n - 1):
        for j in range(1, n):
            if i == j or (i == 0 and j == n - 1) or (j < i and not (cyclic and i > 0)):
                continue
            if rng.random() < p or (i == 0 and j == 1):
                caps[(i, j)] = 1.0 if unit else float(rng.uniform(0.1, 3.0))
    return Network.build(n_relays, caps, m_beams)


def random_thresholds(rng: np.random.Generator, net: Network, lo: float = 0.05) -> ThresholdMap:
    return ThresholdMap({k: float(rng.uniform(lo, 1.0)) for k in net.link_keys()})


def brute_paths(net: Network) -> list[tuple[int, ...]]:
    """All simple source-destination paths by exhaustive extension."""
    adj: dict[int, list[int]] = {}
    for l in net.links:
        adj.setdefault(l.tx, []).append(l.rx)
    dst = net.n_relays + 1
    out = []
    stack = [(0,)]
    while stack:
        path = stack.pop()
        if path[-1] == dst:
            out.append(path)
            continue
        for nxt in adj.get(path[-1], []):
            if nxt not in path:
                stack.append(path + (nxt,))
    return sorted(out)


def path_links(path) -> list[tuple[int, int]]:
    return list(zip(path[:-1], path[1:]))


def lp_oracle(net: Network, thresholds: ThresholdMap | None = None, m_beams: int = 1) -> float:
    """Path-based scheduling LP solved by HiGHS over brute-force paths."""
    caps = {(l.tx, l.rx): l.cap for l in net.links}
    paths = [p for p in brute_paths(net) if min(caps[k] for k in path_links(p)) > 0]
    if not paths:
        return 0.0
    cp = [min(caps[k] for k in path_links(p)) for p in paths]
    rows, rhs = [], []
    dst = net.n_relays + 1
    for v in range(dst + 1):
        limit = m_beams if v in (0, dst) else 1.0
        tx, rx = [], []
        for p, c in zip(paths, cp):
            i = p.index(v) if v in p else None
            tx.append(c / caps[(v, p[i + 1])] if i is not None and i + 1 < len(p) else 0.0)
            rx.append(c / caps[(p[i - 1], v)] if i is not None and i > 0 else 0.0)
        rows += [tx, rx]
        rhs += [limit, limit]
    if thresholds is not None:
        for key in caps:
            rows.append([c / caps[key] if key in path_links(p) else 0.0 for p, c in zip(paths, cp)])
            rhs.append(thresholds[key])
    res = linprog(-np.array(cp), A_ub=np.array(rows), b_ub=np.array(rhs), bounds=(0, None),
                  method="highs")
    assert res.status == 0
    return -res.fun


def brute_disjoint(net: Network, vertex: bool) -> int:
    """Largest set of pairwise disjoint paths by exhaustive subset search."""
    caps = {(l.tx, l.rx): l.cap for l in net.links}
    paths = [p for p in brute_paths(net) if all(caps[k] > 0 for k in path_links(p))]
    items = [set(p[1:-1]) if vertex else set(path_links(p)) for p in paths]
    best = 0

    def grow(start, used, count):
        nonlocal best
        best = max(best, count)
        for i in range(start, len(items)):
            if not (items[i] & used):
                grow(i + 1, used | items[i], count + 1)

    grow(0, set(), 0)
    return best


def top_k_brute(values: list[float], k: int) -> float:
    return max((sum(c) for c in itertools.combinations(values, k)), default=0.0)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def criterion(number: int, title: str):
    """Record the outcome of an acceptance check for the end-of-run summary."""

    def wrap(fn):
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs) or ""
            except BaseException as exc:
                ACCEPTANCE[number] = (False, f"{title}: {type(exc).__name__}: {exc}".splitlines()[0])
                print(f"criterion {number:2d} FAIL  {title}")
                raise
            ACCEPTANCE[number] = (True, f"{title} {detail}".strip())
            print(f"criterion {number:2d} PASS  {title} {detail}")

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap
