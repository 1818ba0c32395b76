"""Beam schedules: time-shared sequences of network states.

A network state is a set of simultaneously aligned links.  With one beam per
node a state is a partial matching between transmitters and receivers.

Turning per-link activation times into states works on the bipartite
transmitter x receiver matrix of activations, which is doubly substochastic
whenever every node's beam time is at most one.  Padding it with slack rows
and columns gives a doubly stochastic matrix

    [[A,            diag(1 - row sums)],
     [diag(1 - col sums),          A^T]]

that is peeled one perfect matching at a time.  Slack entries are dropped from
the emitted states.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ParseError, ScheduleError
from .lp.problem import EPS_FEAS
from .network import LinkKey, Network, ThresholdMap
from .paths import EDGE, VERTEX, DisjointPathCertificate, max_flow

RESIDUE = 1e-9


@dataclass(frozen=True)
class NetworkState:
    links: tuple[LinkKey, ...]

    @classmethod
    def of(cls, links) -> "NetworkState":
        return cls(tuple(sorted(set(links))))

    def problems(self, net: Network, m_beams: int | None = None) -> list[str]:
        m = net.m_beams if m_beams is None else m_beams
        src, dst = net.source, net.destination
        caps = net.capacity
        out = [f"link {k} not in network" for k in self.links if k not in caps]
        tx: dict[int, int] = defaultdict(int)
        rx: dict[int, int] = defaultdict(int)
        for a, b in self.links:
            tx[a] += 1
            rx[b] += 1
        for v, count in sorted(tx.items()):
            if count > (m if v == src else 1):
                out.append(f"node {v} transmits on {count} links")
        for v, count in sorted(rx.items()):
            if count > (m if v == dst else 1):
                out.append(f"node {v} receives on {count} links")
        return out


@dataclass(frozen=True)
class BeamSchedule:
    """States with durations.  Constructive schedules also record the per-path
    time ``gamma``, the common state duration and the rate they deliver."""

    states: tuple[tuple[NetworkState, float], ...] = ()
    gamma: float | None = None
    state_duration: float | None = None
    rate: float | None = None
    threshold_ok: bool | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def total_duration(self) -> float:
        return sum(d for _, d in self.states)

    def link_activations(self) -> dict[LinkKey, float]:
        out: dict[LinkKey, float] = defaultdict(float)
        for state, d in self.states:
            for key in state.links:
                out[key] += d
        return dict(out)

    def node_usage(self) -> tuple[dict[int, float], dict[int, float]]:
        """Total transmit and receive beam time per node."""
        tx: dict[int, float] = defaultdict(float)
        rx: dict[int, float] = defaultdict(float)
        for state, d in self.states:
            for a, b in state.links:
                tx[a] += d
                rx[b] += d
        return dict(tx), dict(rx)

    def to_json(self) -> list[dict]:
        return [
            {"duration": d, "links": [[a, b] for a, b in state.links]} for state, d in self.states
        ]

    def dumps(self) -> bytes:
        return (json.dumps(self.to_json(), indent=2) + "\n").encode("utf-8")

    @classmethod
    def loads(cls, data: bytes | str) -> "BeamSchedule":
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
        if not isinstance(doc, list):
            raise ParseError("schedule must be a list of states")
        states = []
        for i, raw in enumerate(doc):
            where = f"[{i}]"
            if not isinstance(raw, dict) or "duration" not in raw or "links" not in raw:
                raise ParseError("state needs 'duration' and 'links'", where)
            d = raw["duration"]
            if isinstance(d, bool) or not isinstance(d, (int, float)) or not math.isfinite(d) or d < 0:
                raise ParseError(f"bad duration {d!r}", where)
            links = []
            for pair in raw["links"]:
                if (
                    not isinstance(pair, list)
                    or len(pair) != 2
                    or not all(isinstance(v, int) and not isinstance(v, bool) for v in pair)
                ):
                    raise ParseError(f"bad link {pair!r}", where)
                links.append((pair[0], pair[1]))
            states.append((NetworkState.of(links), float(d)))
        return cls(tuple(states))


def achieved_rate(schedule: BeamSchedule, net: Network) -> float:
    """Largest source-destination flow the schedule supports: a max flow with
    each link's capacity scaled by its realized activation time."""
    caps = net.capacity
    acts = schedule.link_activations()
    weighted = {k: caps[k] * t for k, t in acts.items() if k in caps and t > 0}
    value, _ = max_flow(weighted, net.source, net.destination)
    return value


# ---------------------------------------------------------------------------
# activations -> states

def _perfect_matching(P: np.ndarray, real: np.ndarray, force: tuple[int, int]):
    """Perfect matching on the support of ``P`` that uses ``force`` and as many
    real links as possible."""
    support = P > RESIDUE
    cost = np.where(support, -(real.astype(float) + 1e-3 * P), np.inf)
    r0, c0 = force
    cost[r0, :] = np.inf
    cost[:, c0] = np.inf
    cost[r0, c0] = -1.0
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError:
        return None
    if not np.all(np.isfinite(cost[rows, cols])):
        return None
    return list(zip(rows.tolist(), cols.tolist()))


def _reduce_states(states: list[tuple[tuple[LinkKey, ...], float]], keys: list[LinkKey]):
    """Drop linearly dependent states while keeping every link's total time
    fixed and the summed duration non-increasing."""
    index = {k: i for i, k in enumerate(keys)}
    states = list(states)
    while True:
        V = np.zeros((len(keys), len(states)))
        for s, (links, _) in enumerate(states):
            for k in links:
                V[index[k], s] = 1.0
        if len(states) <= np.linalg.matrix_rank(V):
            return states
        _, _, vt = np.linalg.svd(V)
        c = vt[-1]
        if c.sum() < 0:
            c = -c
        d = np.array([t for _, t in states])
        pos = c > 1e-12
        ratios = np.where(pos, d / np.where(pos, c, 1.0), np.inf)
        s_min = int(np.argmin(ratios))
        d = d - ratios[s_min] * c
        d[s_min] = 0.0
        states = [(links, float(t)) for (links, _), t in zip(states, d) if t > RESIDUE]


def schedule_from_activations(net: Network, activations: dict[LinkKey, float]) -> BeamSchedule:
    """Decompose single-beam activation times into matchings with durations.

    Per-link summed state duration reproduces ``activations`` (residue below
    1e-9 discarded) and uses at most as many states as active links.
    """
    if net.m_beams != 1:
        raise ScheduleError("activation decomposition needs M = 1")
    caps = net.capacity
    acts = {}
    for key, lam in activations.items():
        if key not in caps:
            raise ScheduleError(f"link {key} not in network")
        if lam < -EPS_FEAS or not math.isfinite(lam):
            raise ScheduleError(f"link {key}: invalid activation {lam}")
        if lam > RESIDUE:
            acts[key] = float(lam)
    tx_sum: dict[int, float] = defaultdict(float)
    rx_sum: dict[int, float] = defaultdict(float)
    for (a, b), lam in acts.items():
        tx_sum[a] += lam
        rx_sum[b] += lam
    for v, t in sorted(tx_sum.items()):
        if t > 1 + EPS_FEAS:
            raise ScheduleError(f"node {v} transmits for {t:.9g} > 1")
    for v, t in sorted(rx_sum.items()):
        if t > 1 + EPS_FEAS:
            raise ScheduleError(f"node {v} receives for {t:.9g} > 1")
    if not acts:
        return BeamSchedule()

    rows = sorted(tx_sum)
    cols = sorted(rx_sum)
    n, m = len(rows), len(cols)
    A = np.zeros((n, m))
    for (a, b), lam in acts.items():
        A[rows.index(a), cols.index(b)] = lam
    P = np.zeros((n + m, m + n))
    P[:n, :m] = A
    P[:n, m:] = np.diag(np.maximum(1.0 - A.sum(axis=1), 0.0))
    P[n:, :m] = np.diag(np.maximum(1.0 - A.sum(axis=0), 0.0))
    P[n:, m:] = A.T
    real = np.zeros_like(P, dtype=bool)
    real[:n, :m] = True

    peeled: dict[tuple[LinkKey, ...], float] = {}
    order: list[tuple[LinkKey, ...]] = []
    while True:
        top = P[:n, :m]
        if top.max() <= RESIDUE:
            break
        force = np.unravel_index(int(np.argmax(top)), top.shape)
        matching = _perfect_matching(P, real, force)
        if matching is None:
            # numerical dust broke double stochasticity: emit the link alone
            matching = [force]
            mirror = (n + force[1], m + force[0])
            P[mirror] = max(P[mirror] - P[force], 0.0)
        duration = min(P[r, c] for r, c in matching)
        links = []
        for r, c in matching:
            P[r, c] -= duration
            if r < n and c < m:
                links.append((rows[r], cols[c]))
        P[P < RESIDUE] = 0.0
        key = tuple(sorted(links))
        if key not in peeled:
            order.append(key)
            peeled[key] = 0.0
        peeled[key] += duration

    states = [(k, peeled[k]) for k in order]
    if len(states) > len(acts):
        states = _reduce_states(states, sorted(acts))
    schedule = BeamSchedule(tuple((NetworkState(k), d) for k, d in states))
    realized = schedule.link_activations()
    for key, lam in acts.items():
        if abs(realized.get(key, 0.0) - lam) > 1e-7:
            raise ScheduleError(f"link {key}: schedule gives {realized.get(key, 0.0)}, wanted {lam}")
    return schedule


# ---------------------------------------------------------------------------
# constructive schedules on disjoint paths

def _unit_witness(cert: DisjointPathCertificate) -> None:
    for p in cert.witness:
        if abs(p.capacity - 1.0) > 1e-12:
            raise ScheduleError(f"path {p.nodes} has capacity {p.capacity}; unit capacities required")


def edge_disjoint_schedule(
    cert: DisjointPathCertificate, theta_c: float, c_bar: float, theta: float
) -> BeamSchedule:
    """Run each of the ``H_e`` edge-disjoint paths alone for
    ``gamma = theta_c * c_bar / H_e``.

    ``threshold_ok`` reports whether ``gamma <= theta``; a violation is
    flagged, not repaired.
    """
    if cert.kind != EDGE:
        raise ScheduleError("edge-disjoint certificate required")
    if cert.count == 0:
        raise ScheduleError("empty certificate: no source-destination path")
    if not 0.0 <= theta_c <= 1.0:
        raise ScheduleError(f"theta_c must lie in [0, 1], got {theta_c}")
    _unit_witness(cert)
    gamma = theta_c * c_bar / cert.count
    ok = gamma <= theta + 1e-12
    notes = () if ok else (f"per-path time {gamma:.9g} exceeds threshold {theta:.9g}",)
    if gamma == 0.0:
        return BeamSchedule((), gamma, 0.0, 0.0, True)
    states = tuple((NetworkState.of(p.links), gamma) for p in cert.witness)
    rate = sum(gamma * p.capacity for p in cert.witness)
    return BeamSchedule(states, gamma, gamma, rate, ok, notes)


def vertex_disjoint_schedule(
    cert: DisjointPathCertificate, m_beams: int, theta_c: float, theta: float | None = None
) -> BeamSchedule:
    """Multi-beam schedule over ``H_v`` vertex-disjoint paths.

    ``max(M, H_v)`` states of duration ``gamma / M`` each, where
    ``gamma = theta_c * min(M, H_v) / H_v``; every path appears in exactly
    ``M`` states and every state carries ``min(M, H_v)`` paths.  With
    ``H_v >= M`` state ``t`` runs paths ``t .. t + M - 1`` (mod ``H_v``);
    otherwise every state runs all paths.
    """
    if m_beams <= 1:
        raise ScheduleError("multi-beam schedule needs M > 1")
    if cert.kind != VERTEX:
        raise ScheduleError("vertex-disjoint certificate required")
    h = cert.count
    if h == 0:
        raise ScheduleError("empty certificate: no source-destination path")
    if not 0.0 <= theta_c <= 1.0:
        raise ScheduleError(f"theta_c must lie in [0, 1], got {theta_c}")
    _unit_witness(cert)
    m_hat = min(m_beams, h)
    c_bar = float(m_hat)
    gamma = theta_c * c_bar / h
    n_states = max(m_beams, h)
    lam_s = gamma / m_beams
    ok = None if theta is None else gamma <= theta + 1e-12
    notes = () if ok in (None, True) else (f"per-path time {gamma:.9g} exceeds threshold {theta:.9g}",)
    if gamma == 0.0:
        return BeamSchedule((), gamma, 0.0, 0.0, ok, notes)
    if h >= m_beams:
        groups = [[(t + i) % h for i in range(m_beams)] for t in range(n_states)]
    else:
        groups = [list(range(h)) for _ in range(n_states)]
    states = []
    for group in groups:
        links = [k for i in group for k in cert.witness[i].links]
        states.append((NetworkState.of(links), lam_s))
    rate = m_hat * lam_s * n_states
    return BeamSchedule(tuple(states), gamma, lam_s, rate, ok, notes)


# ---------------------------------------------------------------------------
# audit

@dataclass(frozen=True)
class AuditReport:
    links: list[dict]
    violations: list[str]
    rate: float
    total_duration: float

    @property
    def ok(self) -> bool:
        return not self.violations


def audit_schedule(
    schedule: BeamSchedule,
    net: Network,
    thresholds: ThresholdMap | None = None,
    m_beams: int | None = None,
    tol: float = EPS_FEAS,
) -> AuditReport:
    """Check per-state beam limits, per-node beam time and per-link thresholds."""
    m = net.m_beams if m_beams is None else m_beams
    violations = []
    for i, (state, _) in enumerate(schedule.states):
        violations.extend(f"state {i}: {p}" for p in state.problems(net, m))
    tx, rx = schedule.node_usage()
    for v, t in sorted(tx.items()):
        limit = m if v == net.source else 1
        if t > limit + tol:
            violations.append(f"node {v}: transmit time {t:.9g} > {limit}")
    for v, t in sorted(rx.items()):
        limit = m if v == net.destination else 1
        if t > limit + tol:
            violations.append(f"node {v}: receive time {t:.9g} > {limit}")
    acts = schedule.link_activations()
    rows = []
    for key in net.link_keys():
        t = acts.get(key, 0.0)
        theta = None if thresholds is None else thresholds[key]
        ok = theta is None or t <= theta + tol
        rows.append({"tx": key[0], "rx": key[1], "activation": t, "threshold": theta, "ok": ok})
        if not ok:
            violations.append(f"link {key}: activation {t:.9g} > threshold {theta:.9g}")
    rate = achieved_rate(schedule, net)
    return AuditReport(rows, violations, rate, schedule.total_duration)
