"""Closed-form lower bounds on the threshold-constrained capacity and the
path-count conditions for unit-capacity networks.

All three bounds start from one unconstrained optimum and shrink it until
every link respects its threshold:

* ``naive``: scale everything by the smallest threshold anywhere;
* ``activation_ratio``: scale by (smallest threshold over links the optimum
  uses) / (largest activation), capped at one;
* ``per_path``: scale each path of the optimum's decomposition by its own
  (smallest threshold on the path) / (largest activation on the path).

The optimum is not unique, so the last two depend on which optimal vertex the
solver returns and on the decomposition order.  The ordering
naive <= activation_ratio <= per_path <= constrained optimum holds for every
optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .certify import check_paths
from .errors import MmPassiveError
from .lp.builders import approximate_capacity, passive_capacity
from .network import Network, ThresholdMap
from .paths import count_edge_disjoint, count_vertex_disjoint, decompose_flow
from .scheduler import BeamSchedule, edge_disjoint_schedule, vertex_disjoint_schedule
from .solutions import P1Solution, P2Solution


class CapacityError(MmPassiveError, ValueError):
    """Operation needs unit link capacities."""


@dataclass(frozen=True)
class Baseline:
    """Unconstrained optimum and its path decomposition."""

    solution: P2Solution
    paths: P1Solution

    @classmethod
    def of(cls, net: Network) -> "Baseline":
        sol = approximate_capacity(net)
        return cls(sol, decompose_flow(sol, net))

    @property
    def c_bar(self) -> float:
        return self.solution.rate


def _certified(net, thresholds, cert: P1Solution, what: str) -> P1Solution:
    problems = check_paths(net, cert, thresholds)
    if problems:
        raise MmPassiveError(f"{what} certificate infeasible: {problems[:3]}")
    return cert


def _naive(net, thresholds, base: Baseline) -> tuple[float, P1Solution]:
    theta_hat = thresholds.min()
    return theta_hat * base.c_bar, base.paths.scaled(theta_hat)


def _activation_ratio(net, thresholds, base: Baseline) -> tuple[float, P1Solution, float, float]:
    acts = base.solution.activations
    lam_max = max(acts.values(), default=0.0)
    if lam_max <= 0.0:
        return 0.0, P1Solution(), 1.0, 0.0
    theta_used = min((thresholds[k] for k, lam in acts.items() if lam > 0.0), default=1.0)
    factor = min(1.0, theta_used / lam_max)
    return factor * base.c_bar, base.paths.scaled(factor), theta_used, lam_max


def _per_path(net, thresholds, base: Baseline) -> tuple[float, P1Solution]:
    lam = base.paths.link_activations(net)
    shares = []
    for path, x in base.paths.paths:
        theta_p = min(thresholds[k] for k in path.links)
        lam_p = max(lam[k] for k in path.links)
        shares.append(min(x, theta_p * x / lam_p) if lam_p > 0 else 0.0)
    cert = P1Solution(tuple((p, s) for (p, _), s in zip(base.paths.paths, shares)))
    return cert.rate, cert


def bound_naive(net: Network, thresholds: ThresholdMap, base: Baseline | None = None) -> float:
    """Smallest threshold times the approximate capacity."""
    base = base or Baseline.of(net)
    value, cert = _naive(net, thresholds, base)
    _certified(net, thresholds, cert, "naive")
    return value


def bound_activation_ratio(net: Network, thresholds: ThresholdMap, base: Baseline | None = None) -> float:
    base = base or Baseline.of(net)
    value, cert, _, _ = _activation_ratio(net, thresholds, base)
    _certified(net, thresholds, cert, "activation-ratio")
    return value


def bound_per_path(net: Network, thresholds: ThresholdMap, base: Baseline | None = None) -> float:
    base = base or Baseline.of(net)
    value, cert = _per_path(net, thresholds, base)
    _certified(net, thresholds, cert, "per-path")
    return value


@dataclass(frozen=True)
class BoundReport:
    naive: float
    activation_ratio: float
    per_path: float
    lp_value: float
    c_bar: float
    theta_hat: float
    theta_tilde: float
    lambda_tilde: float
    certificates: dict[str, P1Solution] = field(default_factory=dict)

    def ordered(self, slack: float = 1e-9) -> bool:
        return (
            self.naive <= self.activation_ratio + slack
            and self.activation_ratio <= self.per_path + slack
            and self.per_path <= self.lp_value + slack
        )


def bound_report(
    net: Network,
    thresholds: ThresholdMap,
    base: Baseline | None = None,
    constrained: P2Solution | None = None,
) -> BoundReport:
    """All three bounds, the constrained optimum and re-checked certificates."""
    base = base or Baseline.of(net)
    if constrained is None:
        constrained = passive_capacity(net, thresholds)
    naive, c_naive = _naive(net, thresholds, base)
    ratio, c_ratio, theta_tilde, lam_tilde = _activation_ratio(net, thresholds, base)
    per_path, c_path = _per_path(net, thresholds, base)
    certs = {"naive": c_naive, "activation_ratio": c_ratio, "per_path": c_path}
    for name, cert in certs.items():
        _certified(net, thresholds, cert, name)
    return BoundReport(
        naive=naive,
        activation_ratio=ratio,
        per_path=per_path,
        lp_value=constrained.rate,
        c_bar=base.c_bar,
        theta_hat=thresholds.min(),
        theta_tilde=theta_tilde,
        lambda_tilde=lam_tilde,
        certificates=certs,
    )


# ---------------------------------------------------------------------------
# path-count conditions

@dataclass(frozen=True)
class PathCountVerdict:
    achievable: bool
    required: float
    actual: int
    c_bar: float
    m_beams: int
    schedule: BeamSchedule | None


def theorem1_check(
    net: Network,
    theta: float | ThresholdMap,
    theta_c: float,
    m_beams: int | None = None,
) -> PathCountVerdict:
    """Can ``theta_c`` times the approximate capacity be reached under threshold ``theta``?

    Single beam: iff ``H_e >= theta_c * C_bar / theta`` with ``C_bar = 1``
    (0 when disconnected).  Multi-beam: sufficient when
    ``H_v >= theta_c * C_bar / theta`` with ``C_bar = min(M, H_v)``.  A
    threshold map is reduced to its smallest entry.
    """
    if not net.is_unit_capacity():
        raise CapacityError("path-count conditions need unit link capacities")
    if not 0.0 <= theta_c <= 1.0:
        raise ValueError(f"theta_c must lie in [0, 1], got {theta_c}")
    m = net.m_beams if m_beams is None else m_beams
    t = theta.min() if isinstance(theta, ThresholdMap) else float(theta)
    if m == 1:
        cert = count_edge_disjoint(net)
        c_bar = 1.0 if cert.count > 0 else 0.0
    else:
        cert = count_vertex_disjoint(net)
        c_bar = float(min(m, cert.count))
    target = theta_c * c_bar
    if target == 0.0:
        required = 0.0
    elif t <= 0.0:
        required = float("inf")
    else:
        required = target / t
    achievable = cert.count >= required - 1e-9
    schedule = None
    if achievable and cert.count > 0:
        if m == 1:
            schedule = edge_disjoint_schedule(cert, theta_c, c_bar, t)
        else:
            schedule = vertex_disjoint_schedule(cert, m, theta_c, t)
    return PathCountVerdict(achievable, required, cert.count, c_bar, m, schedule)
