"""Rates carried across between threshold-constrained and wiretap-secure
operation on unit-capacity networks.

An eavesdropper observes any ``k`` links.  Reusing an optimal
threshold-constrained scheme for secrecy loses at most each observed link's
activation time, i.e. its threshold.  In the other direction, the
equal-time disjoint-path scheme used for secrecy is clipped per path to the
smallest threshold along it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bounds import CapacityError
from .certify import check_paths
from .errors import MmPassiveError
from .lp.builders import passive_capacity
from .network import Network, ThresholdMap
from .paths import count_edge_disjoint, count_vertex_disjoint, decompose_flow
from .solutions import P1Solution, P2Solution

PASSIVE_TO_SECURE = "passive->secure"
SECURE_TO_PASSIVE = "secure->passive"


@dataclass(frozen=True)
class WiretapModel:
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")


@dataclass(frozen=True)
class ReductionReport:
    direction: str
    rate: float
    inputs: dict = field(default_factory=dict)
    paths: P1Solution | None = None


def worst_case_leak(thresholds: ThresholdMap, k: int) -> float:
    """Largest summed threshold over any ``k`` links (the top ``k`` values)."""
    if k > len(thresholds):
        raise ValueError(f"cannot wiretap {k} of {len(thresholds)} links")
    return sum(sorted(thresholds.values.values(), reverse=True)[:k])


def _require_unit(net: Network) -> None:
    if not net.is_unit_capacity():
        raise CapacityError("the secrecy reduction needs unit link capacities")


def passive_to_secure(
    net: Network,
    thresholds: ThresholdMap,
    k: int | WiretapModel,
    passive: P2Solution | None = None,
) -> ReductionReport:
    """Secure rate of the optimal threshold-constrained scheme against ``k`` taps,
    floored at zero."""
    _require_unit(net)
    k = k.k if isinstance(k, WiretapModel) else int(k)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > len(net.links):
        raise ValueError(f"cannot wiretap {k} of {len(net.links)} links")
    if passive is None:
        passive = passive_capacity(net, thresholds)
    leak = worst_case_leak(thresholds, k)
    rate = max(0.0, passive.rate - leak)
    return ReductionReport(
        PASSIVE_TO_SECURE,
        rate,
        {"passive_capacity": passive.rate, "k": k, "leak": leak, "m_beams": 1},
        decompose_flow(passive, net),
    )


def secure_to_passive(
    net: Network, thresholds: ThresholdMap, m_beams: int | None = None
) -> ReductionReport:
    """Threshold-respecting rate of the equal-time disjoint-path secure scheme.

    Single beam: each of the ``H_e`` edge-disjoint paths runs for
    ``min(1 / H_e, theta_p)``.  Multi-beam: each of the ``H_v``
    vertex-disjoint paths runs for ``min(min(M, H_v) / H_v, theta_p)``.
    ``theta_p`` is the smallest threshold on the path.
    """
    _require_unit(net)
    m = net.m_beams if m_beams is None else m_beams
    if m < 1:
        raise ValueError("m_beams must be positive")
    cert = count_edge_disjoint(net) if m == 1 else count_vertex_disjoint(net)
    h = cert.count
    inputs = {"m_beams": m, "h": h, "kind": cert.kind}
    if h == 0:
        return ReductionReport(SECURE_TO_PASSIVE, 0.0, inputs, P1Solution())
    share = 1.0 / h if m == 1 else min(m, h) / h
    shares = []
    formula = 0.0
    for p in cert.witness:
        theta_p = min(thresholds[key] for key in p.links)
        shares.append((p, min(share, theta_p)))
        formula += min((1.0 if m == 1 else m) / h, theta_p)
    sol = P1Solution(tuple(shares))
    problems = check_paths(net, sol, thresholds, m_beams=m)
    if problems:
        raise MmPassiveError(f"secure-derived schedule infeasible: {problems[:3]}")
    if abs(sol.rate - formula) > 1e-12 * (1.0 + formula):
        raise MmPassiveError(f"rate {sol.rate} disagrees with closed form {formula}")
    inputs["theta_p"] = [min(thresholds[key] for key in p.links) for p in cert.witness]
    return ReductionReport(SECURE_TO_PASSIVE, sol.rate, inputs, sol)
