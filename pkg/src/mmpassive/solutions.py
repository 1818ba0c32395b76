"""Solution records for the path-based and edge-based formulations."""

from __future__ import annotations

from dataclasses import dataclass, field

from .network import LinkKey, Network, Path


@dataclass(frozen=True)
class P2Solution:
    """Per-link flows ``F`` and activation times ``lambda`` plus the delivered rate."""

    flows: dict[LinkKey, float]
    activations: dict[LinkKey, float]
    rate: float

    def active_links(self, tol: float = 0.0) -> list[LinkKey]:
        return sorted(k for k, lam in self.activations.items() if lam > tol)

    def max_activation(self) -> float:
        return max(self.activations.values(), default=0.0)

    def problems(self, net: Network, tol: float = 1e-7) -> list[str]:
        """Violations of the edge-based constraints (capacity coupling,
        conservation, per-node beam time, nonnegativity)."""
        out = []
        caps = net.capacity
        for key, cap in caps.items():
            f = self.flows.get(key, 0.0)
            lam = self.activations.get(key, 0.0)
            if f < -tol or f > lam * cap + tol:
                out.append(f"link {key}: flow {f} outside [0, {lam * cap}]")
            if lam < -tol:
                out.append(f"link {key}: negative activation {lam}")
        tx = {v: 0.0 for v in range(net.n_nodes)}
        rx = {v: 0.0 for v in range(net.n_nodes)}
        inflow = {v: 0.0 for v in range(net.n_nodes)}
        outflow = {v: 0.0 for v in range(net.n_nodes)}
        for (a, b), lam in self.activations.items():
            tx[a] += lam
            rx[b] += lam
        for (a, b), f in self.flows.items():
            outflow[a] += f
            inflow[b] += f
        for v in range(1, net.destination):
            if abs(inflow[v] - outflow[v]) > tol * (1.0 + inflow[v]):
                out.append(f"relay {v}: inflow {inflow[v]} != outflow {outflow[v]}")
        for v in range(net.n_nodes):
            if tx[v] > 1.0 + tol:
                out.append(f"node {v}: transmit time {tx[v]} > 1")
            if rx[v] > 1.0 + tol:
                out.append(f"node {v}: receive time {rx[v]} > 1")
        if abs(inflow[net.destination] - self.rate) > tol * (1.0 + self.rate):
            out.append(f"rate {self.rate} != flow into destination {inflow[net.destination]}")
        return out


@dataclass(frozen=True)
class P1Solution:
    """Weighted source-destination paths; ``x`` is the fraction of time each runs."""

    paths: tuple[tuple[Path, float], ...] = field(default_factory=tuple)

    @property
    def rate(self) -> float:
        return sum(x * p.capacity for p, x in self.paths)

    def link_activations(self, net: Network) -> dict[LinkKey, float]:
        """Per-link activation implied by the paths, ``sum_p x_p C_p / l_ji``."""
        caps = net.capacity
        lam = {key: 0.0 for key in caps}
        for path, x in self.paths:
            if x == 0.0 or path.capacity == 0.0:
                continue
            for key in path.links:
                lam[key] += x * path.capacity / caps[key]
        return lam

    def scaled(self, factors) -> "P1Solution":
        """Multiply each ``x_p`` by a scalar or by the matching entry of a sequence."""
        if isinstance(factors, (int, float)):
            factors = [factors] * len(self.paths)
        return P1Solution(tuple((p, x * f) for (p, x), f in zip(self.paths, factors)))
