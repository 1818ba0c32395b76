"""Full-duplex 1-2-1 relay network model.

Nodes are dense integers: the source is ``0``, relays are ``1..N`` and the
destination is ``N + 1``.  A link ``tx -> rx`` carries ``cap`` units of rate
while its transmit and receive beams are aligned.  Relays own one transmit and
one receive beam; the source and destination own ``m_beams`` each.

Path capacity
-------------
Operating a lone path ``p`` for the whole time (``x_p = 1``) needs each link
``(i, j)`` on it active for ``C_p / l_ji`` of the time.  That fraction cannot
exceed one, so ``C_p <= l_ji`` for every link on the path, and running every
link at the rate of the weakest one is achievable.  Hence
``C_p = min_{(i, j) in p} l_ji``.
"""

from __future__ import annotations

import json
import math
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ParseError, ValidationError

LinkKey = tuple[int, int]


@dataclass(frozen=True)
class Link:
    tx: int
    rx: int
    cap: float
    theta: float | None = None

    @property
    def key(self) -> LinkKey:
        return (self.tx, self.rx)


@dataclass(frozen=True)
class Network:
    """Immutable relay network.  Construction does not validate; see :func:`validate`."""

    n_relays: int
    m_beams: int = 1
    links: tuple[Link, ...] = ()

    @classmethod
    def build(
        cls,
        n_relays: int,
        caps: Mapping[LinkKey, float] | Iterable[tuple[int, int, float]],
        m_beams: int = 1,
    ) -> "Network":
        if isinstance(caps, Mapping):
            items = [(tx, rx, c) for (tx, rx), c in caps.items()]
        else:
            items = list(caps)
        links = tuple(Link(int(tx), int(rx), float(c)) for tx, rx, c in items)
        return cls(n_relays=n_relays, m_beams=m_beams, links=links)

    @property
    def source(self) -> int:
        return 0

    @property
    def destination(self) -> int:
        return self.n_relays + 1

    @property
    def n_nodes(self) -> int:
        return self.n_relays + 2

    @cached_property
    def capacity(self) -> dict[LinkKey, float]:
        return {link.key: link.cap for link in self.links}

    @cached_property
    def successors(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {v: [] for v in range(self.n_nodes)}
        for link in self.links:
            out.setdefault(link.tx, []).append(link.rx)
        for v in out:
            out[v].sort()
        return out

    def link_keys(self) -> list[LinkKey]:
        return [link.key for link in self.links]

    def is_unit_capacity(self, tol: float = 1e-12) -> bool:
        return all(abs(link.cap - 1.0) <= tol for link in self.links)

    def with_capacities(self, caps: Mapping[LinkKey, float]) -> "Network":
        links = tuple(
            Link(l.tx, l.rx, float(caps.get(l.key, l.cap)), l.theta) for l in self.links
        )
        return Network(self.n_relays, self.m_beams, links)

    def scaled(self, factor: float) -> "Network":
        return self.with_capacities({l.key: l.cap * factor for l in self.links})

    def restricted(self, keys: Iterable[LinkKey]) -> "Network":
        """Sub-network keeping only the listed links."""
        keep = set(keys)
        return Network(
            self.n_relays, self.m_beams, tuple(l for l in self.links if l.key in keep)
        )


@dataclass(frozen=True)
class ThresholdMap:
    """Per-link upper bounds on link activation time, each in [0, 1]."""

    values: dict[LinkKey, float] = field(default_factory=dict)

    @classmethod
    def uniform(cls, net: Network, theta: float) -> "ThresholdMap":
        return cls({key: float(theta) for key in net.link_keys()})

    @classmethod
    def from_network(cls, net: Network, default: float = 1.0) -> "ThresholdMap":
        """Use each link's own ``theta`` and fall back to ``default``."""
        return cls(
            {
                l.key: float(default if l.theta is None else l.theta)
                for l in net.links
            }
        )

    def __getitem__(self, key: LinkKey) -> float:
        return self.values[key]

    def __len__(self) -> int:
        return len(self.values)

    def get(self, key: LinkKey, default: float = 1.0) -> float:
        return self.values.get(key, default)

    def min(self) -> float:
        """Smallest threshold over all links (1.0 for an empty map)."""
        return min(self.values.values(), default=1.0)

    def replaced(self, key: LinkKey, theta: float) -> "ThresholdMap":
        values = dict(self.values)
        values[key] = float(theta)
        return ThresholdMap(values)

    def problems(self, net: Network) -> list[str]:
        out = []
        keys = set(net.link_keys())
        if set(self.values) != keys:
            missing = sorted(keys - set(self.values))
            extra = sorted(set(self.values) - keys)
            if missing:
                out.append(f"thresholds missing for links {missing}")
            if extra:
                out.append(f"thresholds given for unknown links {extra}")
        for key, theta in sorted(self.values.items()):
            if not (0.0 <= theta <= 1.0):
                out.append(f"threshold {theta} on link {key} outside [0, 1]")
        return out


@dataclass(frozen=True)
class Path:
    """A simple source-destination path and its capacity ``C_p``."""

    nodes: tuple[int, ...]
    capacity: float

    @classmethod
    def on(cls, net: Network, nodes: Iterable[int]) -> "Path":
        nodes = tuple(nodes)
        if len(nodes) < 2 or nodes[0] != net.source or nodes[-1] != net.destination:
            raise ValueError(f"{nodes} does not run from source to destination")
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"{nodes} revisits a node")
        caps = net.capacity
        try:
            cap = min(caps[(a, b)] for a, b in zip(nodes, nodes[1:]))
        except KeyError as exc:
            raise ValueError(f"{nodes} uses missing link {exc.args[0]}") from None
        return cls(nodes, cap)

    @property
    def links(self) -> tuple[LinkKey, ...]:
        return tuple(zip(self.nodes, self.nodes[1:]))

    @property
    def relays(self) -> tuple[int, ...]:
        return self.nodes[1:-1]


def validate(net: Network) -> list[str]:
    """Return every invariant violation of ``net``; an empty list means valid."""
    problems: list[str] = []
    if not isinstance(net.n_relays, int) or net.n_relays < 0:
        problems.append(f"n_relays must be a nonnegative integer, got {net.n_relays!r}")
        return problems
    if not isinstance(net.m_beams, int) or net.m_beams < 1:
        problems.append(f"m_beams must be a positive integer, got {net.m_beams!r}")
    dst = net.destination
    seen: set[LinkKey] = set()
    for link in net.links:
        tag = f"link {link.tx}->{link.rx}"
        if link.rx == 0:
            problems.append(f"{tag}: link into source")
        if link.tx == dst:
            problems.append(f"{tag}: link out of destination")
        if not (0 <= link.tx <= dst) or not (0 <= link.rx <= dst):
            problems.append(f"{tag}: node id outside 0..{dst}")
        if link.tx == link.rx:
            problems.append(f"{tag}: self-loop")
        if link.key in seen:
            problems.append(f"{tag}: duplicate link")
        seen.add(link.key)
        if not math.isfinite(link.cap):
            problems.append(f"{tag}: non-finite capacity")
        elif link.cap < 0:
            problems.append(f"{tag}: negative capacity {link.cap}")
        if link.theta is not None and not (0.0 <= link.theta <= 1.0):
            problems.append(f"{tag}: threshold {link.theta} outside [0, 1]")
    return problems


def check(net: Network) -> Network:
    problems = validate(net)
    if problems:
        raise ValidationError(problems)
    return net


# ---------------------------------------------------------------------------
# random generation

@dataclass(frozen=True)
class Topology:
    """Parsed topology spec.

    ``layered`` spreads relays over ``layers`` layers; consecutive layers are
    joined by a backbone (relay k feeds relay k mod width of the next layer)
    plus independent extra edges with probability ``p``.  The source feeds
    the first ``fanout`` relays of the first layer; the last layer feeds the
    destination.
    """

    kind: str
    layers: int | None = None
    p: float = 0.3
    fanout: int | None = None
    k: int | None = None

    def __str__(self) -> str:
        if self.kind == "parallel-paths":
            return f"parallel-paths({self.k})"
        if self.kind == "layered":
            parts = [f"p={self.p:g}"]
            if self.layers is not None:
                parts.insert(0, f"layers={self.layers}")
            if self.fanout is not None:
                parts.append(f"fanout={self.fanout}")
            return f"layered({','.join(parts)})"
        return self.kind


_TOPO_RE = re.compile(r"^\s*([a-z-]+)\s*(?:\((.*)\))?\s*$")


def parse_topology(spec: str | Topology) -> Topology:
    """Parse ``layered``, ``layered(layers=2,p=0.3,fanout=5)``, ``complete-dag``
    or ``parallel-paths(k)``."""
    if isinstance(spec, Topology):
        return spec
    m = _TOPO_RE.match(spec)
    if not m:
        raise ValueError(f"bad topology spec {spec!r}")
    kind, args = m.group(1), (m.group(2) or "").strip()
    params: dict[str, str] = {}
    positional: list[str] = []
    for part in filter(None, (a.strip() for a in args.split(","))):
        if "=" in part:
            key, value = part.split("=", 1)
            params[key.strip()] = value.strip()
        else:
            positional.append(part)
    try:
        if kind == "layered":
            if positional:
                raise ValueError("layered takes keyword arguments only")
            topo = Topology(
                "layered",
                layers=int(params.pop("layers")) if "layers" in params else None,
                p=float(params.pop("p", 0.3)),
                fanout=int(params.pop("fanout")) if "fanout" in params else None,
            )
            if not 0.0 <= topo.p <= 1.0:
                raise ValueError("p must lie in [0, 1]")
        elif kind == "complete-dag":
            if positional:
                raise ValueError("complete-dag takes no arguments")
            topo = Topology("complete-dag")
        elif kind == "parallel-paths":
            raw = positional[0] if positional else params.pop("k", None)
            if raw is None:
                raise ValueError("parallel-paths needs a path count")
            topo = Topology("parallel-paths", k=int(raw))
            if topo.k < 1:
                raise ValueError("path count must be positive")
        else:
            raise ValueError(f"unknown topology kind {kind!r}")
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad topology spec {spec!r}: {exc}") from None
    if params:
        raise ValueError(f"bad topology spec {spec!r}: unknown parameters {sorted(params)}")
    return topo


def _split(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def topology_links(n_relays: int, spec: str | Topology, rng: np.random.Generator) -> list[LinkKey]:
    topo = parse_topology(spec)
    dst = n_relays + 1
    if topo.kind == "complete-dag":
        return [(i, j) for i in range(dst) for j in range(i + 1, dst + 1)]

    if topo.kind == "parallel-paths":
        if n_relays < topo.k:
            raise ValueError(f"parallel-paths({topo.k}) needs at least {topo.k} relays")
        keys = []
        node = 1
        for length in _split(n_relays, topo.k):
            chain = [0, *range(node, node + length), dst]
            keys.extend(zip(chain, chain[1:]))
            node += length
        return sorted(keys)

    # layered
    if n_relays == 0:
        return [(0, 1)]
    n_layers = topo.layers if topo.layers is not None else max(1, round(n_relays / 5))
    if not 1 <= n_layers <= n_relays:
        raise ValueError(f"cannot spread {n_relays} relays over {n_layers} layers")
    layers: list[list[int]] = []
    node = 1
    for width in _split(n_relays, n_layers):
        layers.append(list(range(node, node + width)))
        node += width
    fanout = len(layers[0]) if topo.fanout is None else min(topo.fanout, len(layers[0]))
    if fanout < 1:
        raise ValueError("source fanout must be positive")

    keys: set[LinkKey] = {(0, r) for r in layers[0][:fanout]}
    for prev, nxt in zip(layers, layers[1:]):
        for k, a in enumerate(prev):
            keys.add((a, nxt[k % len(nxt)]))
        for k, b in enumerate(nxt):
            keys.add((prev[k % len(prev)], b))
        for a in prev:
            for b in nxt:
                if (a, b) not in keys and rng.random() < topo.p:
                    keys.add((a, b))
    keys.update((r, dst) for r in layers[-1])
    return sorted(keys)


def _draw_caps(rng: np.random.Generator, count: int, mean: float, variance: float) -> list[float]:
    if not (math.isfinite(mean) and math.isfinite(variance)) or variance < 0:
        raise ValueError(f"invalid capacity distribution mean={mean} variance={variance}")
    if variance == 0:
        return [max(float(mean), 0.0)] * count
    draws = rng.normal(mean, math.sqrt(variance), size=count)
    return [float(c) for c in np.maximum(draws, 0.0)]


def generate_random(
    n_relays: int,
    topology: str | Topology = "layered",
    cap_mean: float = 1.0,
    cap_variance: float = 0.1,
    seed: int = 0,
    m_beams: int = 1,
) -> Network:
    """Random network: topology per ``topology``, capacities i.i.d. Gaussian
    clamped below at zero.  Deterministic for a fixed seed."""
    if n_relays < 0:
        raise ValueError("n_relays must be nonnegative")
    rng = np.random.default_rng(seed)
    keys = topology_links(n_relays, topology, rng)
    caps = _draw_caps(rng, len(keys), cap_mean, cap_variance)
    return Network(
        n_relays, m_beams, tuple(Link(tx, rx, c) for (tx, rx), c in zip(keys, caps))
    )


def resample_capacities(net: Network, cap_mean: float, cap_variance: float, seed: int) -> Network:
    """Same topology, fresh Gaussian capacities."""
    rng = np.random.default_rng(seed)
    caps = _draw_caps(rng, len(net.links), cap_mean, cap_variance)
    links = tuple(Link(l.tx, l.rx, c, l.theta) for l, c in zip(net.links, caps))
    return Network(net.n_relays, net.m_beams, links)


# ---------------------------------------------------------------------------
# serialization

def save(net: Network) -> bytes:
    doc = {
        "n_relays": net.n_relays,
        "m_beams": net.m_beams,
        "links": [
            {"tx": l.tx, "rx": l.rx, "cap": l.cap, "theta": l.theta} for l in net.links
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


def _int_field(obj: dict, name: str, where: str) -> int:
    if name not in obj:
        raise ParseError(f"missing required field {name!r}", where)
    value = obj[name]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"field {name!r} must be an integer, got {value!r}", where)
    return value


def _float_field(obj: dict, name: str, where: str, optional: bool = False) -> float | None:
    if name not in obj or (optional and obj[name] is None):
        if optional:
            return None
        raise ParseError(f"missing required field {name!r}", where)
    value = obj[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"field {name!r} must be a number, got {value!r}", where)
    return float(value)


def _decode(data: bytes | str) -> object:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None


def load(data: bytes | str) -> Network:
    """Parse a network document and validate it.

    Raises :class:`ParseError` for malformed documents and
    :class:`ValidationError` for documents that break model invariants.
    """
    doc = _decode(data)
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    n_relays = _int_field(doc, "n_relays", "$")
    m_beams = _int_field(doc, "m_beams", "$")
    raw_links = doc.get("links")
    if not isinstance(raw_links, list):
        raise ParseError("field 'links' must be a list", "$")
    links = []
    for i, raw in enumerate(raw_links):
        where = f"links[{i}]"
        if not isinstance(raw, dict):
            raise ParseError("link must be an object", where)
        links.append(
            Link(
                _int_field(raw, "tx", where),
                _int_field(raw, "rx", where),
                _float_field(raw, "cap", where),
                _float_field(raw, "theta", where, optional=True),
            )
        )
    return check(Network(n_relays, m_beams, tuple(links)))


def load_with_thresholds(data: bytes | str, default_theta: float = 1.0) -> tuple[Network, ThresholdMap]:
    """Load a network and resolve absent per-link thresholds to ``default_theta``."""
    net = load(data)
    return net, ThresholdMap.from_network(net, default_theta)


def load_thresholds(data: bytes | str, net: Network) -> ThresholdMap:
    """Parse a threshold document ``{"default": f, "links": [{"tx", "rx", "theta"}]}``.

    Links not listed take their own ``theta`` from the network, then ``default``.
    """
    doc = _decode(data)
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    default = _float_field(doc, "default", "$", optional=True)
    thresholds = ThresholdMap.from_network(net, 1.0 if default is None else default)
    values = dict(thresholds.values)
    for i, raw in enumerate(doc.get("links", [])):
        where = f"links[{i}]"
        if not isinstance(raw, dict):
            raise ParseError("entry must be an object", where)
        key = (_int_field(raw, "tx", where), _int_field(raw, "rx", where))
        if key not in values:
            raise ParseError(f"no link {key[0]}->{key[1]} in network", where)
        values[key] = _float_field(raw, "theta", where)
    out = ThresholdMap(values)
    problems = out.problems(net)
    if problems:
        raise ValidationError(problems)
    return out


def example_network(p1_capacity: float = 2.0) -> Network:
    """The five two-hop relay paths 0 -> k -> 6, k = 1..5, with path 0->1->6
    at ``p1_capacity`` and every other link at unit capacity."""
    caps = {}
    for k in range(1, 6):
        c = p1_capacity if k == 1 else 1.0
        caps[(0, k)] = c
        caps[(k, 6)] = c
    return Network.build(5, caps)
