"""Group-level rollup of the higher-order network and its circular layout.

Every node's port sequence is mapped componentwise through a grouping
function; nodes with identical grouped layer sequences merge, edges sum.
Coarse mode only distinguishes "same group as the current port" from
"different", which collapses the long tail of cross-group combinations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DataError, UsageError
from .honbuild import HigherOrderNetwork, HonNode
from .ingest import PortTable

GAP_DEGREES = 2.0
FLOOR_DEGREES = 0.1

ATTRIBUTES = ("eco_realm", "country", "freshwater")
MODES = ("exact", "coarse")
WEIGHT_SCHEMES = ("uniform", "node_count", "ship_count")


@dataclass
class GroupingConfig:
    """How ports map to groups and how aggregated nodes are weighted."""

    group_map: dict[str, str]
    attribute: str = "eco_realm"
    mode: str = "exact"
    weight_scheme: str = "uniform"

    @classmethod
    def from_ports(cls, ports: PortTable, attribute: str = "eco_realm",
                   mode: str = "exact", weight_scheme: str = "uniform",
                   custom_map: dict[str, str] | None = None) -> "GroupingConfig":
        if mode not in MODES:
            raise UsageError(f"mode must be one of {MODES}, got {mode!r}")
        if weight_scheme not in WEIGHT_SCHEMES:
            raise UsageError(f"weight_scheme must be one of {WEIGHT_SCHEMES}")
        if custom_map is not None:
            group_map = dict(custom_map)
            attribute = "custom"
        elif attribute == "freshwater":
            group_map = {p.port_id: ("Freshwater" if p.freshwater else "Marine")
                         for p in ports}
        elif attribute in ("eco_realm", "country"):
            group_map = {p.port_id: getattr(p, attribute) for p in ports}
        else:
            raise UsageError(f"unknown grouping attribute {attribute!r}")
        return cls(group_map=group_map, attribute=attribute, mode=mode,
                   weight_scheme=weight_scheme)

    def group_of(self, port: str) -> str:
        try:
            return self.group_map[port]
        except KeyError:
            raise DataError(f"port {port!r} has no group") from None

    @property
    def sentinel(self) -> str:
        return ("Different Eco-realm" if self.attribute == "eco_realm"
                else "Different Group")


def aggregate_layers(context: tuple[str, ...],
                     grouping: GroupingConfig) -> tuple[str, ...]:
    """Componentwise grouping; coarse mode replaces any previous group that
    differs from the current one with the sentinel."""
    current = grouping.group_of(context[0])
    layers = [current]
    for port in context[1:]:
        g = grouping.group_of(port)
        if grouping.mode == "coarse" and g != current:
            layers.append(grouping.sentinel)
        else:
            layers.append(g)
    return tuple(layers)


def layers_label(layers: tuple[str, ...]) -> str:
    if len(layers) == 1:
        return layers[0]
    return layers[0] + "|" + ", ".join(layers[1:])


def aggregate_node_label(node: HonNode, grouping: GroupingConfig) -> str:
    return layers_label(aggregate_layers(node.context, grouping))


@dataclass
class AggregatedNode:
    layers: tuple[str, ...]
    members: list[int]
    node_count: int
    ship_count: int

    @property
    def order(self) -> int:
        return len(self.layers)

    @property
    def label(self) -> str:
        return layers_label(self.layers)


@dataclass
class AggregatedNetwork:
    nodes: list[AggregatedNode]
    edges: dict[tuple[tuple[str, ...], tuple[str, ...]], int]
    grouping: GroupingConfig
    sentinel: str

    def node_by_layers(self, layers: tuple[str, ...]) -> AggregatedNode | None:
        for n in self.nodes:
            if n.layers == layers:
                return n
        return None

    def total_edge_weight(self) -> int:
        return sum(self.edges.values())


def _sort_key(layers: tuple[str, ...], sentinel: str):
    # lexicographic over layers, sentinel after every real group
    return tuple((layer == sentinel, layer) for layer in layers)


def aggregate_network(hon: HigherOrderNetwork, grouping: GroupingConfig,
                      node_filter: set[int] | None = None) -> AggregatedNetwork:
    """Merge nodes with identical grouped layers; sum edges accordingly.

    node_filter restricts the rollup to a subset (a propagation session's
    reached set); edges need both endpoints inside it.
    """
    keep = (set(node_filter) if node_filter is not None
            else {n.node_id for n in hon.nodes})
    by_layers: dict[tuple[str, ...], list[int]] = {}
    for node in hon.nodes:
        if node.node_id not in keep:
            continue
        by_layers.setdefault(aggregate_layers(node.context, grouping),
                             []).append(node.node_id)

    nodes = []
    for layers in sorted(by_layers, key=lambda L: _sort_key(L, grouping.sentinel)):
        members = sorted(by_layers[layers])
        ship_count = sum(hon.out_weight(m) for m in members)
        nodes.append(AggregatedNode(layers=layers, members=members,
                                    node_count=len(members),
                                    ship_count=ship_count))

    layer_of = {m: n.layers for n in nodes for m in n.members}
    edges: dict[tuple[tuple[str, ...], tuple[str, ...]], int] = {}
    for (s, d), stats in hon.edges.items():
        if s in keep and d in keep:
            key = (layer_of[s], layer_of[d])
            edges[key] = edges.get(key, 0) + stats.weight
    return AggregatedNetwork(nodes=nodes, edges=edges, grouping=grouping,
                             sentinel=grouping.sentinel)


# --- circular layout ----------------------------------------------------------

@dataclass
class Sector:
    layers: tuple[str, ...]
    label: str
    start_angle: float
    end_angle: float

    @property
    def midpoint(self) -> float:
        return (self.start_angle + self.end_angle) / 2.0

    @property
    def width(self) -> float:
        return self.end_angle - self.start_angle


@dataclass
class Chord:
    src_label: str
    dst_label: str
    src_angle: float
    dst_angle: float
    weight: int
    intra: bool


@dataclass
class SectorLayout:
    sectors: list[Sector]
    chords: list[Chord]
    gap_radians: float = math.radians(GAP_DEGREES)
    floor_radians: float = math.radians(FLOOR_DEGREES)


def _sector_widths(weights: list[float], available: float,
                   floor: float) -> list[float]:
    """Proportional widths with a minimum; the remainder is rescaled so the
    total is exact."""
    n = len(weights)
    if n * floor >= available:
        return [available / n] * n
    total = sum(weights)
    if total <= 0.0:
        weights = [1.0] * n
        total = float(n)
    widths = [available * w / total for w in weights]
    # pin floor violators, proportionally rescale the rest until stable
    pinned = [False] * n
    while True:
        changed = False
        for i, w in enumerate(widths):
            if not pinned[i] and w < floor:
                pinned[i] = True
                changed = True
        if not changed:
            break
        left = available - floor * sum(pinned)
        free_total = sum(weights[i] for i in range(n) if not pinned[i])
        for i in range(n):
            widths[i] = (floor if pinned[i]
                         else left * weights[i] / free_total)
    return widths


def circular_layout(agg: AggregatedNetwork,
                    weight_scheme: str | None = None) -> SectorLayout:
    """Sectors in canonical label order, angular width by the chosen weight
    scheme, chords connecting sector midpoints."""
    scheme = weight_scheme or agg.grouping.weight_scheme
    if scheme not in WEIGHT_SCHEMES:
        raise UsageError(f"weight_scheme must be one of {WEIGHT_SCHEMES}")
    layout = SectorLayout(sectors=[], chords=[])
    if not agg.nodes:
        return layout

    if scheme == "uniform":
        weights = [1.0] * len(agg.nodes)
    elif scheme == "node_count":
        weights = [float(n.node_count) for n in agg.nodes]
    else:
        weights = [float(n.ship_count) for n in agg.nodes]

    n = len(agg.nodes)
    available = 2.0 * math.pi - n * layout.gap_radians
    if available <= 0.0:
        raise UsageError(f"too many aggregated nodes ({n}) for the circle")
    widths = _sector_widths(weights, available, layout.floor_radians)

    angle = 0.0
    midpoint: dict[tuple[str, ...], float] = {}
    for node, width in zip(agg.nodes, widths):
        sector = Sector(layers=node.layers, label=node.label,
                        start_angle=angle, end_angle=angle + width)
        layout.sectors.append(sector)
        midpoint[node.layers] = sector.midpoint
        angle = sector.end_angle + layout.gap_radians

    for (src, dst) in sorted(agg.edges, key=lambda k: (
            _sort_key(k[0], agg.sentinel), _sort_key(k[1], agg.sentinel))):
        layout.chords.append(Chord(
            src_label=layers_label(src), dst_label=layers_label(dst),
            src_angle=midpoint[src], dst_angle=midpoint[dst],
            weight=agg.edges[(src, dst)], intra=src[0] == dst[0]))
    return layout
