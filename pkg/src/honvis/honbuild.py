"""Construct the first-order network and extract/encode higher-order dependencies.

A context is a tuple of port ids, most recent first: ``(current, prev1,
prev2, ...)``. Order = tuple length; order-1 contexts are plain ports. A
context is rendered as ``current|prev1,prev2,...`` (order-1: just the port).

Extraction keeps a context extension when its next-port distribution diverges
enough (KL, in bits) from its parent's, and rewiring routes every raw
transition between the highest-order retained contexts matching its history,
which conserves total edge mass exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import UsageError
from .ingest import TrajectorySet

Context = tuple[str, ...]

DEFAULT_MAX_ORDER = 5
DEFAULT_MIN_SUPPORT = 5
DEFAULT_THRESHOLD = "dynamic"


def context_label(context: Context) -> str:
    if len(context) == 1:
        return context[0]
    return context[0] + "|" + ", ".join(context[1:])


def parse_context_label(label: str) -> Context:
    if "|" not in label:
        return (label.strip(),)
    cur, rest = label.split("|", 1)
    prevs = [p.strip() for p in rest.split(",")]
    return (cur.strip(), *[p for p in prevs if p])


@dataclass
class EdgeStats:
    """Weight plus per-edge metadata histograms."""

    weight: int = 0
    ship_types: dict[str, int] = field(default_factory=dict)
    months: dict[int, int] = field(default_factory=dict)

    def add(self, ship_type: str, month: int, n: int = 1) -> None:
        self.weight += n
        self.ship_types[ship_type] = self.ship_types.get(ship_type, 0) + n
        self.months[month] = self.months.get(month, 0) + n


@dataclass
class FirstOrderNetwork:
    nodes: set[str] = field(default_factory=set)
    edges: dict[tuple[str, str], EdgeStats] = field(default_factory=dict)

    def edge_weight(self, src: str, dst: str) -> int:
        stats = self.edges.get((src, dst))
        return stats.weight if stats else 0

    def total_weight(self) -> int:
        return sum(e.weight for e in self.edges.values())

    def out_weights(self, node: str) -> dict[str, int]:
        return {d: e.weight for (s, d), e in self.edges.items() if s == node}


def build_fon(trajectories: TrajectorySet) -> FirstOrderNetwork:
    """Count every consecutive port pair across all trajectories."""
    fon = FirstOrderNetwork()
    for traj in trajectories:
        hops = traj.hops
        for i in range(len(hops) - 1):
            a, b = hops[i].port, hops[i + 1].port
            fon.nodes.add(a)
            fon.nodes.add(b)
            stats = fon.edges.get((a, b))
            if stats is None:
                stats = fon.edges[(a, b)] = EdgeStats()
            stats.add(hops[i].ship_type, hops[i].month)
    return fon


@dataclass
class ContextCounts:
    """Observed next-port counts per context, for all orders up to max_order."""

    counts: dict[Context, dict[str, int]] = field(default_factory=dict)
    max_order: int = 1

    def support(self, context: Context) -> int:
        return sum(self.counts.get(context, {}).values())

    def distribution(self, context: Context) -> dict[str, float]:
        nexts = self.counts.get(context, {})
        total = sum(nexts.values())
        if total == 0:
            return {}
        return {p: c / total for p, c in nexts.items()}

    def contexts_of_order(self, order: int) -> list[Context]:
        return [c for c in self.counts if len(c) == order]


def count_contexts(trajectories: TrajectorySet, max_order: int) -> ContextCounts:
    """Count, for every window of length k+1 (k <= max_order), the order-k
    context ending at the window's penultimate port against the window's last
    port."""
    if max_order < 1:
        raise UsageError(f"max_order must be >= 1, got {max_order}")
    cc = ContextCounts(max_order=max_order)
    counts = cc.counts
    for traj in trajectories:
        ports = traj.ports
        n = len(ports)
        for j in range(1, n):
            nxt = ports[j]
            deepest = min(max_order, j)
            for k in range(1, deepest + 1):
                # most-recent-first: current port then the k-1 before it
                ctx = tuple(ports[j - 1 - i] for i in range(k))
                bucket = counts.get(ctx)
                if bucket is None:
                    bucket = counts[ctx] = {}
                bucket[nxt] = bucket.get(nxt, 0) + 1
    return cc


def kl_divergence(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    """KL divergence (bits) of p from q; requires support(p) within support(q)."""
    total = 0.0
    for outcome, pp in p.items():
        if pp == 0.0:
            continue
        qq = q.get(outcome, 0.0)
        if qq <= 0.0:
            raise ValueError(
                f"support violation: outcome {outcome!r} has p={pp} but q=0")
        total += pp * math.log2(pp / qq)
    return max(total, 0.0)


def parse_threshold(spec: str) -> Callable[[int, int], float]:
    """Turn a threshold spec into delta(order, support) in bits.

    ``dynamic``: order / log2(1 + support), which penalizes deep, thinly supported
    candidates. ``fixed:X``: the constant X.
    """
    if spec == "dynamic":
        return lambda order, support: order / math.log2(1 + support)
    if spec.startswith("fixed:"):
        try:
            value = float(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad threshold spec {spec!r}") from None
        return lambda order, support: value
    raise UsageError(f"bad threshold spec {spec!r} (want 'dynamic' or 'fixed:X')")


def extract_dependencies(context_counts: ContextCounts,
                         min_support: int = DEFAULT_MIN_SUPPORT,
                         threshold_spec: str = DEFAULT_THRESHOLD,
                         max_order: int | None = None) -> set[Context]:
    """Select the contexts whose next-port distribution earns its extra order.

    All observed order-1 contexts are retained. An extension of a retained
    context is retained iff its support meets min_support and its KL
    divergence from the parent exceeds delta(order, support). Recursion only
    extends retained contexts, so the result is prefix-closed by construction.
    """
    delta = parse_threshold(threshold_spec)
    if max_order is None:
        max_order = context_counts.max_order
    retained: set[Context] = {c for c in context_counts.counts if len(c) == 1}
    frontier = set(retained)
    for order in range(2, max_order + 1):
        candidates = [c for c in context_counts.contexts_of_order(order)
                      if c[:-1] in frontier]
        next_frontier: set[Context] = set()
        for ctx in candidates:
            support = context_counts.support(ctx)
            if support < min_support:
                continue
            div = kl_divergence(context_counts.distribution(ctx),
                                context_counts.distribution(ctx[:-1]))
            if div > delta(order, support):
                retained.add(ctx)
                next_frontier.add(ctx)
        if not next_frontier:
            break
        frontier = next_frontier
    return retained


@dataclass(frozen=True)
class HonNode:
    node_id: int
    context: Context

    @property
    def label(self) -> str:
        return context_label(self.context)

    @property
    def port(self) -> str:
        return self.context[0]

    @property
    def order(self) -> int:
        return len(self.context)


@dataclass
class BuildParams:
    max_order: int = DEFAULT_MAX_ORDER
    min_support: int = DEFAULT_MIN_SUPPORT
    threshold_spec: str = DEFAULT_THRESHOLD
    max_gap_days: float | None = None


@dataclass
class HigherOrderNetwork:
    nodes: list[HonNode]
    edges: dict[tuple[int, int], EdgeStats]
    build_params: BuildParams
    port_index: dict[str, list[int]] = field(default_factory=dict, compare=False)
    _by_context: dict[Context, int] = field(default_factory=dict, compare=False)
    _by_label: dict[str, int] = field(default_factory=dict, compare=False)
    _out: dict[int, dict[int, EdgeStats]] = field(default_factory=dict, compare=False)
    _in: dict[int, dict[int, EdgeStats]] = field(default_factory=dict, compare=False)

    def finalize(self) -> "HigherOrderNetwork":
        """Rebuild the derived indexes from nodes + edges."""
        self.port_index = {}
        self._by_context = {}
        self._by_label = {}
        self._out = {n.node_id: {} for n in self.nodes}
        self._in = {n.node_id: {} for n in self.nodes}
        for n in self.nodes:
            self.port_index.setdefault(n.port, []).append(n.node_id)
            self._by_context[n.context] = n.node_id
            self._by_label[n.label] = n.node_id
        for (src, dst), stats in self.edges.items():
            self._out[src][dst] = stats
            self._in[dst][src] = stats
        return self

    # --- lookups ---------------------------------------------------------
    def node(self, node_id: int) -> HonNode:
        return self.nodes[node_id]

    def node_by_label(self, label: str) -> HonNode | None:
        nid = self._by_label.get(label)
        return self.nodes[nid] if nid is not None else None

    def node_by_context(self, context: Context) -> int | None:
        return self._by_context.get(context)

    def nodes_for_port(self, port: str) -> list[int]:
        return self.port_index.get(port, [])

    def current_port(self, node_id: int) -> str:
        return self.nodes[node_id].port

    # --- adjacency -------------------------------------------------------
    def out_edges(self, node_id: int) -> dict[int, EdgeStats]:
        return self._out.get(node_id, {})

    def in_edges(self, node_id: int) -> dict[int, EdgeStats]:
        return self._in.get(node_id, {})

    def out_weight(self, node_id: int) -> int:
        return sum(e.weight for e in self.out_edges(node_id).values())

    def in_weight(self, node_id: int) -> int:
        return sum(e.weight for e in self.in_edges(node_id).values())

    def total_weight(self) -> int:
        return sum(e.weight for e in self.edges.values())

    def max_order(self) -> int:
        return max((n.order for n in self.nodes), default=0)


def _match_longest(history: Context, retained: set[Context]) -> Context:
    """Longest retained context that is a prefix of the most-recent-first history."""
    for k in range(len(history), 1, -1):
        if history[:k] in retained:
            return history[:k]
    return history[:1]


def rewire_network(trajectories: TrajectorySet,
                   dependency_set: set[Context],
                   max_order: int,
                   build_params: BuildParams | None = None) -> HigherOrderNetwork:
    """Route every raw transition between the highest-order retained contexts
    matching its history; every transition increments exactly one edge.

    Trajectory heads with insufficient history match shorter contexts, and
    every observed port gets an order-1 node even if nothing routes through
    it.
    """
    contexts: set[Context] = set(dependency_set)
    for traj in trajectories:
        for hop in traj.hops:
            contexts.add((hop.port,))

    ordered = sorted(contexts, key=lambda c: (len(c), c))
    nodes = [HonNode(i, ctx) for i, ctx in enumerate(ordered)]
    by_context = {n.context: n.node_id for n in nodes}
    retained = set(by_context)

    hon = HigherOrderNetwork(
        nodes=nodes, edges={},
        build_params=build_params or BuildParams(max_order=max_order))

    for traj in trajectories:
        hops = traj.hops
        ports = [h.port for h in hops]
        n = len(ports)
        for t in range(n - 1):
            lo = max(0, t - (max_order - 1))
            src_hist = tuple(ports[t - i] for i in range(t - lo + 1))
            lo2 = max(0, t + 1 - (max_order - 1))
            tgt_hist = tuple(ports[t + 1 - i] for i in range(t + 1 - lo2 + 1))
            src = by_context[_match_longest(src_hist, retained)]
            dst = by_context[_match_longest(tgt_hist, retained)]
            stats = hon.edges.get((src, dst))
            if stats is None:
                stats = hon.edges[(src, dst)] = EdgeStats()
            stats.add(hops[t].ship_type, hops[t].month)
    return hon.finalize()


def build_hon(trajectories: TrajectorySet,
              max_order: int = DEFAULT_MAX_ORDER,
              min_support: int = DEFAULT_MIN_SUPPORT,
              threshold_spec: str = DEFAULT_THRESHOLD,
              max_gap_days: float | None = None) -> HigherOrderNetwork:
    """Full pipeline: count contexts, extract dependencies, rewire."""
    counts = count_contexts(trajectories, max_order)
    deps = extract_dependencies(counts, min_support, threshold_spec, max_order)
    params = BuildParams(max_order=max_order, min_support=min_support,
                         threshold_spec=threshold_spec, max_gap_days=max_gap_days)
    return rewire_network(trajectories, deps, max_order, params)
