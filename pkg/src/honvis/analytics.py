"""Node and network metrics over both representations.

Node keys are port ids for a first-order network and integer node ids for a
higher-order one; every function here works on either through a small
adjacency adapter.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import UsageError
from .honbuild import FirstOrderNetwork, HigherOrderNetwork, kl_divergence
from .ingest import TrajectorySet

NodeKey = Hashable


@dataclass
class Distribution:
    """Outcome probabilities; empty with sink=True for nodes with no exits."""

    probs: dict[str, float] = field(default_factory=dict)
    sink: bool = False


@dataclass
class Adjacency:
    keys: list
    index: dict
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    @property
    def n(self) -> int:
        return len(self.keys)

    def out_sums(self) -> np.ndarray:
        out = np.zeros(self.n)
        np.add.at(out, self.src, self.weight)
        return out


def adjacency(network: FirstOrderNetwork | HigherOrderNetwork) -> Adjacency:
    if isinstance(network, FirstOrderNetwork):
        keys = sorted(network.nodes)
        pairs = [(s, d, e.weight) for (s, d), e in network.edges.items()]
    else:
        keys = [node.node_id for node in network.nodes]
        pairs = [(s, d, e.weight) for (s, d), e in network.edges.items()]
    index = {k: i for i, k in enumerate(keys)}
    src = np.array([index[s] for s, _, _ in pairs], dtype=np.int64)
    dst = np.array([index[d] for _, d, _ in pairs], dtype=np.int64)
    weight = np.array([w for _, _, w in pairs], dtype=np.float64)
    return Adjacency(keys, index, src, dst, weight)


# --- transition distributions ------------------------------------------------

def out_distribution(network: FirstOrderNetwork | HigherOrderNetwork,
                     node: NodeKey,
                     projection: str = "port") -> Distribution:
    """Normalized next-step distribution of one node.

    projection="node" keeps successor identities (labels for higher-order
    nodes); projection="port" first folds successors onto their current
    physical port.
    """
    if projection not in ("node", "port"):
        raise UsageError(f"unknown projection {projection!r}")
    if isinstance(network, FirstOrderNetwork):
        if node not in network.nodes:
            raise UsageError(f"unknown node {node!r}")
        masses = {d: float(w) for d, w in network.out_weights(node).items()}
    else:
        if not isinstance(node, int) or not 0 <= node < len(network.nodes):
            raise UsageError(f"unknown node {node!r}")
        masses = {}
        for succ, stats in network.out_edges(node).items():
            key = (network.nodes[succ].label if projection == "node"
                   else network.current_port(succ))
            masses[key] = masses.get(key, 0.0) + stats.weight
    total = sum(masses.values())
    if total == 0:
        return Distribution(probs={}, sink=True)
    return Distribution(probs={k: v / total for k, v in masses.items()})


def first_order_port_distribution(hon: HigherOrderNetwork, port: str) -> Distribution:
    """Next-port distribution of a physical port, folded over all its nodes.

    Mass conservation makes this identical to the first-order network's own
    out-distribution for that port.
    """
    masses: dict[str, float] = {}
    for nid in hon.nodes_for_port(port):
        for succ, stats in hon.out_edges(nid).items():
            dst_port = hon.current_port(succ)
            masses[dst_port] = masses.get(dst_port, 0.0) + stats.weight
    total = sum(masses.values())
    if total == 0:
        return Distribution(probs={}, sink=True)
    return Distribution(probs={k: v / total for k, v in masses.items()})


def _entropy_bits(probs: Iterable[float]) -> float:
    return -sum(p * math.log2(p) for p in probs if p > 0.0)


def node_entropy(network, node: NodeKey) -> float:
    """Shannon entropy (bits) of the physical-port out-distribution."""
    return _entropy_bits(out_distribution(network, node, "port").probs.values())


def node_kld_vs_first_order(hon: HigherOrderNetwork, node: int) -> float:
    """How far a node's next-port distribution sits from its port's
    first-order one. Zero for order-1 nodes by definition."""
    if hon.nodes[node].order == 1:
        return 0.0
    own = out_distribution(hon, node, "port")
    if own.sink:
        return 0.0
    base = first_order_port_distribution(hon, hon.current_port(node))
    return kl_divergence(own.probs, base.probs)


# --- stationary distribution, entropy rate, PageRank -------------------------

@dataclass
class PageRankScores:
    scores: dict
    damping: float
    iterations_used: int
    residual: float
    converged: bool = True


@dataclass
class StationaryResult:
    probs: dict
    teleport: float
    iterations_used: int
    residual: float
    converged: bool = True


def _power_iteration(adj: Adjacency, jump: float, tol: float,
                     max_iter: int) -> tuple[np.ndarray, int, float]:
    """x <- jump/n + (1-jump) * (x P + dangling mass / n), to L1 tolerance."""
    n = adj.n
    out = adj.out_sums()
    dangling = out == 0.0
    norm_w = adj.weight / out[adj.src] if len(adj.weight) else adj.weight
    x = np.full(n, 1.0 / n)
    residual = 0.0
    for it in range(1, max_iter + 1):
        flow = np.zeros(n)
        if len(norm_w):
            np.add.at(flow, adj.dst, x[adj.src] * norm_w)
        flow += x[dangling].sum() / n
        y = jump / n + (1.0 - jump) * flow
        residual = float(np.abs(y - x).sum())
        x = y
        if residual < tol:
            return x, it, residual
    return x, max_iter, residual


def stationary_distribution(network, teleport: float = 0.01) -> StationaryResult:
    if not 0.0 < teleport < 1.0:
        raise UsageError(f"teleport must be in (0,1), got {teleport}")
    adj = adjacency(network)
    if adj.n == 0:
        raise UsageError("empty network has no stationary distribution")
    x, iters, residual = _power_iteration(adj, teleport, tol=1e-10, max_iter=500)
    return StationaryResult(
        probs={k: float(v) for k, v in zip(adj.keys, x)},
        teleport=teleport, iterations_used=iters, residual=residual,
        converged=residual < 1e-10)


def entropy_rate(network, teleport: float = 0.01) -> float:
    """Expected per-step uncertainty: stationary-weighted entropy of the raw
    node-level transition distributions (sinks contribute zero)."""
    pi = stationary_distribution(network, teleport).probs
    rate = 0.0
    for key, mass in pi.items():
        dist = out_distribution(network, key, "node")
        if not dist.sink:
            rate += mass * _entropy_bits(dist.probs.values())
    return rate


def pagerank(network, damping: float = 0.85, tol: float = 1e-10,
             max_iter: int = 200) -> PageRankScores:
    if not 0.0 < damping < 1.0:
        raise UsageError(f"damping must be in (0,1), got {damping}")
    adj = adjacency(network)
    if adj.n == 0:
        raise UsageError("empty network has no PageRank")
    x, iters, residual = _power_iteration(adj, 1.0 - damping, tol, max_iter)
    return PageRankScores(
        scores={k: float(v) for k, v in zip(adj.keys, x)},
        damping=damping, iterations_used=iters, residual=residual,
        converged=residual < tol)


def aggregate_pagerank_by_port(hon_scores: PageRankScores,
                               hon: HigherOrderNetwork) -> PageRankScores:
    by_port: dict[str, float] = {}
    for nid, score in hon_scores.scores.items():
        port = hon.current_port(nid)
        by_port[port] = by_port.get(port, 0.0) + score
    return PageRankScores(scores=by_port, damping=hon_scores.damping,
                          iterations_used=hon_scores.iterations_used,
                          residual=hon_scores.residual,
                          converged=hon_scores.converged)


def pagerank_delta(fon_scores: PageRankScores,
                   hon_port_scores: PageRankScores) -> dict[str, float]:
    """Per-port first-order score minus port-folded higher-order score;
    positive means the first-order view overestimates the port."""
    ports = set(fon_scores.scores) | set(hon_port_scores.scores)
    return {p: fon_scores.scores.get(p, 0.0) - hon_port_scores.scores.get(p, 0.0)
            for p in sorted(ports)}


# --- communities --------------------------------------------------------------

@dataclass
class CommunityAssignment:
    assignment: dict[int, int]
    modularity: float
    resolution: float
    seed: int


def _symmetrized(network) -> tuple[list, dict[int, dict[int, float]]]:
    adj = adjacency(network)
    keys = adj.keys
    sym: dict[int, dict[int, float]] = {i: {} for i in range(adj.n)}
    for s, d, w in zip(adj.src, adj.dst, adj.weight):
        s, d, w = int(s), int(d), float(w)
        sym[s][d] = sym[s].get(d, 0.0) + w
        sym[d][s] = sym[d].get(s, 0.0) + w
    return keys, sym


def _modularity(sym: dict[int, dict[int, float]], comm: dict[int, int],
                resolution: float) -> float:
    two_m = sum(sum(nbrs.values()) for nbrs in sym.values())
    if two_m == 0.0:
        return 0.0
    degree = {i: sum(nbrs.values()) for i, nbrs in sym.items()}
    inside: dict[int, float] = {}
    total: dict[int, float] = {}
    for i, nbrs in sym.items():
        c = comm[i]
        total[c] = total.get(c, 0.0) + degree[i]
        for j, w in nbrs.items():
            if comm[j] == c:
                inside[c] = inside.get(c, 0.0) + w
    q = 0.0
    for c in total:
        q += inside.get(c, 0.0) / two_m - resolution * (total[c] / two_m) ** 2
    return q


def _louvain_pass(sym: dict[int, dict[int, float]], resolution: float,
                  rng: random.Random) -> dict[int, int]:
    """One level of local moving; returns node -> community."""
    nodes = list(sym)
    comm = {i: i for i in nodes}
    degree = {i: sum(nbrs.values()) for i, nbrs in sym.items()}
    two_m = sum(degree.values())
    if two_m == 0.0:
        return comm
    tot = dict(degree)

    order = list(nodes)
    rng.shuffle(order)
    improved = True
    while improved:
        improved = False
        for i in order:
            old = comm[i]
            # weights from i into each neighboring community, i removed
            links: dict[int, float] = {old: 0.0}
            for j, w in sym[i].items():
                if j != i:
                    links[comm[j]] = links.get(comm[j], 0.0) + w
            tot[old] -= degree[i]
            best_c, best_gain = old, (links.get(old, 0.0)
                                      - resolution * degree[i] * tot[old] / two_m)
            for c, w_in in links.items():
                gain = w_in - resolution * degree[i] * tot[c] / two_m
                if gain > best_gain + 1e-12 or (
                        abs(gain - best_gain) <= 1e-12 and c < best_c):
                    best_c, best_gain = c, gain
            tot[best_c] += degree[i]
            comm[i] = best_c
            if best_c != old:
                improved = True
    return comm


def _coarsen(sym: dict[int, dict[int, float]],
             comm: dict[int, int]) -> tuple[dict[int, dict[int, float]], dict[int, int]]:
    cids = sorted(set(comm.values()))
    remap = {c: i for i, c in enumerate(cids)}
    coarse: dict[int, dict[int, float]] = {i: {} for i in range(len(cids))}
    for i, nbrs in sym.items():
        ci = remap[comm[i]]
        for j, w in nbrs.items():
            cj = remap[comm[j]]
            coarse[ci][cj] = coarse[ci].get(cj, 0.0) + w
    return coarse, remap


def detect_communities(network, resolution: float = 1.0,
                       seed: int = 0) -> CommunityAssignment:
    """Greedy modularity optimization on the symmetrized weights.

    Deterministic: node visitation order comes from a seeded shuffle and
    equal-gain moves prefer the smallest community id.
    """
    keys, sym = _symmetrized(network)
    rng = random.Random(seed)
    n = len(keys)
    membership = {i: i for i in range(n)}

    level = sym
    while True:
        comm = _louvain_pass(level, resolution, rng)
        if len(set(comm.values())) == len(level):
            break
        level, remap = _coarsen(level, comm)
        membership = {i: remap[comm[membership[i]]] for i in membership}

    # dense ids in first-appearance order over node index
    dense: dict[int, int] = {}
    assignment: dict[int, int] = {}
    for i in range(n):
        c = membership[i]
        if c not in dense:
            dense[c] = len(dense)
        assignment[keys[i]] = dense[c]
    q = _modularity(sym, {i: assignment[keys[i]] for i in range(n)}, resolution)
    return CommunityAssignment(assignment=assignment, modularity=q,
                               resolution=resolution, seed=seed)


# --- walk simulation and k-gram fidelity --------------------------------------

def simulate_walks(network, n_walks: int, length: int, seed: int) -> list[list[str]]:
    """Seeded random walks emitting physical port sequences.

    Starts are sampled proportionally to node out-weight mass; a walk ends
    early at a sink. Each walk derives its own generator from (seed, index),
    so results are independent of execution order.
    """
    if length < 1 or n_walks < 0:
        raise UsageError("need length >= 1 and n_walks >= 0")
    adj = adjacency(network)
    out = adj.out_sums()

    if isinstance(network, FirstOrderNetwork):
        port_of = {i: k for i, k in enumerate(adj.keys)}
    else:
        port_of = {i: network.current_port(k) for i, k in enumerate(adj.keys)}

    succ: list[list[int]] = [[] for _ in range(adj.n)]
    sw: list[list[float]] = [[] for _ in range(adj.n)]
    for s, d, w in zip(adj.src, adj.dst, adj.weight):
        succ[int(s)].append(int(d))
        sw[int(s)].append(float(w))
    cum = [list(accumulate(ws)) for ws in sw]

    starters = [i for i in range(adj.n) if out[i] > 0.0]
    if not starters and n_walks > 0:
        raise UsageError("network has no outgoing edges to walk on")
    start_cum = list(accumulate(float(out[i]) for i in starters))

    walks = []
    for w_idx in range(n_walks):
        rng = random.Random(hash((seed, w_idx)))
        node = starters[bisect_right(start_cum, rng.random() * start_cum[-1])]
        path = [port_of[node]]
        while len(path) < length:
            c = cum[node]
            if not c:
                break
            node = succ[node][bisect_right(c, rng.random() * c[-1])]
            path.append(port_of[node])
        walks.append(path)
    return walks


def _kgram_counts(sequences: Iterable[Sequence[str]], k: int) -> dict[tuple, int]:
    counts: dict[tuple, int] = {}
    for seq in sequences:
        for i in range(len(seq) - k + 1):
            gram = tuple(seq[i:i + k])
            counts[gram] = counts.get(gram, 0) + 1
    return counts


def _port_sequences(corpus) -> list[list[str]]:
    if isinstance(corpus, TrajectorySet):
        return [t.ports for t in corpus]
    return list(corpus)


def kgram_divergence(walks, reference, k: int = 3) -> float:
    """Jensen-Shannon divergence (base 2, in [0,1]) between the k-gram
    distributions of two corpora of port sequences."""
    a = _kgram_counts(_port_sequences(walks), k)
    b = _kgram_counts(_port_sequences(reference), k)
    if not a or not b:
        raise UsageError(f"corpus too short to form any {k}-grams")
    ta, tb = sum(a.values()), sum(b.values())
    jsd = 0.0
    for gram in set(a) | set(b):
        pa = a.get(gram, 0) / ta
        pb = b.get(gram, 0) / tb
        m = (pa + pb) / 2.0
        if pa > 0.0:
            jsd += 0.5 * pa * math.log2(pa / m)
        if pb > 0.0:
            jsd += 0.5 * pb * math.log2(pb / m)
    return min(max(jsd, 0.0), 1.0)


# --- full report ---------------------------------------------------------------

@dataclass
class NodeMetrics:
    node_id: int
    entropy_bits: float
    kld_bits: float
    entropy_norm: float
    kld_norm: float


@dataclass
class AnalyticsReport:
    node_metrics: dict[int, NodeMetrics]
    fon_pagerank: PageRankScores
    hon_pagerank: PageRankScores
    hon_port_pagerank: PageRankScores
    pagerank_delta: dict[str, float]
    communities: CommunityAssignment
    entropy_rate_fon: float
    entropy_rate_hon: float
    fon_stationary: StationaryResult
    hon_stationary: StationaryResult


def analytics_report(fon: FirstOrderNetwork, hon: HigherOrderNetwork,
                     teleport: float = 0.01, damping: float = 0.85,
                     resolution: float = 1.0, seed: int = 0) -> AnalyticsReport:
    metrics: dict[int, NodeMetrics] = {}
    klds: dict[int, float] = {}
    for node in hon.nodes:
        nid = node.node_id
        dist = out_distribution(hon, nid, "port")
        h = _entropy_bits(dist.probs.values())
        klds[nid] = node_kld_vs_first_order(hon, nid)
        degree = len(dist.probs)
        metrics[nid] = NodeMetrics(
            node_id=nid, entropy_bits=h, kld_bits=klds[nid],
            entropy_norm=h / math.log2(max(2, degree)), kld_norm=0.0)
    max_kld = max(klds.values(), default=0.0)
    if max_kld > 0.0:
        for nid, m in metrics.items():
            m.kld_norm = klds[nid] / max_kld

    fon_pr = pagerank(fon, damping=damping)
    hon_pr = pagerank(hon, damping=damping)
    port_pr = aggregate_pagerank_by_port(hon_pr, hon)
    return AnalyticsReport(
        node_metrics=metrics,
        fon_pagerank=fon_pr,
        hon_pagerank=hon_pr,
        hon_port_pagerank=port_pr,
        pagerank_delta=pagerank_delta(fon_pr, port_pr),
        communities=detect_communities(hon, resolution=resolution, seed=seed),
        entropy_rate_fon=entropy_rate(fon, teleport),
        entropy_rate_hon=entropy_rate(hon, teleport),
        fon_stationary=stationary_distribution(fon, teleport),
        hon_stationary=stationary_distribution(hon, teleport))
