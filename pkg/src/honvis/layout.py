"""Geometry for the three graphical views.

Everything is deterministic under fixed seed and parameters; rendering
concerns (splines, colors, projections) stay client-side, this module only
emits coordinates and control points.

Dependency-view coordinate conventions: middle rectangles sit at x=0 with
integer y slots growing downward (slot 0 is the top row); left circles sit
at x = column - n_columns, so column 0 (the oldest visits) is farthest from
the rectangles; right circles sit at x=+1.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from .analytics import NodeMetrics, out_distribution
from .errors import UsageError
from .honbuild import HigherOrderNetwork


# --- force-directed scatter -----------------------------------------------

@dataclass
class ScatterLayout:
    coords: dict[int, tuple[float, float]]
    seed: int
    iterations: int


def force_layout(hon: HigherOrderNetwork, seed: int,
                 iterations: int = 500) -> ScatterLayout:
    """Spring-electric layout: weight-proportional attraction along edges,
    uniform pairwise repulsion, linearly cooled step cap, then min-max
    normalization into the unit square."""
    n = len(hon.nodes)
    if n == 0:
        raise UsageError("cannot lay out an empty network")
    rng = random.Random(seed)
    pos = np.array([[rng.random(), rng.random()] for _ in range(n)])
    if n == 1:
        return ScatterLayout(coords={hon.nodes[0].node_id: (0.5, 0.5)},
                             seed=seed, iterations=iterations)

    src = np.array([s for s, _ in hon.edges], dtype=np.int64)
    dst = np.array([d for _, d in hon.edges], dtype=np.int64)
    w = np.array([e.weight for e in hon.edges.values()], dtype=np.float64)
    w_scale = w / w.max() if len(w) else w

    k = math.sqrt(1.0 / n)
    t0 = 0.1
    for it in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((delta ** 2).sum(axis=2))
        np.fill_diagonal(dist, 1.0)
        dist = np.maximum(dist, 1e-9)
        # repulsion k^2/d, on every pair
        disp = (delta / dist[:, :, None] * (k * k / dist)[:, :, None]).sum(axis=1)
        if len(src):
            evec = pos[src] - pos[dst]
            edist = np.maximum(np.sqrt((evec ** 2).sum(axis=1)), 1e-9)
            pull = (edist / k) * w_scale
            f = evec / edist[:, None] * pull[:, None]
            np.add.at(disp, src, -f)
            np.add.at(disp, dst, f)
        length = np.maximum(np.sqrt((disp ** 2).sum(axis=1)), 1e-9)
        temp = t0 * (1.0 - it / iterations)
        step = np.minimum(length, temp)
        pos += disp / length[:, None] * step[:, None]

    lo, hi = pos.min(axis=0), pos.max(axis=0)
    span = np.where(hi - lo < 1e-12, 1.0, hi - lo)
    norm = (pos - lo) / span
    norm[:, (hi - lo) < 1e-12] = 0.5
    coords = {node.node_id: (float(norm[i, 0]), float(norm[i, 1]))
              for i, node in enumerate(hon.nodes)}
    return ScatterLayout(coords=coords, seed=seed, iterations=iterations)


# --- dependency view --------------------------------------------------------

@dataclass
class RectSlot:
    node_id: int
    port: str
    order: int
    y_slot: int
    entropy_norm: float
    kld_norm: float


@dataclass
class LeftCircle:
    port_id: str
    column: int
    y: float


@dataclass
class RightCircle:
    port_id: str
    y: float
    y_est: float


@dataclass
class DepEdge:
    node_id: int
    next_port: str
    probability: float
    ship_count: int


@dataclass
class DependencyLayout:
    middle: list[RectSlot] = field(default_factory=list)
    left: list[LeftCircle] = field(default_factory=list)
    right: list[RightCircle] = field(default_factory=list)
    edges: list[DepEdge] = field(default_factory=list)
    curves: dict[int, list[tuple[float, float]]] = field(default_factory=dict)
    right_order_mode: str = "rank"


def dependency_layout(hon: HigherOrderNetwork,
                      metrics: dict[int, NodeMetrics],
                      focus: set[int] | list[int],
                      min_prob: float = 0.0,
                      min_ships: int = 0,
                      right_order_mode: str = "rank",
                      right_values: dict[str, float | str] | None = None
                      ) -> DependencyLayout:
    """Positions for one focus set: middle rectangles grouped by current
    port, highest order on top; left circles at the earliest (oldest-first)
    position each previous port occupies across the focus; right circles
    rank-ordered by probability-weighted mean rectangle height, evenly
    spaced; one curve per node, previous-port circles oldest-first.
    """
    layout = DependencyLayout(right_order_mode=right_order_mode)
    focus = sorted(set(focus))
    if not focus:
        return layout
    for nid in focus:
        if not 0 <= nid < len(hon.nodes):
            raise UsageError(f"unknown node id {nid}")

    # middle: group by current port, high order on top, stable by context
    def slot_key(nid: int):
        node = hon.nodes[nid]
        return (node.port, -node.order, node.context)

    rect_y: dict[int, int] = {}
    for slot, nid in enumerate(sorted(focus, key=slot_key)):
        node = hon.nodes[nid]
        m = metrics.get(nid)
        layout.middle.append(RectSlot(
            node_id=nid, port=node.port, order=node.order, y_slot=slot,
            entropy_norm=m.entropy_norm if m else 0.0,
            kld_norm=m.kld_norm if m else 0.0))
        rect_y[nid] = slot

    # left: one circle per previous port at its minimum oldest-first position
    col: dict[str, int] = {}
    containing: dict[str, set[int]] = {}
    for nid in focus:
        ctx = hon.nodes[nid].context
        k = len(ctx)
        for recent_idx in range(1, k):
            port = ctx[recent_idx]
            oldest_first = k - 1 - recent_idx
            col[port] = min(col.get(port, oldest_first), oldest_first)
            containing.setdefault(port, set()).add(nid)
    circles = [LeftCircle(port_id=p, column=c,
                          y=sum(rect_y[n] for n in containing[p]) / len(containing[p]))
               for p, c in col.items()]
    circles.sort(key=lambda c: (c.column, c.y, c.port_id))
    # cascade coincident circles within a column apart, one slot each
    by_col: dict[int, list[LeftCircle]] = {}
    for c in circles:
        by_col.setdefault(c.column, []).append(c)
    for group in by_col.values():
        group.sort(key=lambda c: (c.y, c.port_id))
        for i in range(1, len(group)):
            if group[i].y <= group[i - 1].y + 1e-9:
                group[i].y = group[i - 1].y + 1.0
    layout.left = sorted(circles, key=lambda c: (c.column, c.y, c.port_id))

    # edges, filtered; estimates use the unfiltered distribution
    est_num: dict[str, float] = {}
    est_den: dict[str, float] = {}
    surviving: set[str] = set()
    for nid in focus:
        dist = out_distribution(hon, nid, "port")
        ships: dict[str, int] = {}
        for succ, stats in hon.out_edges(nid).items():
            port = hon.current_port(succ)
            ships[port] = ships.get(port, 0) + stats.weight
        for port, p in sorted(dist.probs.items()):
            est_num[port] = est_num.get(port, 0.0) + rect_y[nid] * p
            est_den[port] = est_den.get(port, 0.0) + p
            if p >= min_prob and ships[port] >= min_ships:
                layout.edges.append(DepEdge(node_id=nid, next_port=port,
                                            probability=p,
                                            ship_count=ships[port]))
                surviving.add(port)

    # right: evenly spaced over the middle's vertical extent
    if surviving:
        y_est = {p: est_num[p] / est_den[p] for p in surviving}
        if right_order_mode == "rank":
            ordered = sorted(surviving, key=lambda p: (y_est[p], p))
        else:
            values = right_values or {}
            # missing values sort last without mixing types in comparisons
            ordered = sorted(surviving,
                             key=lambda p: (p not in values, values.get(p, 0), p))
        height = max(len(layout.middle) - 1, 0)
        m = len(ordered)
        for i, port in enumerate(ordered):
            y = height / 2.0 if m == 1 else height * i / (m - 1)
            layout.right.append(RightCircle(port_id=port, y=y, y_est=y_est[port]))

    # curves: previous-port circles oldest-first, ending at the rectangle;
    # column 0 holds the oldest visits, so it sits farthest left
    n_cols = max((c.column for c in layout.left), default=-1) + 1
    circle_pos = {c.port_id: (c.column - float(n_cols), c.y) for c in layout.left}
    for nid in focus:
        ctx = hon.nodes[nid].context
        points = [circle_pos[p] for p in reversed(ctx[1:])]
        points.append((0.0, float(rect_y[nid])))
        layout.curves[nid] = points
    return layout


# --- force-directed edge bundling -------------------------------------------

@dataclass
class BundledChords:
    polylines: list[list[tuple[float, float]]]
    cycles: int
    compatibility: float
    step: float


def _compatibility(p: np.ndarray, q: np.ndarray) -> float:
    """Holten-style product of angle, scale, position, visibility terms."""
    v1, v2 = p[1] - p[0], q[1] - q[0]
    l1, l2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if l1 < 1e-12 or l2 < 1e-12:
        return 0.0
    angle = abs(float(np.dot(v1, v2)) / (l1 * l2))
    lavg = (l1 + l2) / 2.0
    scale = 2.0 / (lavg / min(l1, l2) + max(l1, l2) / lavg)
    m1, m2 = (p[0] + p[1]) / 2.0, (q[0] + q[1]) / 2.0
    position = lavg / (lavg + float(np.linalg.norm(m1 - m2)))

    def visibility(a, b):
        ab = a[1] - a[0]
        denom = float(np.dot(ab, ab))
        if denom < 1e-12:
            return 0.0
        t0 = float(np.dot(b[0] - a[0], ab)) / denom
        t1 = float(np.dot(b[1] - a[0], ab)) / denom
        i0, i1 = a[0] + t0 * ab, a[0] + t1 * ab
        im = (i0 + i1) / 2.0
        den = float(np.linalg.norm(i0 - i1))
        if den < 1e-12:
            return 1.0
        am = (a[0] + a[1]) / 2.0
        return max(0.0, 1.0 - 2.0 * float(np.linalg.norm(am - im)) / den)

    vis = min(visibility(np.array([p[0], p[1]]), np.array([q[0], q[1]])),
              visibility(np.array([q[0], q[1]]), np.array([p[0], p[1]])))
    return angle * scale * position * vis


def bundle_edges(chords: list[tuple[tuple[float, float], tuple[float, float]]],
                 cycles: int = 6, initial_subdivisions: int = 1,
                 compatibility: float = 0.6,
                 step: float = 0.04) -> BundledChords:
    """Force-directed edge bundling with pinned endpoints.

    Subdivision points double each cycle while the step size halves; only
    chord pairs whose compatibility clears the threshold attract each other.
    """
    result = BundledChords(polylines=[], cycles=cycles,
                           compatibility=compatibility, step=step)
    n = len(chords)
    if n == 0:
        return result
    endpoints = [np.array([list(a), list(b)], dtype=float) for a, b in chords]
    compat = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            c = _compatibility(endpoints[i], endpoints[j])
            compat[i, j] = compat[j, i] = c

    # polyline per chord, endpoints always rows 0 and -1
    lines = [np.linspace(e[0], e[1], initial_subdivisions + 2) for e in endpoints]
    lengths = np.array([float(np.linalg.norm(e[1] - e[0])) for e in endpoints])

    s = step
    iterations = 50
    for cycle in range(cycles):
        if cycle > 0:
            lines = [_resubdivide(line) for line in lines]
            s /= 2.0
            iterations = max(int(iterations * 2 / 3), 5)
        pts = (lines[0].shape[0] - 2) if lines else 0
        if pts == 0:
            continue
        stiffness = np.where(lengths > 1e-12,
                             0.1 / (lengths * (pts + 1)), 0.0)
        for _ in range(iterations):
            stacked = np.stack(lines)  # (n, pts+2, 2)
            forces = np.zeros_like(stacked)
            inner = stacked[:, 1:-1, :]
            spring = (stacked[:, :-2, :] - inner) + (stacked[:, 2:, :] - inner)
            forces[:, 1:-1, :] += spring * stiffness[:, None, None]
            for i in range(n):
                for j in range(n):
                    if i == j or compat[i, j] < compatibility:
                        continue
                    diff = stacked[j, 1:-1, :] - inner[i]
                    d = np.maximum(np.sqrt((diff ** 2).sum(axis=1)), 1e-9)
                    forces[i, 1:-1, :] += diff / d[:, None] * compat[i, j]
            stacked[:, 1:-1, :] += forces[:, 1:-1, :] * s
            lines = [stacked[i] for i in range(n)]

    for line, e in zip(lines, endpoints):
        line[0], line[-1] = e[0], e[1]
        result.polylines.append([(float(x), float(y)) for x, y in line])
    return result


def _resubdivide(line: np.ndarray) -> np.ndarray:
    """Double the interior point count, evenly along the current polyline."""
    seg = np.sqrt(((line[1:] - line[:-1]) ** 2).sum(axis=1))
    total = float(seg.sum())
    new_count = (line.shape[0] - 2) * 2 + 2
    if total < 1e-12:
        return np.repeat(line[:1], new_count, axis=0)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, total, new_count)
    out = np.empty((new_count, 2))
    j = 0
    for i, t in enumerate(targets):
        while j < len(seg) - 1 and cum[j + 1] < t:
            j += 1
        span = seg[j] if seg[j] > 1e-12 else 1.0
        alpha = (t - cum[j]) / span
        out[i] = line[j] * (1 - alpha) + line[j + 1] * alpha
    out[0], out[-1] = line[0], line[-1]
    return out
