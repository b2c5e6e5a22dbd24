"""Stepwise propagation from seed nodes, forward or backward.

Each step pushes the current mass vector through the node-level transition
probabilities (or their in-weight-normalized reversal) and folds the arriving
mass into a clamped, monotone per-node reach. A node whose reach first
crosses epsilon is newly reached and credits exactly one predecessor: the one
that sent it the most mass, ties to the smallest node id. That single-credit
rule keeps bookkeeping exact: credits = reached nodes - live seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UsageError
from .honbuild import HigherOrderNetwork

EPSILON = 1e-9
MAX_REACHED = 10_000


@dataclass
class SubgraphSession:
    direction: str
    epsilon: float = EPSILON
    max_reached: int = MAX_REACHED
    session_id: str = ""
    step_count: int = 0
    seeds: list[int] = field(default_factory=list)
    mass: dict[int, float] = field(default_factory=dict)
    reach: dict[int, float] = field(default_factory=dict)
    first_reach_step: dict[int, int] = field(default_factory=dict)
    contributions: dict[tuple[int, int], int] = field(default_factory=dict)
    communities: dict[int, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    live_seed_count: int = 0
    _reached: set[int] = field(default_factory=set)

    def reached_nodes(self) -> set[int]:
        return set(self._reached)


@dataclass
class ContributionRow:
    node_id: int
    by_community: dict[int, int]
    total: int


@dataclass
class ContributionTable:
    rows: list[ContributionRow]


@dataclass
class StepReport:
    step: int
    newly_reached: list[int]
    mass: dict[int, float]
    reach: dict[int, float]
    top_contributors: ContributionTable
    reached_ports: set[str]
    exhausted: bool = False


def _seed_weight(hon: HigherOrderNetwork, node: int, direction: str) -> float:
    if direction == "forward":
        return float(hon.out_weight(node))
    return float(hon.in_weight(node))


def init_session(hon: HigherOrderNetwork, seeds: set[int] | list[int],
                 direction: str,
                 epsilon: float = EPSILON,
                 communities: dict[int, int] | None = None,
                 max_reached: int = MAX_REACHED) -> SubgraphSession:
    """Start a session with seed mass proportional to out-weight (forward)
    or in-weight (backward), normalized over the seeds."""
    if direction not in ("forward", "backward"):
        raise UsageError(f"direction must be forward or backward, got {direction!r}")
    seed_list = sorted(set(seeds))
    if not seed_list:
        raise UsageError("need at least one seed node")
    for s in seed_list:
        if not 0 <= s < len(hon.nodes):
            raise UsageError(f"unknown node id {s}")

    session = SubgraphSession(direction=direction, epsilon=epsilon,
                              max_reached=max_reached, seeds=seed_list,
                              communities=dict(communities or {}))
    weights = {s: _seed_weight(hon, s, direction) for s in seed_list}
    total = sum(weights.values())
    for s in seed_list:
        if weights[s] == 0.0:
            session.warnings.append(
                f"seed {hon.nodes[s].label} has no "
                f"{'outgoing' if direction == 'forward' else 'incoming'} weight")
            continue
        m = weights[s] / total
        session.mass[s] = m
        session.reach[s] = min(1.0, m)
        if session.reach[s] > epsilon:
            session.first_reach_step[s] = 0
            session._reached.add(s)
            session.live_seed_count += 1
    return session


def _push(hon: HigherOrderNetwork, node: int, direction: str):
    """Yield (neighbor, transition probability) pairs for one node."""
    if direction == "forward":
        out = hon.out_edges(node)
        total = sum(e.weight for e in out.values())
        for succ, stats in out.items():
            yield succ, stats.weight / total
    else:
        inc = hon.in_edges(node)
        total = sum(e.weight for e in inc.values())
        for pred, stats in inc.items():
            yield pred, stats.weight / total


def trace_step(session: SubgraphSession, hon: HigherOrderNetwork) -> StepReport:
    """Advance one step; returns what changed."""
    if not session.mass or all(v == 0.0 for v in session.mass.values()):
        return StepReport(step=session.step_count, newly_reached=[],
                          mass={}, reach=dict(session.reach),
                          top_contributors=top_contributors(session),
                          reached_ports=reached_ports(session, hon),
                          exhausted=True)

    new_mass: dict[int, float] = {}
    best_sender: dict[int, tuple[float, int]] = {}
    # ascending sender order makes the strict > below break ties toward
    # the smallest node id
    for j in sorted(session.mass):
        mj = session.mass[j]
        if mj == 0.0:
            continue
        has_exit = (hon.out_edges(j) if session.direction == "forward"
                    else hon.in_edges(j))
        if not has_exit:
            continue
        for i, p in _push(hon, j, session.direction):
            sent = mj * p
            new_mass[i] = new_mass.get(i, 0.0) + sent
            prev = best_sender.get(i)
            if prev is None or sent > prev[0]:
                best_sender[i] = (sent, j)

    session.mass = new_mass
    session.step_count += 1
    newly: list[int] = []
    for i in sorted(new_mass):
        already = i in session._reached
        session.reach[i] = min(1.0, session.reach.get(i, 0.0) + new_mass[i])
        if not already and session.reach[i] > session.epsilon:
            session._reached.add(i)
            session.first_reach_step.setdefault(i, session.step_count)
            newly.append(i)
            sender = best_sender[i][1]
            key = (sender, session.communities.get(i, 0))
            session.contributions[key] = session.contributions.get(key, 0) + 1

    if len(session._reached) > session.max_reached:
        raise UsageError(
            f"subgraph exceeded {session.max_reached} reached nodes; "
            "narrow your seeds")

    return StepReport(step=session.step_count, newly_reached=newly,
                      mass=dict(new_mass), reach=dict(session.reach),
                      top_contributors=top_contributors(session),
                      reached_ports=reached_ports(session, hon),
                      exhausted=not new_mass)


def top_contributors(session: SubgraphSession, n: int = 20) -> ContributionTable:
    per_node: dict[int, dict[int, int]] = {}
    for (node, community), count in session.contributions.items():
        bucket = per_node.setdefault(node, {})
        bucket[community] = bucket.get(community, 0) + count
    rows = [ContributionRow(node_id=node, by_community=dict(sorted(bc.items())),
                            total=sum(bc.values()))
            for node, bc in per_node.items()]
    rows.sort(key=lambda r: (-r.total, r.node_id))
    return ContributionTable(rows=rows[:n])


def reached_ports(session: SubgraphSession, hon: HigherOrderNetwork) -> set[str]:
    return {hon.current_port(i) for i in session._reached}
