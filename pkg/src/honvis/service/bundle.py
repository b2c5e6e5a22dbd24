"""Single-file persistence for a built network and its derived products.

The on-disk form is canonical JSON: keys sorted, no whitespace, floats in
shortest round-trip form, one trailing newline. Exporting the same bundle
twice therefore produces byte-identical files, which makes artifacts easy
to diff and cache.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..analytics import (AnalyticsReport, CommunityAssignment, NodeMetrics,
                         PageRankScores, StationaryResult)
from ..errors import DataError
from ..honbuild import (BuildParams, EdgeStats, FirstOrderNetwork,
                        HigherOrderNetwork, HonNode)
from ..ingest import PortRecord, PortTable
from ..layout import ScatterLayout

FORMAT_VERSION = "1"


@dataclass
class NetworkBundle:
    fon: FirstOrderNetwork
    hon: HigherOrderNetwork
    build_params: BuildParams
    ports: PortTable = field(default_factory=PortTable)
    analytics: AnalyticsReport | None = None
    scatter: ScatterLayout | None = None
    format_version: str = FORMAT_VERSION


def validate_bundle(bundle: NetworkBundle) -> None:
    """Referential integrity: every id mentioned anywhere must resolve."""
    n = len(bundle.hon.nodes)
    for i, node in enumerate(bundle.hon.nodes):
        if node.node_id != i:
            raise DataError(f"node list out of order at id {node.node_id}")
    for src, dst in bundle.hon.edges:
        for end in (src, dst):
            if not 0 <= end < n:
                raise DataError(f"edge ({src}, {dst}) references unknown "
                                f"node id {end}")
    for src, dst in bundle.fon.edges:
        for end in (src, dst):
            if end not in bundle.fon.nodes:
                raise DataError(f"edge ({src!r}, {dst!r}) references unknown "
                                f"port {end!r}")
    if bundle.analytics is not None:
        for nid in bundle.analytics.node_metrics:
            if not 0 <= nid < n:
                raise DataError(f"metrics reference unknown node id {nid}")
        for nid in bundle.analytics.communities.assignment:
            if not 0 <= nid < n:
                raise DataError(f"communities reference unknown node id {nid}")
    if bundle.scatter is not None:
        for nid in bundle.scatter.coords:
            if not 0 <= nid < n:
                raise DataError(f"layout references unknown node id {nid}")


# --- dict form ---------------------------------------------------------------

def _edge_dict(src, dst, stats: EdgeStats) -> dict:
    return {"src": src, "dst": dst, "weight": stats.weight,
            "ship_types": dict(sorted(stats.ship_types.items())),
            "months": {str(m): c for m, c in sorted(stats.months.items())}}


def _edge_stats(d: dict) -> EdgeStats:
    return EdgeStats(weight=d["weight"], ship_types=dict(d["ship_types"]),
                     months={int(m): c for m, c in d["months"].items()})


def _rank_dict(scores: PageRankScores) -> dict:
    return {"scores": {str(k): v for k, v in sorted(scores.scores.items())},
            "damping": scores.damping, "iterations_used": scores.iterations_used,
            "residual": scores.residual, "converged": scores.converged}


def _rank_from(d: dict, int_keys: bool) -> PageRankScores:
    key = int if int_keys else str
    return PageRankScores(scores={key(k): v for k, v in d["scores"].items()},
                          damping=d["damping"],
                          iterations_used=d["iterations_used"],
                          residual=d["residual"], converged=d["converged"])


def _stationary_dict(r: StationaryResult) -> dict:
    return {"probs": {str(k): v for k, v in sorted(r.probs.items())},
            "teleport": r.teleport, "iterations_used": r.iterations_used,
            "residual": r.residual, "converged": r.converged}


def _stationary_from(d: dict, int_keys: bool) -> StationaryResult:
    key = int if int_keys else str
    return StationaryResult(probs={key(k): v for k, v in d["probs"].items()},
                            teleport=d["teleport"],
                            iterations_used=d["iterations_used"],
                            residual=d["residual"], converged=d["converged"])


def analytics_to_dict(a: AnalyticsReport) -> dict:
    return {
        "node_metrics": [asdict(m) for _, m in sorted(a.node_metrics.items())],
        "fon_pagerank": _rank_dict(a.fon_pagerank),
        "hon_pagerank": _rank_dict(a.hon_pagerank),
        "hon_port_pagerank": _rank_dict(a.hon_port_pagerank),
        "pagerank_delta": dict(sorted(a.pagerank_delta.items())),
        "communities": {
            "assignment": {str(k): v for k, v
                           in sorted(a.communities.assignment.items())},
            "modularity": a.communities.modularity,
            "resolution": a.communities.resolution,
            "seed": a.communities.seed,
        },
        "entropy_rate_fon": a.entropy_rate_fon,
        "entropy_rate_hon": a.entropy_rate_hon,
        "fon_stationary": _stationary_dict(a.fon_stationary),
        "hon_stationary": _stationary_dict(a.hon_stationary),
    }


def analytics_from_dict(a: dict) -> AnalyticsReport:
    return AnalyticsReport(
        node_metrics={m["node_id"]: NodeMetrics(**m)
                      for m in a["node_metrics"]},
        fon_pagerank=_rank_from(a["fon_pagerank"], int_keys=False),
        hon_pagerank=_rank_from(a["hon_pagerank"], int_keys=True),
        hon_port_pagerank=_rank_from(a["hon_port_pagerank"], int_keys=False),
        pagerank_delta=dict(a["pagerank_delta"]),
        communities=CommunityAssignment(
            assignment={int(k): v
                        for k, v in a["communities"]["assignment"].items()},
            modularity=a["communities"]["modularity"],
            resolution=a["communities"]["resolution"],
            seed=a["communities"]["seed"]),
        entropy_rate_fon=a["entropy_rate_fon"],
        entropy_rate_hon=a["entropy_rate_hon"],
        fon_stationary=_stationary_from(a["fon_stationary"], int_keys=False),
        hon_stationary=_stationary_from(a["hon_stationary"], int_keys=True))


def scatter_to_dict(s: ScatterLayout) -> dict:
    return {"seed": s.seed, "iterations": s.iterations,
            "coords": {str(k): list(v) for k, v in sorted(s.coords.items())}}


def scatter_from_dict(s: dict) -> ScatterLayout:
    return ScatterLayout(
        coords={int(k): (v[0], v[1]) for k, v in s["coords"].items()},
        seed=s["seed"], iterations=s["iterations"])


def bundle_to_dict(bundle: NetworkBundle) -> dict:
    d = {
        "format_version": bundle.format_version,
        "build_params": asdict(bundle.build_params),
        "ports": [asdict(rec) for _, rec in sorted(bundle.ports.ports.items())],
        "fon": {
            "nodes": sorted(bundle.fon.nodes),
            "edges": [_edge_dict(s, t, e) for (s, t), e
                      in sorted(bundle.fon.edges.items())],
        },
        "hon": {
            "nodes": [{"id": n.node_id, "context": list(n.context)}
                      for n in bundle.hon.nodes],
            "edges": [_edge_dict(s, t, e) for (s, t), e
                      in sorted(bundle.hon.edges.items())],
        },
    }
    if bundle.analytics is not None:
        d["analytics"] = analytics_to_dict(bundle.analytics)
    if bundle.scatter is not None:
        d["scatter"] = scatter_to_dict(bundle.scatter)
    return d


def bundle_from_dict(d: dict) -> NetworkBundle:
    found = d.get("format_version")
    if found != FORMAT_VERSION:
        raise DataError(f"bundle format version mismatch: expected "
                        f"{FORMAT_VERSION!r}, found {found!r}")
    fon = FirstOrderNetwork(
        nodes=set(d["fon"]["nodes"]),
        edges={(e["src"], e["dst"]): _edge_stats(e) for e in d["fon"]["edges"]})
    hon = HigherOrderNetwork(
        nodes=[HonNode(n["id"], tuple(n["context"])) for n in d["hon"]["nodes"]],
        edges={(e["src"], e["dst"]): _edge_stats(e) for e in d["hon"]["edges"]},
        build_params=BuildParams(**d["build_params"]))
    ports = PortTable(ports={p["port_id"]: PortRecord(**p) for p in d["ports"]})
    analytics = analytics_from_dict(d["analytics"]) if "analytics" in d else None
    scatter = scatter_from_dict(d["scatter"]) if "scatter" in d else None
    bundle = NetworkBundle(fon=fon, hon=hon,
                           build_params=BuildParams(**d["build_params"]),
                           ports=ports, analytics=analytics, scatter=scatter,
                           format_version=found)
    # integrity before finalize: the index build assumes ids resolve
    validate_bundle(bundle)
    hon.finalize()
    return bundle


def canonical_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False) + "\n"


def export_bundle(bundle: NetworkBundle, path: str | Path) -> None:
    validate_bundle(bundle)
    Path(path).write_text(canonical_json(bundle_to_dict(bundle)),
                          encoding="utf-8")


def import_bundle(path: str | Path) -> NetworkBundle:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"bundle is not valid JSON: {exc}") from exc
    return bundle_from_dict(d)
