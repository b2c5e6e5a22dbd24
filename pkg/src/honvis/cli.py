"""Command line front end.

Every subcommand is a thin client over the library: build a bundle from raw
CSVs, derive metrics or a layout from a bundle, or serve a bundle over HTTP.
Progress goes to stderr as one JSON object per line so driving scripts can
follow along; results go to files or stdout.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .aggregate import (ATTRIBUTES, MODES, WEIGHT_SCHEMES, GroupingConfig,
                        aggregate_network, circular_layout)
from .analytics import analytics_report, kgram_divergence, simulate_walks
from .errors import DataError, UsageError
from .honbuild import build_fon, build_hon
from .ingest import build_trajectories, parse_ports, parse_voyages
from .layout import force_layout
from .service.bundle import (FORMAT_VERSION, NetworkBundle, analytics_from_dict,
                             analytics_to_dict, canonical_json, export_bundle,
                             import_bundle, scatter_from_dict, scatter_to_dict)
from .subgraph import init_session, trace_step


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; the contract reserves 2 for
    data errors, so usage failures are rethrown and mapped to 1."""

    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _progress(event: str, **fields) -> None:
    print(json.dumps({"event": event, **fields}, sort_keys=True),
          file=sys.stderr)


def _load_versioned(path: str, key: str) -> dict:
    try:
        payload = json.loads(open(path, encoding="utf-8").read())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc
    found = payload.get("format_version")
    if found != FORMAT_VERSION:
        raise DataError(f"{path}: format version mismatch: expected "
                        f"{FORMAT_VERSION!r}, found {found!r}")
    if key not in payload:
        raise DataError(f"{path}: missing {key!r} section")
    return payload[key]


def cmd_build(args) -> int:
    ports = parse_ports(args.ports)
    _progress("ports_parsed", count=len(ports))
    voyages = parse_voyages(args.voyages, ports)
    _progress("voyages_parsed", accepted=len(voyages.voyages),
              rejected=len(voyages.rejects))
    trajectories = build_trajectories(voyages, max_gap_days=args.max_gap_days)
    _progress("trajectories_built", count=len(trajectories.trajectories),
              transitions=trajectories.total_transitions())
    hon = build_hon(trajectories, max_order=args.max_order,
                    min_support=args.min_support,
                    threshold_spec=args.threshold,
                    max_gap_days=args.max_gap_days)
    fon = build_fon(trajectories)
    _progress("networks_built", fon_nodes=len(fon.nodes),
              fon_edges=len(fon.edges), hon_nodes=len(hon.nodes),
              hon_edges=len(hon.edges), max_order=hon.max_order())
    bundle = NetworkBundle(fon=fon, hon=hon, build_params=hon.build_params,
                           ports=ports)
    export_bundle(bundle, args.out)
    _progress("bundle_written", path=args.out)
    return 0


def cmd_analyze(args) -> int:
    bundle = import_bundle(args.bundle)
    _progress("bundle_loaded", hon_nodes=len(bundle.hon.nodes))
    report = analytics_report(bundle.fon, bundle.hon, teleport=args.teleport,
                              damping=args.damping,
                              resolution=args.resolution, seed=args.seed)
    _progress("analytics_computed",
              entropy_rate_fon=report.entropy_rate_fon,
              entropy_rate_hon=report.entropy_rate_hon,
              modularity=report.communities.modularity)
    payload = {"format_version": FORMAT_VERSION,
               "analytics": analytics_to_dict(report)}
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(payload))
    _progress("metrics_written", path=args.out)
    return 0


def cmd_layout(args) -> int:
    bundle = import_bundle(args.bundle)
    scatter = force_layout(bundle.hon, seed=args.seed,
                           iterations=args.iterations)
    payload = {"format_version": FORMAT_VERSION,
               "scatter": scatter_to_dict(scatter)}
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(payload))
    _progress("layout_written", path=args.out, seed=args.seed)
    return 0


def cmd_trace(args) -> int:
    bundle = import_bundle(args.bundle)
    hon = bundle.hon
    seed_ids = []
    for label in args.seed_node:
        node = hon.node_by_label(label)
        if node is None:
            raise UsageError(f"unknown node label {label!r}")
        seed_ids.append(node.node_id)
    communities = (bundle.analytics.communities.assignment
                   if bundle.analytics else None)
    session = init_session(hon, seed_ids, args.direction,
                           communities=communities)
    for warning in session.warnings:
        _progress("warning", message=warning)
    for _ in range(args.steps):
        report = trace_step(session, hon)
        print(json.dumps({
            "step": report.step,
            "newly_reached": [hon.nodes[i].label for i in report.newly_reached],
            "mass": {hon.nodes[i].label: m
                     for i, m in sorted(report.mass.items())},
            "reach": {hon.nodes[i].label: r
                      for i, r in sorted(report.reach.items())},
            "reached_ports": sorted(report.reached_ports),
            "top_contributors": [
                {"node": hon.nodes[r.node_id].label, "total": r.total,
                 "by_community": {str(c): n
                                  for c, n in r.by_community.items()}}
                for r in report.top_contributors.rows],
            "exhausted": report.exhausted,
        }, sort_keys=True))
        if report.exhausted:
            break
    return 0


def cmd_aggregate(args) -> int:
    bundle = import_bundle(args.bundle)
    grouping = GroupingConfig.from_ports(bundle.ports, attribute=args.attribute,
                                         mode=args.grouping,
                                         weight_scheme=args.weight)
    agg = aggregate_network(bundle.hon, grouping)
    layout = circular_layout(agg)
    print(canonical_json({
        "sentinel": agg.sentinel,
        "total_edge_weight": agg.total_edge_weight(),
        "nodes": [{"label": n.label, "layers": list(n.layers),
                   "node_count": n.node_count, "ship_count": n.ship_count,
                   "members": sorted(n.members)} for n in agg.nodes],
        "sectors": [{"label": s.label, "start_angle": s.start_angle,
                     "end_angle": s.end_angle} for s in layout.sectors],
        "chords": [{"src": c.src_label, "dst": c.dst_label,
                    "src_angle": c.src_angle, "dst_angle": c.dst_angle,
                    "weight": c.weight, "intra": c.intra}
                   for c in layout.chords],
    }), end="")
    return 0


def cmd_simulate(args) -> int:
    bundle = import_bundle(args.bundle)
    hon_walks = simulate_walks(bundle.hon, args.walks, args.length, args.seed)
    fon_walks = simulate_walks(bundle.fon, args.walks, args.length, args.seed)
    _progress("walks_simulated", walks=args.walks, length=args.length)
    jsd = kgram_divergence(hon_walks, fon_walks, k=args.k)
    print(json.dumps({"walks": args.walks, "length": args.length,
                      "seed": args.seed, "k": args.k,
                      "hon_vs_fon_jsd_bits": jsd}, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    bundle = import_bundle(args.bundle)
    if args.metrics:
        bundle.analytics = analytics_from_dict(
            _load_versioned(args.metrics, "analytics"))
    if args.layout:
        bundle.scatter = scatter_from_dict(
            _load_versioned(args.layout, "scatter"))
    host, _, port = args.listen.rpartition(":")
    if not host or not port.isdigit():
        raise UsageError(f"--listen must be HOST:PORT, got {args.listen!r}")
    app = create_app(bundle)
    _progress("serving", host=host, port=int(port))
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="honvis",
                     description="Build, analyze, and serve higher-order "
                                 "port networks.")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("build", help="build a bundle from voyage/port CSVs")
    p.add_argument("--voyages", required=True)
    p.add_argument("--ports", required=True)
    p.add_argument("--max-order", type=int, default=5)
    p.add_argument("--min-support", type=int, default=5)
    p.add_argument("--threshold", default="dynamic")
    p.add_argument("--max-gap-days", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("analyze", help="compute metrics for a bundle")
    p.add_argument("bundle")
    p.add_argument("--teleport", type=float, default=0.01)
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--resolution", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("layout", help="compute a force-directed layout")
    p.add_argument("bundle")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("trace", help="step a propagation session")
    p.add_argument("bundle")
    p.add_argument("--seed-node", action="append", required=True,
                   metavar="LABEL")
    p.add_argument("--direction", choices=("forward", "backward"),
                   default="forward")
    p.add_argument("--steps", type=int, default=1)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("aggregate", help="group-level rollup and sectors")
    p.add_argument("bundle")
    p.add_argument("--grouping", choices=MODES, default="exact")
    p.add_argument("--attribute", choices=ATTRIBUTES, default="eco_realm")
    p.add_argument("--weight", choices=WEIGHT_SCHEMES, default="uniform")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("simulate", help="random walks and their divergence")
    p.add_argument("bundle")
    p.add_argument("--walks", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--k", type=int, default=3)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="serve a bundle over HTTP")
    p.add_argument("--bundle", required=True)
    p.add_argument("--metrics", default=None)
    p.add_argument("--layout", default=None)
    p.add_argument("--listen", default="127.0.0.1:8000")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"honvis: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"honvis: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"honvis: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
