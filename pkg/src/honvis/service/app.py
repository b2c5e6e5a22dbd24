"""HTTP API over an immutable bundle snapshot.

Every GET answers from the bundle plus lazily computed analytics and layout;
the only mutable state is the subgraph session store. The service is meant
for trusted LANs and ships without authentication.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from ..aggregate import GroupingConfig, aggregate_network, circular_layout
from ..analytics import AnalyticsReport, analytics_report
from ..errors import DataError, UsageError
from ..layout import ScatterLayout, dependency_layout, force_layout
from ..subgraph import (ContributionTable, SubgraphSession, init_session,
                        reached_ports, top_contributors, trace_step)
from . import models
from .bundle import NetworkBundle
from .sessions import SessionStore

PORT_SORTS = ("name", "hon_count", "pagerank_delta")
RIGHT_ORDERS = ("rank", "temperature", "salinity", "eco_realm", "pagerank")
DEFAULT_LAYOUT_SEED = 0


class _ServiceState:
    """Bundle snapshot plus caches; analytics and layout are computed at most
    once per process."""

    def __init__(self, bundle: NetworkBundle, session_capacity: int):
        self.bundle = bundle
        self.store = SessionStore(capacity=session_capacity)
        self._report = bundle.analytics
        self._scatter = bundle.scatter
        self._lock = threading.Lock()

    def report(self) -> AnalyticsReport:
        with self._lock:
            if self._report is None:
                self._report = analytics_report(self.bundle.fon,
                                                self.bundle.hon)
            return self._report

    def scatter(self) -> ScatterLayout:
        with self._lock:
            if self._scatter is None:
                self._scatter = force_layout(self.bundle.hon,
                                             seed=DEFAULT_LAYOUT_SEED)
            return self._scatter

    def has_report(self) -> bool:
        with self._lock:
            return self._report is not None

    def has_scatter(self) -> bool:
        with self._lock:
            return self._scatter is not None


def _parse_bbox(bbox: str) -> tuple[float, float, float, float]:
    parts = bbox.split(",")
    if len(parts) != 4:
        raise HTTPException(400, "bbox must be lon_min,lat_min,lon_max,lat_max")
    try:
        lon0, lat0, lon1, lat1 = (float(p) for p in parts)
    except ValueError:
        raise HTTPException(400, f"bbox has a non-numeric bound: {bbox!r}")
    return lon0, lat0, lon1, lat1


def create_app(bundle: NetworkBundle,
               session_capacity: int = 64) -> FastAPI:
    state = _ServiceState(bundle, session_capacity)
    fon, hon, ports = bundle.fon, bundle.hon, bundle.ports
    app = FastAPI(title="honvis", openapi_url=None, docs_url=None)
    app.state.service = state
    # trusted-LAN service, no auth: the web client may live on any origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(UsageError)
    async def usage_error(request: Request, exc: UsageError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(DataError)
    async def data_error(request: Request, exc: DataError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        return JSONResponse(status_code=exc.status_code,
                            content={"error": str(exc.detail)})

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    def label(node_id: int) -> str:
        return hon.nodes[node_id].label

    def port_row(port: str) -> models.PortRow:
        report = state.report()
        rec = ports.ports.get(port)
        row = models.PortRow(
            port_id=port,
            hon_count=len(hon.nodes_for_port(port)),
            fon_pagerank=report.fon_pagerank.scores.get(port, 0.0),
            hon_pagerank=report.hon_port_pagerank.scores.get(port, 0.0),
            pagerank_delta=report.pagerank_delta.get(port, 0.0))
        if rec is not None:
            row.name, row.lat, row.lon = rec.name, rec.lat, rec.lon
            row.country, row.eco_realm = rec.country, rec.eco_realm
            row.temperature, row.salinity = rec.temperature, rec.salinity
            row.freshwater = rec.freshwater
        return row

    def contributors(table: ContributionTable) -> list[models.ContributorModel]:
        return [models.ContributorModel(
                    node_id=r.node_id, label=label(r.node_id),
                    by_community={str(c): n for c, n in r.by_community.items()},
                    total=r.total)
                for r in table.rows]

    def session_state(session: SubgraphSession) -> models.SessionStateResponse:
        return models.SessionStateResponse(
            session_id=session.session_id,
            direction=session.direction,
            step_count=session.step_count,
            seeds=[label(s) for s in session.seeds],
            warnings=list(session.warnings),
            live_seed_count=session.live_seed_count,
            mass={label(i): m for i, m in sorted(session.mass.items())},
            reach={label(i): r for i, r in sorted(session.reach.items())},
            first_reach_step={label(i): s for i, s
                              in sorted(session.first_reach_step.items())},
            reached_ports=sorted(reached_ports(session, hon)),
            top_contributors=contributors(top_contributors(session)))

    @app.get("/api/summary", response_model=models.SummaryResponse)
    def summary():
        bp = bundle.build_params
        return models.SummaryResponse(
            format_version=bundle.format_version,
            ports=len(ports) if len(ports) else len(fon.nodes),
            fon_nodes=len(fon.nodes),
            fon_edges=len(fon.edges),
            hon_nodes=len(hon.nodes),
            hon_edges=len(hon.edges),
            max_order=hon.max_order(),
            total_transitions=hon.total_weight(),
            build_params=models.BuildParamsModel(
                max_order=bp.max_order, min_support=bp.min_support,
                threshold_spec=bp.threshold_spec,
                max_gap_days=bp.max_gap_days),
            has_analytics=state.has_report(),
            has_layout=state.has_scatter())

    @app.get("/api/ports", response_model=models.PortListResponse)
    def port_list(sort: str = "name", offset: int = Query(0, ge=0),
                  limit: int = Query(100, ge=1, le=10000),
                  bbox: str | None = None):
        if sort not in PORT_SORTS:
            raise HTTPException(400, f"sort must be one of {PORT_SORTS}")
        names = sorted(fon.nodes)
        if bbox is not None:
            lon0, lat0, lon1, lat1 = _parse_bbox(bbox)
            kept = []
            for p in names:
                rec = ports.ports.get(p)
                if rec is not None and lon0 <= rec.lon <= lon1 \
                        and lat0 <= rec.lat <= lat1:
                    kept.append(p)
            names = kept
        rows = [port_row(p) for p in names]
        if sort == "hon_count":
            rows.sort(key=lambda r: (-r.hon_count, r.port_id))
        elif sort == "pagerank_delta":
            rows.sort(key=lambda r: (-r.pagerank_delta, r.port_id))
        return models.PortListResponse(total=len(rows), offset=offset,
                                       limit=limit,
                                       ports=rows[offset:offset + limit])

    def require_port(port_id: str) -> None:
        if port_id not in fon.nodes and port_id not in ports:
            raise HTTPException(404, f"unknown port {port_id!r}")

    @app.get("/api/ports/{port_id}", response_model=models.PortDetailResponse)
    def port_detail(port_id: str):
        require_port(port_id)
        report = state.report()
        row = port_row(port_id)
        infos = []
        for nid in hon.nodes_for_port(port_id):
            m = report.node_metrics[nid]
            infos.append(models.HonNodeInfo(
                node_id=nid, label=label(nid), order=hon.nodes[nid].order,
                entropy_bits=m.entropy_bits, kld_bits=m.kld_bits,
                entropy_norm=m.entropy_norm, kld_norm=m.kld_norm,
                out_weight=hon.out_weight(nid), in_weight=hon.in_weight(nid)))
        fon_out = {d: e.weight for (s, d), e in sorted(fon.edges.items())
                   if s == port_id}
        fon_in = {s: e.weight for (s, d), e in sorted(fon.edges.items())
                  if d == port_id}
        return models.PortDetailResponse(
            **row.model_dump(), hon_nodes=infos,
            fon_out=fon_out, fon_in=fon_in)

    @app.get("/api/ports/{port_id}/dependency",
             response_model=models.DependencyResponse)
    def port_dependency(port_id: str, min_prob: float = Query(0.0, ge=0.0),
                        min_ships: int = Query(0, ge=0),
                        right_order: str = "rank"):
        require_port(port_id)
        if right_order not in RIGHT_ORDERS:
            raise HTTPException(400,
                                f"right_order must be one of {RIGHT_ORDERS}")
        report = state.report()
        values: dict[str, float | str] | None = None
        if right_order in ("temperature", "salinity"):
            values = {p: getattr(r, right_order)
                      for p, r in ports.ports.items()}
        elif right_order == "eco_realm":
            values = {p: r.eco_realm for p, r in ports.ports.items()}
        elif right_order == "pagerank":
            values = dict(report.hon_port_pagerank.scores)
        layout = dependency_layout(hon, report.node_metrics,
                                   hon.nodes_for_port(port_id),
                                   min_prob=min_prob, min_ships=min_ships,
                                   right_order_mode=right_order,
                                   right_values=values)
        return models.DependencyResponse(
            port_id=port_id, right_order=right_order,
            middle=[models.RectModel(node_id=r.node_id, label=label(r.node_id),
                                     port=r.port, order=r.order,
                                     y_slot=r.y_slot,
                                     entropy_norm=r.entropy_norm,
                                     kld_norm=r.kld_norm)
                    for r in layout.middle],
            left=[models.LeftCircleModel(port_id=c.port_id, column=c.column,
                                         y=c.y) for c in layout.left],
            right=[models.RightCircleModel(port_id=c.port_id, y=c.y,
                                           y_est=c.y_est)
                   for c in layout.right],
            edges=[models.DepEdgeModel(node_id=e.node_id,
                                       next_port=e.next_port,
                                       probability=e.probability,
                                       ship_count=e.ship_count)
                   for e in layout.edges],
            curves={str(nid): [(x, y) for x, y in pts]
                    for nid, pts in sorted(layout.curves.items())})

    @app.get("/api/pagerank", response_model=models.PagerankResponse)
    def pagerank_scores(net: str = "fon"):
        report = state.report()
        if net == "fon":
            pr = report.fon_pagerank
            return models.PagerankResponse(
                net=net, scores=dict(sorted(pr.scores.items())),
                damping=pr.damping, iterations_used=pr.iterations_used,
                residual=pr.residual, converged=pr.converged)
        if net == "hon":
            pr = report.hon_port_pagerank
            return models.PagerankResponse(
                net=net, scores=dict(sorted(pr.scores.items())),
                node_scores={str(k): v for k, v
                             in sorted(report.hon_pagerank.scores.items())},
                damping=pr.damping, iterations_used=pr.iterations_used,
                residual=pr.residual, converged=pr.converged)
        if net == "delta":
            return models.PagerankResponse(
                net=net, scores=dict(sorted(report.pagerank_delta.items())))
        raise HTTPException(400, "net must be one of ('fon', 'hon', 'delta')")

    @app.get("/api/communities", response_model=models.CommunitiesResponse)
    def communities():
        c = state.report().communities
        sizes: dict[str, int] = {}
        for cid in c.assignment.values():
            sizes[str(cid)] = sizes.get(str(cid), 0) + 1
        return models.CommunitiesResponse(
            assignment={str(k): v for k, v in sorted(c.assignment.items())},
            modularity=c.modularity, resolution=c.resolution, seed=c.seed,
            sizes=dict(sorted(sizes.items())))

    @app.get("/api/layout", response_model=models.LayoutResponse)
    def layout_endpoint():
        sc = state.scatter()
        return models.LayoutResponse(
            seed=sc.seed, iterations=sc.iterations,
            coords={str(k): v for k, v in sorted(sc.coords.items())})

    @app.get("/api/aggregation", response_model=models.AggregationResponse)
    def aggregation(grouping: str = "exact", attribute: str = "eco_realm",
                    weight: str = "uniform", session: str | None = None):
        config = GroupingConfig.from_ports(ports, attribute=attribute,
                                           mode=grouping, weight_scheme=weight)
        node_filter = None
        if session is not None:
            entry = state.store.get(session)
            if entry is None:
                raise HTTPException(404, f"unknown session {session!r}")
            with entry.lock:
                node_filter = entry.session.reached_nodes()
        agg = aggregate_network(hon, config, node_filter=node_filter)
        sectors = circular_layout(agg, weight_scheme=weight)
        return models.AggregationResponse(
            grouping=grouping, attribute=config.attribute,
            weight_scheme=weight, sentinel=agg.sentinel,
            nodes=[models.AggNodeModel(label=n.label, layers=list(n.layers),
                                       order=n.order, node_count=n.node_count,
                                       ship_count=n.ship_count,
                                       members=sorted(n.members))
                   for n in agg.nodes],
            sectors=[models.SectorModel(label=s.label, layers=list(s.layers),
                                        start_angle=s.start_angle,
                                        end_angle=s.end_angle)
                     for s in sectors.sectors],
            chords=[models.ChordModel(src_label=c.src_label,
                                      dst_label=c.dst_label,
                                      src_angle=c.src_angle,
                                      dst_angle=c.dst_angle,
                                      weight=c.weight, intra=c.intra)
                    for c in sectors.chords],
            total_edge_weight=agg.total_edge_weight(),
            gap_radians=sectors.gap_radians,
            floor_radians=sectors.floor_radians)

    @app.post("/api/sessions", response_model=models.SessionStateResponse,
              status_code=201)
    def create_session(body: models.SessionCreateRequest):
        seed_ids = []
        for lbl in body.seeds:
            node = hon.node_by_label(lbl)
            if node is None:
                raise HTTPException(404, f"unknown node label {lbl!r}")
            seed_ids.append(node.node_id)
        session = init_session(hon, seed_ids, body.direction,
                               communities=state.report().communities.assignment)
        state.store.create(session)
        return session_state(session)

    @app.get("/api/sessions/{session_id}",
             response_model=models.SessionStateResponse)
    def get_session(session_id: str):
        entry = state.store.get(session_id)
        if entry is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        with entry.lock:
            return session_state(entry.session)

    @app.delete("/api/sessions/{session_id}",
                response_model=models.DeleteResponse)
    def delete_session(session_id: str):
        if not state.store.delete(session_id):
            raise HTTPException(404, f"unknown session {session_id!r}")
        return models.DeleteResponse(deleted=True)

    @app.post("/api/sessions/{session_id}/trace",
              response_model=models.StepReportResponse)
    def trace(session_id: str):
        entry = state.store.get(session_id)
        if entry is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        with entry.lock:
            report = trace_step(entry.session, hon)
        return models.StepReportResponse(
            session_id=session_id, step=report.step,
            newly_reached=[label(i) for i in report.newly_reached],
            mass={label(i): m for i, m in sorted(report.mass.items())},
            reach={label(i): r for i, r in sorted(report.reach.items())},
            top_contributors=contributors(report.top_contributors),
            reached_ports=sorted(report.reached_ports),
            exhausted=report.exhausted)

    @app.get("/api/transitions/histogram",
             response_model=models.HistogramResponse)
    def transition_histogram(src: str, dst: str):
        node = hon.node_by_label(src)
        if node is None:
            raise HTTPException(404, f"unknown node label {src!r}")
        if dst not in fon.nodes and dst not in ports:
            raise HTTPException(404, f"unknown port {dst!r}")
        ship_types: dict[str, int] = {}
        months: dict[str, int] = {}
        total = 0
        for succ, stats in hon.out_edges(node.node_id).items():
            if hon.current_port(succ) != dst:
                continue
            total += stats.weight
            for t, n in stats.ship_types.items():
                ship_types[t] = ship_types.get(t, 0) + n
            for m, n in stats.months.items():
                months[str(m)] = months.get(str(m), 0) + n
        return models.HistogramResponse(
            src=src, dst=dst, total=total,
            ship_types=dict(sorted(ship_types.items())),
            months=dict(sorted(months.items())))

    return app
