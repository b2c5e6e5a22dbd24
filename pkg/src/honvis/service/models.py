"""Request and response bodies for the HTTP API.

These models are the published wire contract: the JSON schemas shipped under
docs/schemas are generated from them, and the test suite holds the two in
sync, so any field change here must be reflected there.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ErrorBody(StrictModel):
    error: str


class BuildParamsModel(StrictModel):
    max_order: int
    min_support: int
    threshold_spec: str
    max_gap_days: float | None = None


class SummaryResponse(StrictModel):
    format_version: str
    ports: int
    fon_nodes: int
    fon_edges: int
    hon_nodes: int
    hon_edges: int
    max_order: int
    total_transitions: int
    build_params: BuildParamsModel
    has_analytics: bool
    has_layout: bool


class PortRow(StrictModel):
    port_id: str
    name: str | None = None
    lat: float | None = None
    lon: float | None = None
    country: str | None = None
    eco_realm: str | None = None
    temperature: float | None = None
    salinity: float | None = None
    freshwater: bool | None = None
    hon_count: int
    fon_pagerank: float
    hon_pagerank: float
    pagerank_delta: float


class PortListResponse(StrictModel):
    total: int
    offset: int
    limit: int
    ports: list[PortRow]


class HonNodeInfo(StrictModel):
    node_id: int
    label: str
    order: int
    entropy_bits: float
    kld_bits: float
    entropy_norm: float
    kld_norm: float
    out_weight: int
    in_weight: int


class PortDetailResponse(PortRow):
    hon_nodes: list[HonNodeInfo]
    fon_out: dict[str, int]
    fon_in: dict[str, int]


class RectModel(StrictModel):
    node_id: int
    label: str
    port: str
    order: int
    y_slot: int
    entropy_norm: float
    kld_norm: float


class LeftCircleModel(StrictModel):
    port_id: str
    column: int
    y: float


class RightCircleModel(StrictModel):
    port_id: str
    y: float
    y_est: float


class DepEdgeModel(StrictModel):
    node_id: int
    next_port: str
    probability: float
    ship_count: int


class DependencyResponse(StrictModel):
    port_id: str
    right_order: str
    middle: list[RectModel]
    left: list[LeftCircleModel]
    right: list[RightCircleModel]
    edges: list[DepEdgeModel]
    curves: dict[str, list[tuple[float, float]]]


class PagerankResponse(StrictModel):
    net: str
    scores: dict[str, float]
    node_scores: dict[str, float] | None = None
    damping: float | None = None
    iterations_used: int | None = None
    residual: float | None = None
    converged: bool | None = None


class CommunitiesResponse(StrictModel):
    assignment: dict[str, int]
    modularity: float
    resolution: float
    seed: int
    sizes: dict[str, int]


class LayoutResponse(StrictModel):
    seed: int
    iterations: int
    coords: dict[str, tuple[float, float]]


class AggNodeModel(StrictModel):
    label: str
    layers: list[str]
    order: int
    node_count: int
    ship_count: int
    members: list[int]


class SectorModel(StrictModel):
    label: str
    layers: list[str]
    start_angle: float
    end_angle: float


class ChordModel(StrictModel):
    src_label: str
    dst_label: str
    src_angle: float
    dst_angle: float
    weight: int
    intra: bool


class AggregationResponse(StrictModel):
    grouping: str
    attribute: str
    weight_scheme: str
    sentinel: str
    nodes: list[AggNodeModel]
    sectors: list[SectorModel]
    chords: list[ChordModel]
    total_edge_weight: int
    gap_radians: float
    floor_radians: float


class SessionCreateRequest(StrictModel):
    seeds: list[str]
    direction: str = "forward"


class ContributorModel(StrictModel):
    node_id: int
    label: str
    by_community: dict[str, int]
    total: int


class SessionStateResponse(StrictModel):
    session_id: str
    direction: str
    step_count: int
    seeds: list[str]
    warnings: list[str]
    live_seed_count: int
    mass: dict[str, float]
    reach: dict[str, float]
    first_reach_step: dict[str, int]
    reached_ports: list[str]
    top_contributors: list[ContributorModel]


class StepReportResponse(StrictModel):
    session_id: str
    step: int
    newly_reached: list[str]
    mass: dict[str, float]
    reach: dict[str, float]
    top_contributors: list[ContributorModel]
    reached_ports: list[str]
    exhausted: bool


class DeleteResponse(StrictModel):
    deleted: bool


class HistogramResponse(StrictModel):
    src: str
    dst: str
    total: int
    ship_types: dict[str, int]
    months: dict[str, int]
