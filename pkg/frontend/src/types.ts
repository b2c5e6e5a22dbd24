// Payload shapes for the honvis HTTP API. These mirror the JSON Schemas
// published by the service under docs/schemas/.

export interface BuildParams {
  max_order: number;
  min_support: number;
  threshold_spec: string;
  max_gap_days: number | null;
}

export interface Summary {
  format_version: string;
  ports: number;
  fon_nodes: number;
  fon_edges: number;
  hon_nodes: number;
  hon_edges: number;
  max_order: number;
  total_transitions: number;
  build_params: BuildParams;
  has_analytics: boolean;
  has_layout: boolean;
}

export interface PortRow {
  port_id: string;
  name: string | null;
  lat: number | null;
  lon: number | null;
  country: string | null;
  eco_realm: string | null;
  temperature: number | null;
  salinity: number | null;
  freshwater: boolean | null;
  hon_count: number;
  fon_pagerank: number | null;
  hon_pagerank: number | null;
  pagerank_delta: number | null;
}

export interface PortList {
  total: number;
  offset: number;
  limit: number;
  ports: PortRow[];
}

export interface HonNodeInfo {
  node_id: number;
  label: string;
  order: number;
  entropy_bits: number;
  kld_bits: number;
  entropy_norm: number;
  kld_norm: number;
  out_weight: number;
  in_weight: number;
}

export interface PortDetail extends PortRow {
  hon_nodes: HonNodeInfo[];
  fon_out: Record<string, number>;
  fon_in: Record<string, number>;
}

export interface DepRect {
  node_id: number;
  label: string;
  port: string;
  order: number;
  y_slot: number;
  entropy_norm: number;
  kld_norm: number;
}

export interface DepLeftCircle {
  port_id: string;
  column: number;
  y: number;
}

export interface DepRightCircle {
  port_id: string;
  y: number;
  y_est: number;
}

export interface DepEdge {
  node_id: number;
  next_port: string;
  probability: number;
  ship_count: number;
}

export interface Dependency {
  port_id: string;
  right_order: string;
  middle: DepRect[];
  left: DepLeftCircle[];
  right: DepRightCircle[];
  edges: DepEdge[];
  curves: Record<string, [number, number][]>;
}

export interface Pagerank {
  net: string;
  scores: Record<string, number>;
  node_scores?: Record<string, number> | null;
  damping?: number | null;
  iterations_used?: number | null;
  residual?: number | null;
  converged?: boolean | null;
}

export interface Communities {
  assignment: Record<string, number>;
  modularity: number;
  resolution: number;
  seed: number;
  sizes: Record<string, number>;
}

export interface Layout {
  seed: number;
  iterations: number;
  coords: Record<string, [number, number]>;
}

export interface AggNode {
  layers: string[];
  label: string;
  order: number;
  members: number[];
  node_count: number;
  ship_count: number;
}

export interface Sector {
  layers: string[];
  label: string;
  start_angle: number;
  end_angle: number;
}

export interface Chord {
  src_label: string;
  dst_label: string;
  src_angle: number;
  dst_angle: number;
  weight: number;
  intra: boolean;
}

export interface Aggregation {
  grouping: string;
  attribute: string;
  weight_scheme: string;
  sentinel: string;
  nodes: AggNode[];
  sectors: Sector[];
  chords: Chord[];
  total_edge_weight: number;
  gap_radians: number;
  floor_radians: number;
}

export interface Contributor {
  node_id: number;
  label: string;
  by_community: Record<string, number>;
  total: number;
}

export interface SessionState {
  session_id: string;
  direction: string;
  step_count: number;
  seeds: string[];
  warnings: string[];
  live_seed_count: number;
  mass: Record<string, number>;
  reach: Record<string, number>;
  first_reach_step: Record<string, number>;
  reached_ports: string[];
  top_contributors: Contributor[];
}

export interface StepReport {
  session_id: string;
  step: number;
  newly_reached: string[];
  mass: Record<string, number>;
  reach: Record<string, number>;
  top_contributors: Contributor[];
  reached_ports: string[];
  exhausted: boolean;
}

export interface Histogram {
  src: string;
  dst: string;
  total: number;
  ship_types: Record<string, number>;
  months: Record<string, number>;
}

export interface Deleted {
  deleted: boolean;
}
