import { Api, ApiError } from "./api.js";
import type {
  Aggregation, Communities, Contributor, Dependency, Histogram, Layout,
  PortDetail, PortList, SessionState, StepReport,
} from "./types.js";

export type Metric = "hon_count" | "pagerank_delta" | "eco_realm";

export interface AggregationSettings {
  grouping: "exact" | "coarse";
  attribute: string;
  weight: string;
  syncSession: boolean;
  hidden: boolean;
}

export interface DependencyFilters {
  minProb: number;
  minShips: number;
  rightOrder: string;
}

/**
 * The single source of truth. Every view renders from this plus the
 * fetched payloads in ViewModel; nothing mutates it except apply().
 */
export interface SelectionState {
  selectedPort: string | null;
  selectedHonNodes: string[];
  selectedPreviousPort: string | null;
  selectedNextPorts: string[];
  activeSessionId: string | null;
  metric: Metric;
  aggregation: AggregationSettings;
  filters: DependencyFilters;
  direction: "forward" | "backward";
}

export function initialState(): SelectionState {
  return {
    selectedPort: null,
    selectedHonNodes: [],
    selectedPreviousPort: null,
    selectedNextPorts: [],
    activeSessionId: null,
    metric: "hon_count",
    aggregation: {
      grouping: "exact",
      attribute: "eco_realm",
      weight: "uniform",
      syncSession: false,
      hidden: false,
    },
    filters: { minProb: 0, minShips: 0, rightOrder: "rank" },
    direction: "forward",
  };
}

export type Action =
  | { kind: "select_port"; port: string }
  | { kind: "select_hon_nodes"; labels: string[] }
  | { kind: "select_previous_port"; port: string | null }
  | { kind: "select_next_ports"; ports: string[] }
  | { kind: "set_metric"; metric: Metric }
  | { kind: "set_filters"; filters: Partial<DependencyFilters> }
  | { kind: "set_aggregation"; settings: Partial<AggregationSettings> }
  | { kind: "set_direction"; direction: "forward" | "backward" }
  | { kind: "clear" };

export function reduce(state: SelectionState, action: Action): SelectionState {
  switch (action.kind) {
    case "select_port":
      // a new focus invalidates every narrower selection under the old one
      return {
        ...state,
        selectedPort: action.port,
        selectedHonNodes: [],
        selectedPreviousPort: null,
        selectedNextPorts: [],
      };
    case "select_hon_nodes":
      return { ...state, selectedHonNodes: [...action.labels] };
    case "select_previous_port":
      return { ...state, selectedPreviousPort: action.port };
    case "select_next_ports":
      return { ...state, selectedNextPorts: [...action.ports] };
    case "set_metric":
      return { ...state, metric: action.metric };
    case "set_filters":
      return { ...state, filters: { ...state.filters, ...action.filters } };
    case "set_aggregation":
      return { ...state, aggregation: { ...state.aggregation, ...action.settings } };
    case "set_direction":
      return { ...state, direction: action.direction };
    case "clear":
      return initialState();
  }
}

/** Previous ports of a context label, most recent first; [] for order 1. */
export function previousPorts(label: string): string[] {
  const bar = label.indexOf("|");
  return bar < 0 ? [] : label.slice(bar + 1).split(", ");
}

export function currentPort(label: string): string {
  const bar = label.indexOf("|");
  return bar < 0 ? label : label.slice(0, bar);
}

export interface Slot<T> {
  generation: number;
  data: T | null;
  error: string | null;
}

export interface ScatterData {
  layout: Layout;
  communities: Communities;
}

export interface TableData {
  rows: PortList;
  detail: PortDetail | null;
}

export interface ViewModel {
  geographic: Slot<PortList>;
  dependency: Slot<Dependency>;
  scatter: Slot<ScatterData>;
  aggregation: Slot<Aggregation>;
  table: Slot<TableData>;
  histograms: Slot<Histogram[]>;
}

function emptySlot<T>(): Slot<T> {
  return { generation: 0, data: null, error: null };
}

export interface SessionOverlay {
  sessionId: string;
  direction: string;
  stepCount: number;
  seeds: string[];
  mass: Record<string, number>;
  reach: Record<string, number>;
  firstReach: Record<string, number>;
  reachedPorts: string[];
  contributors: Contributor[];
  newlyReached: string[];
  exhausted: boolean;
  highlightedContributor: string | null;
}

function overlayFromSession(s: SessionState): SessionOverlay {
  return {
    sessionId: s.session_id,
    direction: s.direction,
    stepCount: s.step_count,
    seeds: [...s.seeds],
    mass: { ...s.mass },
    reach: { ...s.reach },
    firstReach: { ...s.first_reach_step },
    reachedPorts: [...s.reached_ports],
    contributors: [...s.top_contributors],
    newlyReached: [],
    exhausted: false,
    highlightedContributor: null,
  };
}

function message(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  return err instanceof Error ? err.message : String(err);
}

/**
 * Store: state transitions, generation counting, and refetching.
 *
 * Every apply() bumps the generation and refetches; responses carry the
 * generation they were requested under and are dropped when a newer
 * action has taken over. A fetch failure leaves the SelectionState as the
 * action set it and records the error on the view slot (the "error chip").
 */
export class Store {
  state: SelectionState = initialState();
  generation = 0;
  views: ViewModel = {
    geographic: emptySlot(),
    dependency: emptySlot(),
    scatter: emptySlot(),
    aggregation: emptySlot(),
    table: emptySlot(),
    histograms: emptySlot(),
  };
  overlay: SessionOverlay | null = null;

  private nodeIndex = new Map<string, number>();
  private indexedPorts = new Set<string>();
  private listeners: Array<() => void> = [];

  constructor(private readonly api: Api) {}

  onChange(fn: () => void): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) fn();
  }

  nodeIdFor(label: string): number | undefined {
    return this.nodeIndex.get(label);
  }

  async apply(action: Action): Promise<void> {
    let next = reduce(this.state, action);
    if (action.kind === "select_previous_port" && action.port !== null) {
      // narrowing by history also narrows the seed candidates
      const dep = this.views.dependency.data;
      if (dep) {
        next = {
          ...next,
          selectedHonNodes: dep.middle
            .filter((r) => previousPorts(r.label).includes(action.port as string))
            .map((r) => r.label),
        };
      }
    }
    if (action.kind === "clear") {
      if (this.state.activeSessionId) {
        // best effort: an unreachable service just lets the session age out
        this.api.deleteSession(this.state.activeSessionId).catch(() => undefined);
      }
      this.overlay = null;
    }
    this.state = next;
    this.generation += 1;
    await this.refreshAll();
    this.notify();
  }

  async createSession(): Promise<void> {
    if (!this.state.selectedHonNodes.length) {
      throw new Error("select at least one context node first");
    }
    const session = await this.api.createSession(
      this.state.selectedHonNodes, this.state.direction);
    this.overlay = overlayFromSession(session);
    await this.indexLabels(Object.keys(session.reach));
    this.state = { ...this.state, activeSessionId: session.session_id };
    this.generation += 1;
    await this.refreshAll();
    this.notify();
  }

  async traceOnce(): Promise<void> {
    const id = this.state.activeSessionId;
    if (!id || !this.overlay) throw new Error("no active session");
    if (this.overlay.exhausted) return;
    const report: StepReport = await this.api.trace(id);
    const firstReach = { ...this.overlay.firstReach };
    for (const label of report.newly_reached) {
      if (!(label in firstReach)) firstReach[label] = report.step;
    }
    this.overlay = {
      ...this.overlay,
      stepCount: report.step,
      mass: { ...report.mass },
      reach: { ...report.reach },
      firstReach,
      reachedPorts: [...report.reached_ports],
      contributors: [...report.top_contributors],
      newlyReached: [...report.newly_reached],
      exhausted: report.exhausted,
    };
    await this.indexLabels(Object.keys(report.reach));
    if (this.state.aggregation.syncSession) {
      await this.refreshAggregation(this.generation);
    }
    this.notify();
  }

  highlightContributor(label: string | null): void {
    if (!this.overlay) return;
    this.overlay = { ...this.overlay, highlightedContributor: label };
    this.notify();
  }

  /** Labels live in session payloads; coordinates are keyed by node id.
      Port details bridge the two, fetched once per port. */
  private async indexLabels(labels: string[]): Promise<void> {
    const wanted = new Set<string>();
    for (const label of labels) {
      const port = currentPort(label);
      if (!this.indexedPorts.has(port)) wanted.add(port);
    }
    await Promise.all([...wanted].map(async (port) => {
      try {
        const detail = await this.api.portDetail(port);
        for (const n of detail.hon_nodes) this.nodeIndex.set(n.label, n.node_id);
        this.indexedPorts.add(port);
      } catch {
        // unplaceable overlay circles are dropped, not fatal
      }
    }));
  }

  private put<K extends keyof ViewModel>(
    key: K, gen: number, data: ViewModel[K]["data"], error: string | null,
  ): void {
    if (gen !== this.generation) return; // stale: a newer action owns the views
    this.views[key] = { generation: gen, data, error } as ViewModel[K];
  }

  private async refreshAll(): Promise<void> {
    const gen = this.generation;
    await Promise.all([
      this.refreshGeographic(gen),
      this.refreshDependency(gen),
      this.refreshScatter(gen),
      this.refreshAggregation(gen),
      this.refreshTable(gen),
      this.refreshHistograms(gen),
    ]);
  }

  private async refreshGeographic(gen: number): Promise<void> {
    try {
      this.put("geographic", gen, await this.api.ports(), null);
    } catch (err) {
      this.put("geographic", gen, null, message(err));
    }
  }

  private async refreshDependency(gen: number): Promise<void> {
    const port = this.state.selectedPort;
    if (!port) {
      this.put("dependency", gen, null, null);
      return;
    }
    try {
      const dep = await this.api.dependency(port, {
        minProb: this.state.filters.minProb,
        minShips: this.state.filters.minShips,
        rightOrder: this.state.filters.rightOrder,
      });
      this.put("dependency", gen, dep, null);
    } catch (err) {
      this.put("dependency", gen, null, message(err));
    }
  }

  private async refreshScatter(gen: number): Promise<void> {
    try {
      const [layout, communities] = await Promise.all([
        this.api.layout(), this.api.communities(),
      ]);
      this.put("scatter", gen, { layout, communities }, null);
    } catch (err) {
      this.put("scatter", gen, null, message(err));
    }
  }

  private async refreshAggregation(gen: number): Promise<void> {
    const a = this.state.aggregation;
    try {
      const agg = await this.api.aggregation({
        grouping: a.grouping,
        attribute: a.attribute,
        weight: a.weight,
        session: a.syncSession && this.state.activeSessionId
          ? this.state.activeSessionId
          : undefined,
      });
      this.put("aggregation", gen, agg, null);
    } catch (err) {
      this.put("aggregation", gen, null, message(err));
    }
  }

  private async refreshTable(gen: number): Promise<void> {
    try {
      const rows = await this.api.ports({ sort: "name" });
      const detail = this.state.selectedPort
        ? await this.api.portDetail(this.state.selectedPort)
        : null;
      this.put("table", gen, { rows, detail }, null);
    } catch (err) {
      this.put("table", gen, null, message(err));
    }
  }

  private async refreshHistograms(gen: number): Promise<void> {
    const srcs = this.state.selectedHonNodes;
    const dsts = this.state.selectedNextPorts;
    if (!srcs.length || !dsts.length) {
      this.put("histograms", gen, [], null);
      return;
    }
    try {
      const all = await Promise.all(
        srcs.flatMap((src) => dsts.map((dst) => this.api.histogram(src, dst))));
      this.put("histograms", gen, all, null);
    } catch (err) {
      this.put("histograms", gen, null, message(err));
    }
  }
}
