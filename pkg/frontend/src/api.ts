import type {
  Aggregation, Communities, Deleted, Dependency, Histogram, Layout,
  Pagerank, PortDetail, PortList, SessionState, StepReport, Summary,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export type DependencyQuery = {
  minProb?: number;
  minShips?: number;
  rightOrder?: string;
};

export type AggregationQuery = {
  grouping?: string;
  attribute?: string;
  weight?: string;
  session?: string;
};

export type PortsQuery = {
  sort?: string;
  offset?: number;
  limit?: number;
  bbox?: string;
};

function qs(params: Record<string, string | number | undefined>): string {
  const u = new URLSearchParams();
  for (const [k, v] of Object.entries(params)) {
    if (v !== undefined) u.set(k, String(v));
  }
  const s = u.toString();
  return s ? `?${s}` : "";
}

export class Api {
  constructor(
    readonly base: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.base + path, init);
    const payload: unknown = await resp.json().catch(() => null);
    if (!resp.ok) {
      const msg =
        payload && typeof (payload as { error?: unknown }).error === "string"
          ? (payload as { error: string }).error
          : `HTTP ${resp.status}`;
      throw new ApiError(resp.status, msg);
    }
    return payload as T;
  }

  private get<T>(path: string): Promise<T> {
    return this.request<T>("GET", path);
  }

  summary(): Promise<Summary> {
    return this.get("/api/summary");
  }

  ports(q: PortsQuery = {}): Promise<PortList> {
    return this.get(`/api/ports${qs(q)}`);
  }

  portDetail(id: string): Promise<PortDetail> {
    return this.get(`/api/ports/${encodeURIComponent(id)}`);
  }

  dependency(id: string, q: DependencyQuery = {}): Promise<Dependency> {
    return this.get(`/api/ports/${encodeURIComponent(id)}/dependency${qs({
      min_prob: q.minProb,
      min_ships: q.minShips,
      right_order: q.rightOrder,
    })}`);
  }

  pagerank(net: "fon" | "hon" | "delta"): Promise<Pagerank> {
    return this.get(`/api/pagerank${qs({ net })}`);
  }

  communities(): Promise<Communities> {
    return this.get("/api/communities");
  }

  layout(): Promise<Layout> {
    return this.get("/api/layout");
  }

  aggregation(q: AggregationQuery = {}): Promise<Aggregation> {
    return this.get(`/api/aggregation${qs(q)}`);
  }

  createSession(seeds: string[], direction: string): Promise<SessionState> {
    return this.request("POST", "/api/sessions", { seeds, direction });
  }

  session(id: string): Promise<SessionState> {
    return this.get(`/api/sessions/${encodeURIComponent(id)}`);
  }

  deleteSession(id: string): Promise<Deleted> {
    return this.request("DELETE", `/api/sessions/${encodeURIComponent(id)}`);
  }

  trace(id: string): Promise<StepReport> {
    return this.request("POST", `/api/sessions/${encodeURIComponent(id)}/trace`);
  }

  histogram(src: string, dst: string): Promise<Histogram> {
    return this.get(`/api/transitions/histogram${qs({ src, dst })}`);
  }
}
