import { readFileSync } from "node:fs";
import type { FetchLike } from "../src/api.js";

export function fixture<T>(name: string): T {
  const url = new URL(`./fixtures/${name}.json`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8")) as T;
}

export interface Route {
  method?: string;
  path: string;
  query?: Record<string, string>;
  status?: number;
  body: unknown;
  // resolution gates consumed one per matching request, for staleness tests
  delays?: Array<Promise<void> | null>;
}

export interface RequestRecord {
  method: string;
  path: string;
  query: Record<string, string>;
  body: unknown;
}

export function deferred(): { promise: Promise<void>; resolve: () => void } {
  let resolve!: () => void;
  const promise = new Promise<void>((r) => { resolve = r; });
  return { promise, resolve };
}

export function fakeFetch(routes: Route[], log: RequestRecord[] = []): FetchLike {
  return async (rawUrl, init) => {
    const url = new URL(rawUrl, "http://test.invalid");
    const method = init?.method ?? "GET";
    const query: Record<string, string> = {};
    url.searchParams.forEach((v, k) => { query[k] = v; });
    log.push({
      method,
      path: url.pathname,
      query,
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    const route = routes.find((r) =>
      (r.method ?? "GET") === method &&
      r.path === url.pathname &&
      Object.entries(r.query ?? {}).every(([k, v]) => query[k] === v));
    if (!route) {
      return new Response(
        JSON.stringify({ error: `no route: ${method} ${url.pathname}` }),
        { status: 599, headers: { "content-type": "application/json" } });
    }
    const gate = route.delays?.shift();
    if (gate) await gate;
    return new Response(JSON.stringify(route.body), {
      status: route.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  };
}

export const SESSION_ID =
  fixture<{ session_id: string }>("session_create").session_id;

/** Routes mirroring a live service for the five-port reference network. */
export function referenceRoutes(): Route[] {
  return [
    { path: "/api/summary", body: fixture("summary") },
    { path: "/api/ports", body: fixture("ports") },
    { path: "/api/ports/A", body: fixture("port_detail_A") },
    { path: "/api/ports/B", body: fixture("port_detail_B") },
    { path: "/api/ports/M", body: fixture("port_detail_M") },
    { path: "/api/ports/X", body: fixture("port_detail_X") },
    { path: "/api/ports/Y", body: fixture("port_detail_Y") },
    { path: "/api/ports/M/dependency", body: fixture("dependency_M") },
    { path: "/api/pagerank", query: { net: "fon" }, body: fixture("pagerank_fon") },
    { path: "/api/pagerank", query: { net: "hon" }, body: fixture("pagerank_hon") },
    { path: "/api/pagerank", query: { net: "delta" }, body: fixture("pagerank_delta") },
    { path: "/api/communities", body: fixture("communities") },
    { path: "/api/layout", body: fixture("layout") },
    { path: "/api/aggregation", body: fixture("aggregation") },
    { method: "POST", path: "/api/sessions", status: 201, body: fixture("session_create") },
    { path: `/api/sessions/${SESSION_ID}`, body: fixture("session_after_step") },
    {
      method: "POST",
      path: `/api/sessions/${SESSION_ID}/trace`,
      body: fixture("step_1"),
    },
    {
      method: "DELETE",
      path: `/api/sessions/${SESSION_ID}`,
      body: { deleted: SESSION_ID },
    },
    {
      path: "/api/transitions/histogram",
      query: { src: "M|A", dst: "X" },
      body: fixture("histogram_MA_X"),
    },
  ];
}
