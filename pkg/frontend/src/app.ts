import { Api } from "./api.js";
import type { Action, Metric } from "./state.js";
import { Store } from "./state.js";
import { renderAggregation } from "./views/aggregation.js";
import { renderDependency } from "./views/dependency.js";
import { renderGeographic } from "./views/geographic.js";
import { renderHistograms } from "./views/histogram.js";
import { renderContributors, renderScatter, traceButtonState } from "./views/scatter.js";
import { renderTable } from "./views/table.js";

function apiBase(): string {
  const param = new URLSearchParams(window.location.search).get("api");
  return param ?? "http://127.0.0.1:8000";
}

const api = new Api(apiBase());
const store = new Store(api);

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

function setStatus(text: string): void {
  byId<HTMLElement>("status").textContent = text;
}

function render(): void {
  byId("view-geographic").innerHTML =
    renderGeographic(store.views.geographic, store.state, store.overlay);
  byId("view-dependency").innerHTML =
    renderDependency(store.views.dependency, store.state);
  byId("view-scatter").innerHTML = renderScatter(
    store.views.scatter, store.overlay, (label) => store.nodeIdFor(label));
  byId("view-contributors").innerHTML = renderContributors(store.overlay);
  byId("view-aggregation").innerHTML =
    renderAggregation(store.views.aggregation, store.state);
  byId("view-table").innerHTML = renderTable(store.views.table);
  byId("view-histograms").innerHTML = renderHistograms(store.views.histograms);

  const trace = byId<HTMLButtonElement>("btn-trace");
  const tb = traceButtonState(store.overlay);
  trace.disabled = tb.disabled;
  trace.title = tb.tooltip ?? "";
  byId<HTMLButtonElement>("btn-session").disabled =
    store.state.selectedHonNodes.length === 0;

  const o = store.overlay;
  setStatus(o
    ? `session ${o.sessionId.slice(0, 8)} step ${o.stepCount}` +
      `${o.exhausted ? " (exhausted)" : ""}`
    : "no session");
}

function dispatch(action: Action): void {
  store.apply(action).catch((err) => setStatus(String(err)));
}

function toggle(list: string[], value: string): string[] {
  return list.includes(value)
    ? list.filter((v) => v !== value)
    : [...list, value];
}

function closest(target: EventTarget | null, selector: string): Element | null {
  return target instanceof Element ? target.closest(selector) : null;
}

function wire(): void {
  byId("view-geographic").addEventListener("click", (ev) => {
    const hit = closest(ev.target, ".port[data-port]");
    if (hit) dispatch({ kind: "select_port", port: hit.getAttribute("data-port") ?? "" });
  });

  byId("view-table").addEventListener("click", (ev) => {
    const row = closest(ev.target, ".port-row[data-port]");
    if (row) {
      dispatch({ kind: "select_port", port: row.getAttribute("data-port") ?? "" });
      return;
    }
    const ctx = closest(ev.target, ".ctx-row[data-label]");
    if (ctx) {
      const label = ctx.getAttribute("data-label") ?? "";
      dispatch({
        kind: "select_hon_nodes",
        labels: toggle(store.state.selectedHonNodes, label),
      });
    }
  });

  byId("view-dependency").addEventListener("click", (ev) => {
    const group = closest(ev.target, ".ctx[data-label]");
    if (group) {
      const label = group.getAttribute("data-label") ?? "";
      dispatch({
        kind: "select_hon_nodes",
        labels: toggle(store.state.selectedHonNodes, label),
      });
      return;
    }
    const prev = closest(ev.target, ".prev-port[data-port]");
    if (prev) {
      const port = prev.getAttribute("data-port") ?? "";
      dispatch({
        kind: "select_previous_port",
        port: store.state.selectedPreviousPort === port ? null : port,
      });
      return;
    }
    const next = closest(ev.target, ".next-port[data-port]");
    if (next) {
      const port = next.getAttribute("data-port") ?? "";
      dispatch({
        kind: "select_next_ports",
        ports: toggle(store.state.selectedNextPorts, port),
      });
    }
  });

  byId("view-contributors").addEventListener("click", (ev) => {
    const bar = closest(ev.target, ".contrib-bar[data-label]");
    if (!bar) return;
    const label = bar.getAttribute("data-label") ?? "";
    store.highlightContributor(
      store.overlay?.highlightedContributor === label ? null : label);
    render();
  });

  byId<HTMLSelectElement>("sel-metric").addEventListener("change", (ev) => {
    const metric = (ev.target as HTMLSelectElement).value as Metric;
    dispatch({ kind: "set_metric", metric });
  });

  byId<HTMLSelectElement>("sel-direction").addEventListener("change", (ev) => {
    const direction = (ev.target as HTMLSelectElement).value === "backward"
      ? "backward" as const : "forward" as const;
    dispatch({ kind: "set_direction", direction });
  });

  byId<HTMLInputElement>("flt-prob").addEventListener("change", (ev) => {
    const v = Number((ev.target as HTMLInputElement).value);
    dispatch({ kind: "set_filters", filters: { minProb: isFinite(v) ? v : 0 } });
  });

  byId<HTMLInputElement>("flt-ships").addEventListener("change", (ev) => {
    const v = Number((ev.target as HTMLInputElement).value);
    dispatch({ kind: "set_filters", filters: { minShips: isFinite(v) ? v : 0 } });
  });

  byId<HTMLSelectElement>("sel-right-order").addEventListener("change", (ev) => {
    dispatch({
      kind: "set_filters",
      filters: { rightOrder: (ev.target as HTMLSelectElement).value },
    });
  });

  byId<HTMLSelectElement>("sel-grouping").addEventListener("change", (ev) => {
    const grouping = (ev.target as HTMLSelectElement).value === "coarse"
      ? "coarse" as const : "exact" as const;
    dispatch({ kind: "set_aggregation", settings: { grouping } });
  });

  byId<HTMLSelectElement>("sel-attribute").addEventListener("change", (ev) => {
    dispatch({
      kind: "set_aggregation",
      settings: { attribute: (ev.target as HTMLSelectElement).value },
    });
  });

  byId<HTMLSelectElement>("sel-weight").addEventListener("change", (ev) => {
    dispatch({
      kind: "set_aggregation",
      settings: { weight: (ev.target as HTMLSelectElement).value },
    });
  });

  byId<HTMLInputElement>("chk-sync").addEventListener("change", (ev) => {
    dispatch({
      kind: "set_aggregation",
      settings: { syncSession: (ev.target as HTMLInputElement).checked },
    });
  });

  byId<HTMLInputElement>("chk-hide-agg").addEventListener("change", (ev) => {
    dispatch({
      kind: "set_aggregation",
      settings: { hidden: (ev.target as HTMLInputElement).checked },
    });
  });

  byId<HTMLButtonElement>("btn-session").addEventListener("click", () => {
    store.createSession().catch((err) => setStatus(String(err)));
  });

  byId<HTMLButtonElement>("btn-trace").addEventListener("click", () => {
    store.traceOnce().catch((err) => setStatus(String(err)));
  });

  byId<HTMLButtonElement>("btn-clear").addEventListener("click", () => {
    dispatch({ kind: "clear" });
  });
}

store.onChange(render);
wire();
dispatch({ kind: "set_metric", metric: "hon_count" }); // initial load
