import type { Slot, TableData } from "../state.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

function sci(v: number): string {
  return v === 0 ? "0" : v.toExponential(3);
}

export function renderTable(slot: Slot<TableData>): string {
  if (slot.error) {
    return `<div class="error-chip" data-view="table">${esc(slot.error)}</div>`;
  }
  if (!slot.data) return `<div class="placeholder">loading</div>`;
  const { rows, detail } = slot.data;
  const parts: string[] = [];
  parts.push(`<table class="ports"><thead><tr>`);
  parts.push(
    `<th>port</th><th>name</th><th>contexts</th>` +
    `<th>rank</th><th>memoryless rank</th><th>shift</th>`,
  );
  parts.push(`</tr></thead><tbody>`);
  for (const p of rows.ports) {
    parts.push(
      `<tr class="port-row" data-port="${esc(p.port_id)}">` +
      `<td>${esc(p.port_id)}</td><td>${esc(p.name ?? "")}</td>` +
      `<td>${p.hon_count}</td><td>${sci(p.hon_pagerank ?? 0)}</td>` +
      `<td>${sci(p.fon_pagerank ?? 0)}</td><td>${sci(p.pagerank_delta ?? 0)}</td></tr>`,
    );
  }
  parts.push(`</tbody></table>`);
  if (detail) {
    parts.push(`<table class="port-detail" data-port="${esc(detail.port_id)}">`);
    parts.push(
      `<thead><tr><th>context</th><th>order</th><th>out weight</th>` +
      `<th>entropy</th><th>memory gain</th></tr></thead><tbody>`,
    );
    for (const n of detail.hon_nodes) {
      parts.push(
        `<tr class="ctx-row" data-label="${esc(n.label)}">` +
        `<td>${esc(n.label)}</td><td>${n.order}</td><td>${n.out_weight}</td>` +
        `<td>${n.entropy_bits.toFixed(4)}</td><td>${n.kld_bits.toFixed(4)}</td></tr>`,
      );
    }
    parts.push(`</tbody></table>`);
  }
  return parts.join("");
}
