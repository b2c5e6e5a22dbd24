// Color scales. Pure functions of their inputs so a reload, or a rerender
// from the same payload, always produces identical colors.

type Rgb = readonly [number, number, number];

const RED: Rgb = [178, 24, 43];
const GRAY: Rgb = [187, 187, 187];
const BLUE: Rgb = [33, 102, 172];

function hex(c: Rgb): string {
  return "#" + c.map((v) => Math.round(v).toString(16).padStart(2, "0")).join("");
}

function mix(a: Rgb, b: Rgb, t: number): string {
  return hex([
    a[0] + (b[0] - a[0]) * t,
    a[1] + (b[1] - a[1]) * t,
    a[2] + (b[2] - a[2]) * t,
  ]);
}

/** Diverging red-gray-blue: t=1 high (red), t=0.5 middle (gray), t=0 low (blue). */
export function divergingHighLow(t: number): string {
  const c = Math.max(0, Math.min(1, t));
  return c >= 0.5 ? mix(GRAY, RED, (c - 0.5) * 2) : mix(BLUE, GRAY, c * 2);
}

/**
 * Rank-shift coloring. Positive delta means the memoryless network
 * overestimates the port, drawn blue; negative means underestimated, red;
 * zero stays gray.
 */
export function deltaColor(delta: number, maxAbs: number): string {
  if (!(maxAbs > 0) || delta === 0) return hex(GRAY);
  const s = Math.max(-1, Math.min(1, delta / maxAbs));
  return s > 0 ? mix(GRAY, BLUE, s) : mix(GRAY, RED, -s);
}

// Twelve distinguishable hues for categorical attributes (eco-realms).
export const CATEGORICAL: readonly string[] = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
  "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
];

/** Stable categorical color: index by sorted position among the known values. */
export function categoryColor(value: string, all: readonly string[]): string {
  const sorted = [...new Set(all)].sort();
  const i = sorted.indexOf(value);
  const n = CATEGORICAL.length;
  return CATEGORICAL[((i % n) + n) % n] as string;
}

export function communityColor(community: number): string {
  const n = CATEGORICAL.length;
  return CATEGORICAL[((community % n) + n) % n] as string;
}

/** Visit-order stroke along a voyage curve: start red, end blue. */
export function visitGradient(t: number): string {
  return mix(RED, BLUE, Math.max(0, Math.min(1, t)));
}

export const NEUTRAL = hex(GRAY);
export const HIGHLIGHT_CONTRIBUTOR = "#f1c40f";
export const HIGHLIGHT_FRESH = "#2166ac";
