export type Pt = readonly [number, number];

function component(a: number, b: number, c: number, d: number, t: number): number {
  const t2 = t * t;
  const t3 = t2 * t;
  return 0.5 * (2 * b + (c - a) * t
    + (2 * a - 5 * b + 4 * c - d) * t2
    + (-a + 3 * b - 3 * c + d) * t3);
}

/**
 * Uniform Catmull-Rom sampling through every control point, endpoints
 * clamped by duplication. Control points land in the output exactly (the
 * segment boundary is pinned, not interpolated) so curves visibly pass
 * through the circles they connect.
 */
export function catmullRom(points: readonly Pt[], samplesPerSegment = 16): Pt[] {
  if (points.length < 2) return points.map((p) => [p[0], p[1]] as const);
  const out: Pt[] = [points[0] as Pt];
  for (let i = 0; i < points.length - 1; i++) {
    const p0 = points[Math.max(0, i - 1)] as Pt;
    const p1 = points[i] as Pt;
    const p2 = points[i + 1] as Pt;
    const p3 = points[Math.min(points.length - 1, i + 2)] as Pt;
    for (let s = 1; s < samplesPerSegment; s++) {
      const t = s / samplesPerSegment;
      out.push([
        component(p0[0], p1[0], p2[0], p3[0], t),
        component(p0[1], p1[1], p2[1], p3[1], t),
      ]);
    }
    out.push(p2);
  }
  return out;
}

export function toPath(points: readonly Pt[]): string {
  if (!points.length) return "";
  const [first, ...rest] = points as [Pt, ...Pt[]];
  let d = `M ${first[0]} ${first[1]}`;
  for (const p of rest) d += ` L ${p[0]} ${p[1]}`;
  return d;
}
