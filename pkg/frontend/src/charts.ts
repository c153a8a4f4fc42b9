/** Dependency-free SVG chart builders.
 *
 * Every builder takes raw series from the API and returns an SVG string.
 * The exact input values are embedded as data attributes on the marks
 * (pixel coordinates are presentation only), so tests can verify that what
 * the chart encodes is byte-for-byte what the service returned.
 */

const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");

function extent(values: number[], lo = Infinity, hi = -Infinity): [number, number] {
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

function scale([lo, hi]: [number, number], outLo: number, outHi: number) {
  return (v: number) => outLo + ((v - lo) / (hi - lo)) * (outHi - outLo);
}

const fmt = (v: number) => String(v);

/** Hypervolume trace as a small sparkline (run panel). */
export function sparkline(trace: number[], width = 220, height = 48): string {
  if (trace.length === 0) {
    return `<svg class="sparkline" width="${width}" height="${height}" data-n="0"></svg>`;
  }
  const x = scale([0, Math.max(trace.length - 1, 1)], 2, width - 2);
  const y = scale(extent(trace), height - 3, 3);
  const d = trace.map((v, i) => `${i ? "L" : "M"}${x(i).toFixed(1)},${y(v).toFixed(1)}`).join("");
  const last = trace[trace.length - 1];
  return (
    `<svg class="sparkline" width="${width}" height="${height}" data-n="${trace.length}" ` +
    `data-last="${fmt(last)}"><path d="${d}" fill="none" stroke="currentColor"/></svg>`
  );
}

/** Archive scatter, C1 horizontal vs C2 vertical (Pareto explorer). */
export function paretoScatter(
  archive: { index: number; c1: number; c2: number }[],
  selected: number | null,
  width = 420,
  height = 300,
): string {
  const x = scale(extent(archive.map((a) => a.c1)), 30, width - 10);
  const y = scale(extent(archive.map((a) => a.c2)), height - 20, 10);
  const dots = archive
    .map((a) => {
      const cls = a.index === selected ? "dot selected" : "dot";
      return (
        `<circle class="${cls}" cx="${x(a.c1).toFixed(1)}" cy="${y(a.c2).toFixed(1)}" r="4" ` +
        `data-index="${a.index}" data-c1="${fmt(a.c1)}" data-c2="${fmt(a.c2)}"/>`
      );
    })
    .join("");
  return `<svg class="pareto" width="${width}" height="${height}" data-n="${archive.length}">${dots}</svg>`;
}

/** One sector's expected occupancy and capacity step lines plus a congestion
 * probability band, over absolute bins (network / preview panels). */
export function occupancyChart(
  sectorId: string,
  series: { expected: number[]; capacity: number[]; p_congestion: number[] },
  fromBin: number,
  width = 420,
  height = 140,
): string {
  const n = series.expected.length;
  const x = scale([0, Math.max(n - 1, 1)], 30, width - 6);
  const yTop = scale(extent(series.expected.concat(series.capacity), 0), height - 16, 6);
  const path = (vals: number[]) =>
    vals.map((v, i) => `${i ? "L" : "M"}${x(i).toFixed(1)},${yTop(v).toFixed(1)}`).join("");
  const pBand = series.p_congestion
    .map(
      (p, i) =>
        `<rect class="pband" x="${(x(i) - 1).toFixed(1)}" width="2" y="${height - 14}" height="10" ` +
        `opacity="${p.toFixed(4)}" data-bin="${fromBin + i}" data-p="${fmt(p)}"/>`,
    )
    .join("");
  return (
    `<svg class="occupancy" width="${width}" height="${height}" data-sector="${esc(sectorId)}" ` +
    `data-from-bin="${fromBin}" data-n="${n}" ` +
    `data-expected="${series.expected.map(fmt).join(" ")}" ` +
    `data-capacity="${series.capacity.map(fmt).join(" ")}">` +
    `<path class="capacity" d="${path(series.capacity)}" fill="none" stroke="#c33" stroke-dasharray="4 3"/>` +
    `<path class="expected" d="${path(series.expected)}" fill="none" stroke="#226"/>` +
    pBand +
    `</svg>`
  );
}

/** Per-waypoint overfly-time densities stacked as a ridgeline (flight inspector). */
export function marginalRidgeline(
  waypoints: { waypoint_id: string; support_lo: number; mass: number[]; mean_time: number }[],
  width = 420,
  rowHeight = 34,
): string {
  const binLo = Math.min(...waypoints.map((w) => w.support_lo));
  const binHi = Math.max(...waypoints.map((w) => w.support_lo + w.mass.length));
  const x = scale([binLo, binHi], 40, width - 6);
  const rows = waypoints
    .map((w, r) => {
      const peak = Math.max(...w.mass, 1e-12);
      const base = (r + 1) * rowHeight - 4;
      const pts = w.mass
        .map((m, i) => `${x(w.support_lo + i).toFixed(1)},${(base - (m / peak) * (rowHeight - 8)).toFixed(1)}`)
        .join(" ");
      return (
        `<g class="ridge" data-waypoint="${esc(w.waypoint_id)}" data-support-lo="${w.support_lo}" ` +
        `data-mean-time="${fmt(w.mean_time)}" data-mass="${w.mass.map(fmt).join(" ")}">` +
        `<polyline points="${x(w.support_lo).toFixed(1)},${base} ${pts} ${x(
          w.support_lo + w.mass.length - 1,
        ).toFixed(1)},${base}" fill="rgba(40,60,120,0.25)" stroke="#246"/>` +
        `<text x="2" y="${base}" class="ridge-label">${esc(w.waypoint_id)}</text></g>`
      );
    })
    .join("");
  return (
    `<svg class="ridgeline" width="${width}" height="${waypoints.length * rowHeight + 4}" ` +
    `data-n="${waypoints.length}">${rows}</svg>`
  );
}
