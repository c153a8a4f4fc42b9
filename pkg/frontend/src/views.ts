/** HTML builders for every console panel. Pure functions from API payloads
 * to markup; all displayed numbers are the service's values verbatim. */

import type { Alarm, ArchiveEntry, OccupancyResponse, RunResponse, SectorSeries } from "./api";
import { marginalRidgeline, occupancyChart, paretoScatter, sparkline } from "./charts";

const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");

/** Tile load ratio for coloring: max expected occupancy over capacity. */
export function loadRatio(series: SectorSeries): number {
  let worst = 0;
  for (let i = 0; i < series.expected.length; i++) {
    const c = series.capacity[i];
    const r = c > 0 ? series.expected[i] / c : Infinity;
    if (r > worst) worst = r;
  }
  return worst;
}

export function loadColor(ratio: number): string {
  if (ratio >= 1) return "#c0392b";
  if (ratio >= 0.9) return "#e67e22";
  if (ratio >= 0.6) return "#f1c40f";
  return "#27ae60";
}

export function alarmsBySector(alarms: Alarm[]): Map<string, Alarm[]> {
  const out = new Map<string, Alarm[]>();
  for (const a of alarms) {
    const list = out.get(a.sector_id) ?? [];
    list.push(a);
    out.set(a.sector_id, list);
  }
  return out;
}

export function networkView(occ: OccupancyResponse): string {
  const bySector = alarmsBySector(occ.alarms);
  const tiles = Object.entries(occ.sectors)
    .map(([sid, series]) => {
      const ratio = loadRatio(series);
      const alarms = bySector.get(sid) ?? [];
      const badge = alarms.length
        ? `<span class="badge" data-alarms="${alarms.length}">${alarms.length}</span>`
        : "";
      const spans = alarms
        .map(
          (a) =>
            `<li class="alarm" data-start-bin="${a.start_bin}" data-end-bin="${a.end_bin}" ` +
            `data-peak="${a.peak_expected}" data-capacity="${a.capacity}">` +
            `bins ${a.start_bin}–${a.end_bin}: peak ${a.peak_expected} / cap ${a.capacity}</li>`,
        )
        .join("");
      return (
        `<div class="tile" data-sector="${esc(sid)}" data-load="${ratio.toFixed(3)}" ` +
        `style="background:${loadColor(ratio)}">` +
        `<h3>${esc(sid)}${badge}</h3>` +
        occupancyChart(sid, series, occ.from_bin) +
        (spans ? `<ul class="alarm-list">${spans}</ul>` : "") +
        `</div>`
      );
    })
    .join("");
  return (
    `<section class="network" data-version="${esc(occ.version)}" data-alarm-count="${occ.alarms.length}">` +
    `<header>Baseline costs: delay <b data-c1="${occ.costs.c1}">${occ.costs.c1}</b>, ` +
    `congestion <b data-c2="${occ.costs.c2}">${occ.costs.c2}</b></header>` +
    `<div class="tiles">${tiles}</div></section>`
  );
}

export function disruptionDialog(sectorIds: string[]): string {
  const opts = sectorIds.map((s) => `<option value="${esc(s)}">${esc(s)}</option>`).join("");
  return (
    `<form class="disruption" id="disruption-form">` +
    `<select name="sector_id">${opts}</select>` +
    `<input name="from_min" type="number" value="60" step="1" aria-label="from (min)"/>` +
    `<input name="to_min" type="number" value="120" step="1" aria-label="to (min)"/>` +
    `<input name="capacity" type="number" value="1" step="1" min="0" aria-label="reduced capacity"/>` +
    `<button type="submit">Apply disruption</button></form>`
  );
}

export function runPanel(run: RunResponse | null): string {
  const controls =
    `<form class="launch" id="optimize-form">` +
    `<input name="seed" type="number" value="0" aria-label="seed"/>` +
    `<input name="generations" type="number" value="400" aria-label="generations"/>` +
    `<button type="submit">Optimize</button></form>`;
  if (!run) return `<section class="runs">${controls}<p class="idle">No run yet.</p></section>`;
  const progress =
    `<p class="status" data-status="${run.status}" data-run-id="${esc(run.run_id)}">` +
    `run ${esc(run.run_id)}: ${run.status}, generation ${run.generation}/${run.generations}</p>`;
  const spark = run.hypervolume_trace ? sparkline(run.hypervolume_trace) : "";
  const err = run.error ? `<p class="error">${esc(run.error)}</p>` : "";
  return `<section class="runs">${controls}${progress}${spark}${err}</section>`;
}

export function paretoPanel(
  run: RunResponse,
  selected: number | null,
  suggestion: { index: number; heuristic: boolean } | null,
): string {
  const archive = run.archive ?? [];
  const chosen: ArchiveEntry | undefined = archive.find((a) => a.index === selected);
  const detail = chosen
    ? `<p class="selection" data-index="${chosen.index}">#${chosen.index}: ` +
      `C1 <b data-c1="${chosen.c1}">${chosen.c1}</b>, C2 <b data-c2="${chosen.c2}">${chosen.c2}</b> ` +
      `<button id="commit-btn" data-index="${chosen.index}">Commit</button></p>`
    : `<p class="selection none">Select an archive point to preview and commit.</p>`;
  const hint = suggestion
    ? `<p class="suggestion" data-index="${suggestion.index}">suggested knee point: #${suggestion.index}` +
      `${suggestion.heuristic ? " (heuristic)" : ""}</p>`
    : "";
  return (
    `<section class="pareto-panel" data-run-id="${esc(run.run_id)}">` +
    paretoScatter(archive, selected) +
    hint +
    detail +
    `</section>`
  );
}

export function flightInspector(m: {
  flight_id: string;
  waypoints: { waypoint_id: string; support_lo: number; mass: number[]; mean_time: number }[];
}): string {
  return (
    `<section class="flight" data-flight="${esc(m.flight_id)}">` +
    `<h3>${esc(m.flight_id)}</h3>` +
    marginalRidgeline(m.waypoints) +
    `</section>`
  );
}

export function staleBanner(): string {
  return `<div class="banner stale">scenario changed - refresh and re-optimize</div>`;
}

export function degradedBanner(message: string): string {
  return `<div class="banner degraded">service unreachable: ${esc(message)}</div>`;
}
