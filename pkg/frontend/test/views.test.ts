import { describe, expect, it } from "vitest";

import {
  alarmsBySector,
  degradedBanner,
  disruptionDialog,
  flightInspector,
  loadColor,
  loadRatio,
  networkView,
  paretoPanel,
  runPanel,
  staleBanner,
} from "../src/views";
import { attrValue, attrValues, fixtures } from "./helpers";

const occ = fixtures.occupancy_disrupted;
const run = fixtures.run_done;

describe("networkView", () => {
  it("renders one tile per sector with the sector's alarm count as badge", () => {
    const html = networkView(occ);
    const tiles = attrValues(html, /<div class="tile"[^>]*>/g, "data-sector");
    expect(tiles.sort()).toEqual(Object.keys(occ.sectors).sort());
    const bySector = alarmsBySector(occ.alarms);
    for (const [sid, alarms] of bySector) {
      const tile = html.split(`data-sector="${sid}"`)[1].split("</div>")[0];
      expect(tile).toContain(`data-alarms="${alarms.length}"`);
    }
  });

  it("shows the service's costs verbatim", () => {
    const html = networkView(occ);
    expect(html).toContain(`data-c1="${occ.costs.c1}"`);
    expect(html).toContain(`data-c2="${occ.costs.c2}"`);
  });

  it("lists every alarm span with its exact peak and capacity", () => {
    const html = networkView(occ);
    const peaks = attrValues(html, /<li class="alarm"[^>]*>/g, "data-peak");
    expect(peaks.sort()).toEqual(
      occ.alarms.map((a: { peak_expected: number }) => String(a.peak_expected)).sort(),
    );
    expect(attrValue(html, /<section[^>]*>/g, "data-alarm-count")).toBe(String(occ.alarms.length));
  });

  it("omits the badge on alarm-free sectors", () => {
    const quiet = {
      ...occ,
      alarms: [],
      sectors: { Q: { expected: [0.1, 0.2], capacity: [3, 3], p_congestion: [0, 0] } },
    };
    const html = networkView(quiet);
    expect(html).not.toContain("badge");
    expect(attrValue(html, /<section[^>]*>/g, "data-alarm-count")).toBe("0");
  });
});

describe("load coloring", () => {
  it("takes the worst expected/capacity ratio across bins", () => {
    expect(loadRatio({ expected: [1, 2.7, 0.5], capacity: [3, 3, 3], p_congestion: [] })).toBeCloseTo(
      0.9,
      12,
    );
  });

  it("uses the 90% alarm threshold as the orange cut", () => {
    expect(loadColor(0.89)).not.toBe(loadColor(0.9));
    expect(loadColor(1.2)).toBe("#c0392b");
  });
});

describe("disruptionDialog", () => {
  it("offers every sector", () => {
    const html = disruptionDialog(Object.keys(occ.sectors));
    for (const sid of Object.keys(occ.sectors)) expect(html).toContain(`<option value="${sid}">`);
  });
});

describe("runPanel", () => {
  it("shows progress while running", () => {
    const html = runPanel({ ...run, status: "running", generation: 3, archive: undefined });
    expect(html).toContain('data-status="running"');
    expect(html).toContain(`generation 3/${run.generations}`);
  });

  it("shows the sparkline when done and the error when failed", () => {
    expect(runPanel(run)).toContain('class="sparkline"');
    const failed = runPanel({ ...run, status: "failed", error: "boom", hypervolume_trace: undefined });
    expect(failed).toContain("boom");
  });
});

describe("paretoPanel", () => {
  it("shows the heuristic suggestion and the selected point's exact costs", () => {
    const pick = run.archive[0];
    const html = paretoPanel(run, pick.index, { index: pick.index, heuristic: true });
    expect(html).toContain("(heuristic)");
    expect(html).toContain(`data-c1="${pick.c1}"`);
    expect(html).toContain(`data-c2="${pick.c2}"`);
    expect(html).toContain('id="commit-btn"');
  });

  it("has no commit button without a selection", () => {
    expect(paretoPanel(run, null, null)).not.toContain("commit-btn");
  });
});

describe("flightInspector", () => {
  it("renders the ridgeline for the inspected flight", () => {
    const html = flightInspector(fixtures.marginals_f00);
    expect(html).toContain(`data-flight="${fixtures.marginals_f00.flight_id}"`);
    expect(html).toContain('class="ridgeline"');
  });
});

describe("banners", () => {
  it("stale banner asks for a refresh, degraded banner carries the message", () => {
    expect(staleBanner()).toContain("scenario changed");
    expect(degradedBanner("ECONNREFUSED")).toContain("ECONNREFUSED");
  });
});
