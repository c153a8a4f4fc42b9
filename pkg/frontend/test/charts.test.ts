import { describe, expect, it } from "vitest";

import { marginalRidgeline, occupancyChart, paretoScatter, sparkline } from "../src/charts";
import { attrValue, attrValues, fixtures } from "./helpers";

const run = fixtures.run_done;
const occ = fixtures.occupancy_disrupted;
const marginals = fixtures.marginals_f00;

describe("sparkline", () => {
  it("encodes the full hypervolume trace and its exact final value", () => {
    const svg = sparkline(run.hypervolume_trace);
    expect(attrValue(svg, /<svg[^>]*>/g, "data-n")).toBe(String(run.hypervolume_trace.length));
    expect(attrValue(svg, /<svg[^>]*>/g, "data-last")).toBe(
      String(run.hypervolume_trace[run.hypervolume_trace.length - 1]),
    );
  });

  it("renders an empty trace without marks", () => {
    expect(sparkline([])).not.toContain("<path");
  });
});

describe("paretoScatter", () => {
  it("renders one dot per archive entry with the service's exact costs", () => {
    const svg = paretoScatter(run.archive, null);
    const c1 = attrValues(svg, /<circle[^>]*>/g, "data-c1");
    const c2 = attrValues(svg, /<circle[^>]*>/g, "data-c2");
    expect(c1).toEqual(run.archive.map((a: { c1: number }) => String(a.c1)));
    expect(c2).toEqual(run.archive.map((a: { c2: number }) => String(a.c2)));
  });

  it("marks only the selected index", () => {
    const idx = run.archive[1].index;
    const svg = paretoScatter(run.archive, idx);
    const selected = (svg.match(/class="dot selected"/g) ?? []).length;
    expect(selected).toBe(1);
    const tag = svg.match(/<circle class="dot selected"[^>]*>/)![0];
    expect(tag).toContain(`data-index="${idx}"`);
  });
});

describe("occupancyChart", () => {
  it("embeds the exact expected, capacity and congestion series", () => {
    const sid = "C";
    const series = occ.sectors[sid];
    const svg = occupancyChart(sid, series, occ.from_bin);
    expect(attrValue(svg, /<svg[^>]*>/g, "data-expected")).toBe(
      series.expected.map(String).join(" "),
    );
    expect(attrValue(svg, /<svg[^>]*>/g, "data-capacity")).toBe(
      series.capacity.map(String).join(" "),
    );
    const probs = attrValues(svg, /<rect[^>]*>/g, "data-p");
    expect(probs).toEqual(series.p_congestion.map(String));
  });

  it("labels congestion bars with absolute bin numbers", () => {
    const series = occ.sectors["C"];
    const svg = occupancyChart("C", series, occ.from_bin);
    const bins = attrValues(svg, /<rect[^>]*>/g, "data-bin").map(Number);
    expect(bins[0]).toBe(occ.from_bin);
    expect(bins[bins.length - 1]).toBe(occ.from_bin + series.expected.length - 1);
  });
});

describe("marginalRidgeline", () => {
  it("renders one ridge per waypoint carrying the exact mass vector", () => {
    const svg = marginalRidgeline(marginals.waypoints);
    expect(attrValue(svg, /<svg[^>]*>/g, "data-n")).toBe(String(marginals.waypoints.length));
    const masses = attrValues(svg, /<g[^>]*>/g, "data-mass");
    expect(masses).toEqual(
      marginals.waypoints.map((w: { mass: number[] }) => w.mass.map(String).join(" ")),
    );
    const means = attrValues(svg, /<g[^>]*>/g, "data-mean-time");
    expect(means).toEqual(marginals.waypoints.map((w: { mean_time: number }) => String(w.mean_time)));
  });
});
