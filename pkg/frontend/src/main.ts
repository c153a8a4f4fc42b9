import { Client } from "./api";
import { Controller, ConsoleState } from "./state";
import {
  degradedBanner,
  disruptionDialog,
  flightInspector,
  networkView,
  paretoPanel,
  runPanel,
  staleBanner,
} from "./views";

const root = document.getElementById("app")!;
const client = new Client("");

function render(state: ConsoleState) {
  const parts: string[] = [];
  if (state.banner) {
    parts.push(state.banner.kind === "stale" ? staleBanner() : degradedBanner(state.banner.message));
  }
  if (state.occupancy) {
    parts.push(networkView(state.occupancy));
    parts.push(disruptionDialog(Object.keys(state.occupancy.sectors)));
  }
  parts.push(runPanel(state.run));
  if (state.run && state.run.status === "done") {
    parts.push(paretoPanel(state.run, state.selected, state.suggestion));
  }
  if (state.inspected) parts.push(flightInspector(state.inspected));
  root.innerHTML = parts.join("\n");
  wire();
}

const controller = new Controller(client, render);

function wire() {
  const disruption = document.getElementById("disruption-form") as HTMLFormElement | null;
  disruption?.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(disruption);
    void controller.applyDisruption({
      sector_id: String(data.get("sector_id")),
      from_min: Number(data.get("from_min")),
      to_min: Number(data.get("to_min")),
      capacity: Number(data.get("capacity")),
    });
  });
  const optimize = document.getElementById("optimize-form") as HTMLFormElement | null;
  optimize?.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(optimize);
    void controller.startRun({
      seed: Number(data.get("seed")),
      generations: Number(data.get("generations")),
    });
  });
  document.querySelectorAll<SVGCircleElement>(".pareto .dot").forEach((dot) => {
    dot.addEventListener("click", () => controller.select(Number(dot.dataset.index)));
  });
  document.getElementById("commit-btn")?.addEventListener("click", () => void controller.commitSelected());
  document.querySelectorAll<HTMLElement>(".tile").forEach((tile) => {
    tile.addEventListener("dblclick", () => {
      const flight = prompt("flight id to inspect", "F00");
      if (flight) void controller.inspect(flight);
    });
  });
}

void controller.refreshOccupancy();
