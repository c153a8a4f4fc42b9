/** Console controller: owns the session state (scenario version, active run,
 * selected archive point) and the 2-second polling loop. Rendering and the
 * HTTP client are injected so the logic is testable without a browser. */

import { ApiError, Client, MarginalsResponse, OccupancyResponse, RunResponse } from "./api";

export const POLL_MS = 2000;

export interface ConsoleState {
  version: string | null;
  occupancy: OccupancyResponse | null;
  run: RunResponse | null;
  selected: number | null;
  suggestion: { index: number; heuristic: boolean } | null;
  inspected: MarginalsResponse | null;
  banner: { kind: "stale" | "degraded"; message: string } | null;
}

export class Controller {
  state: ConsoleState = {
    version: null,
    occupancy: null,
    run: null,
    selected: null,
    suggestion: null,
    inspected: null,
    banner: null,
  };
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private client: Client,
    private render: (state: ConsoleState) => void,
    private schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> = setTimeout,
  ) {}

  private emit() {
    this.render(this.state);
  }

  private fail(err: unknown) {
    if (err instanceof ApiError && err.status === 409) {
      this.state.banner = { kind: "stale", message: err.detail };
    } else {
      this.state.banner = { kind: "degraded", message: err instanceof Error ? err.message : String(err) };
    }
    this.emit();
  }

  async refreshOccupancy(): Promise<void> {
    try {
      const occ = await this.client.getOccupancy();
      if (this.state.version !== null && occ.version !== this.state.version) {
        // another actor changed the scenario under us
        this.state.banner = { kind: "stale", message: "scenario version changed" };
      }
      this.state.version = occ.version;
      this.state.occupancy = occ;
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  async applyDisruption(body: {
    sector_id: string;
    from_min: number;
    to_min: number;
    capacity: number;
  }): Promise<void> {
    try {
      const res = await this.client.postDisruption(body);
      this.state.version = res.version;
      this.state.banner = null;
      this.state.run = null;
      this.state.selected = null;
      this.state.suggestion = null;
      await this.refreshOccupancy();
    } catch (err) {
      this.fail(err);
    }
  }

  async startRun(body: { seed: number; population?: number; generations?: number }): Promise<void> {
    try {
      const res = await this.client.postOptimize(body);
      this.state.selected = null;
      this.state.suggestion = null;
      this.state.run = {
        run_id: res.run_id,
        status: res.status as RunResponse["status"],
        scenario_version: res.scenario_version,
        generation: 0,
        generations: body.generations ?? 400,
        seed: body.seed,
      };
      this.emit();
      this.pollSoon(0);
    } catch (err) {
      this.fail(err);
    }
  }

  private pollSoon(ms: number = POLL_MS) {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = this.schedule(() => void this.poll(), ms);
  }

  async poll(): Promise<void> {
    const run = this.state.run;
    if (!run || run.status === "done" || run.status === "failed") return;
    try {
      const fresh = await this.client.getRun(run.run_id);
      this.state.run = fresh;
      if (fresh.status === "done") {
        const s = await this.client.getSuggestion(fresh.run_id);
        this.state.suggestion = { index: s.index, heuristic: s.heuristic };
        this.state.selected = s.index;
      }
      this.emit();
      if (fresh.status === "queued" || fresh.status === "running") this.pollSoon();
    } catch (err) {
      this.fail(err);
    }
  }

  select(index: number | null): void {
    this.state.selected = index;
    this.emit();
  }

  async inspect(flightId: string): Promise<void> {
    try {
      this.state.inspected = await this.client.getMarginals(flightId);
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  async commitSelected(): Promise<void> {
    const { run, selected, version } = this.state;
    if (!run || selected === null || version === null) return;
    try {
      await this.client.postCommit({ run_id: run.run_id, index: selected, scenario_version: version });
      this.state.banner = null;
      await this.refreshOccupancy();
    } catch (err) {
      this.fail(err);
    }
  }
}
