/** Typed client for the planning service. The console never computes domain
 * values itself; everything rendered comes straight out of these responses. */

export interface Alarm {
  sector_id: string;
  start_bin: number;
  end_bin: number;
  peak_expected: number;
  capacity: number;
}

export interface SectorSeries {
  expected: number[];
  capacity: number[];
  p_congestion: number[];
}

export interface OccupancyResponse {
  version: string;
  from_bin: number;
  to_bin: number;
  costs: { c1: number; c2: number };
  sectors: Record<string, SectorSeries>;
  alarms: Alarm[];
}

export interface WaypointMarginal {
  index: number;
  waypoint_id: string;
  support_lo: number;
  mass: number[];
  mean_time: number;
}

export interface MarginalsResponse {
  version: string;
  flight_id: string;
  targets: number[];
  waypoints: WaypointMarginal[];
}

export interface ArchiveEntry {
  index: number;
  c1: number;
  c2: number;
}

export interface RunResponse {
  run_id: string;
  status: "queued" | "running" | "done" | "failed";
  scenario_version: string;
  generation: number;
  generations: number;
  seed: number;
  error?: string;
  archive?: ArchiveEntry[];
  hypervolume_trace?: number[];
  reference_point?: number[];
}

export interface ScenarioResponse {
  version: string;
  scenario: {
    grid: { origin_min: number; horizon: number };
    sectors: { id: string; capacity: number }[];
    flights: { id: string }[];
  };
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = await res.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(res.status, detail);
  }
  return res.json() as Promise<T>;
}

export class Client {
  constructor(public base: string = "") {}

  getScenario(): Promise<ScenarioResponse> {
    return request(this.base, "/scenario");
  }

  getOccupancy(sector?: string): Promise<OccupancyResponse> {
    const q = sector ? `?sector=${encodeURIComponent(sector)}` : "";
    return request(this.base, `/occupancy${q}`);
  }

  getMarginals(flightId: string): Promise<MarginalsResponse> {
    return request(this.base, `/flights/${encodeURIComponent(flightId)}/marginals`);
  }

  postDisruption(body: {
    sector_id: string;
    from_min: number;
    to_min: number;
    capacity: number;
  }): Promise<{ version: string }> {
    return request(this.base, "/disruption", { method: "POST", body: JSON.stringify(body) });
  }

  postOptimize(body: {
    seed: number;
    population?: number;
    generations?: number;
  }): Promise<{ run_id: string; status: string; scenario_version: string }> {
    return request(this.base, "/optimize", { method: "POST", body: JSON.stringify(body) });
  }

  getRun(runId: string): Promise<RunResponse> {
    return request(this.base, `/runs/${runId}`);
  }

  getSuggestion(
    runId: string,
  ): Promise<{ run_id: string; heuristic: boolean; index: number; solution: ArchiveEntry }> {
    return request(this.base, `/runs/${runId}/suggestion`);
  }

  postCommit(body: {
    run_id: string;
    index: number;
    scenario_version: string;
  }): Promise<{ version: string; run_id: string; index: number; costs: { c1: number; c2: number } }> {
    return request(this.base, "/commit", { method: "POST", body: JSON.stringify(body) });
  }
}
