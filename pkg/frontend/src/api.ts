// Thin typed client over the JSON API. `fetchFn` is injectable so tests can
// stub the transport and inject delayed or failing responses.

import type { ScenarioInfo, SolveResponse, TariffParams } from "./types.js";

export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string;
  },
) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(
  res: Awaited<ReturnType<FetchLike>>,
): Promise<ApiError> {
  let message = `HTTP ${res.status}`;
  try {
    const body = (await res.json()) as { error?: string };
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    /* non-JSON error body: keep the status line */
  }
  return new ApiError(res.status, message);
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (url, init) =>
      fetch(url, init) as ReturnType<FetchLike>,
  ) {}

  async uploadCsv(csvText: string): Promise<ScenarioInfo> {
    const res = await this.fetchFn(`${this.base}/api/scenario`, {
      method: "POST",
      headers: { "Content-Type": "text/csv" },
      body: csvText,
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as ScenarioInfo;
  }

  async uploadSynthetic(spec: object): Promise<ScenarioInfo> {
    const res = await this.fetchFn(`${this.base}/api/scenario`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ synthetic: spec }),
    });
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as ScenarioInfo;
  }

  async solve(
    scenarioId: string,
    params: TariffParams,
    withLp = false,
    lpTimeoutS?: number,
  ): Promise<SolveResponse> {
    const res = await this.fetchFn(`${this.base}/api/solve`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        scenario_id: scenarioId,
        params,
        with_lp: withLp,
        lp_timeout_s: lpTimeoutS,
      }),
    });
    // 504 still carries the SCM portion of the payload plus an lp_timeout
    // notice; surface it rather than failing the whole render.
    if (!res.ok && res.status !== 504) throw await parseError(res);
    return (await res.json()) as SolveResponse;
  }
}
