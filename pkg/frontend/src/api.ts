/** Thin typed client for the modalsim HTTP service.
 *
 * Construction takes the base URL and a fetch function, so tests can inject
 * a fake and the e2e suite can point at a live server. Non-2xx responses
 * become ApiError with the status and the service's detail string; a 404 on
 * a game route is how the dashboard learns a game went away.
 */

import type {
  BiasDocument,
  GameCreated,
  GameStateDocument,
  PopulationCreated,
  RationalityReport,
  ScenarioDocument,
  TurnResponse,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

export interface SynthRequest {
  profile: "our-sample" | "france";
  n: number;
  seed: number;
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn: FetchLike = fetch) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    headers?: Record<string, string>,
  ): Promise<T> {
    const init: RequestInit = { method, headers: { ...headers } };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json", ...headers };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.base}${path}`, init);
    if (response.status === 204) {
      return undefined as T;
    }
    let payload: unknown = null;
    const text = await response.text();
    if (text) {
      try {
        payload = JSON.parse(text);
      } catch {
        payload = text;
      }
    }
    if (!response.ok) {
      const detail =
        payload && typeof payload === "object" && "detail" in payload
          ? String((payload as { detail: unknown }).detail)
          : String(payload ?? response.statusText);
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  createPopulationSynth(config: SynthRequest): Promise<PopulationCreated> {
    return this.request("POST", "/populations", { source: "synth", config });
  }

  createPopulationUpload(csv: string): Promise<PopulationCreated> {
    return this.request("POST", "/populations", { source: "upload", csv });
  }

  deletePopulation(populationId: string): Promise<void> {
    return this.request("DELETE", `/populations/${populationId}`);
  }

  getRationality(
    populationId: string,
    evals: "self" | "crowd" = "self",
    halo: "on" | "off" = "off",
  ): Promise<RationalityReport> {
    return this.request(
      "GET",
      `/populations/${populationId}/rationality?evals=${evals}&halo=${halo}`,
    );
  }

  createGame(populationId: string): Promise<GameCreated> {
    return this.request("POST", "/games", { population_id: populationId });
  }

  getGame(gameId: string): Promise<GameStateDocument> {
    return this.request("GET", `/games/${gameId}`);
  }

  /** Post one turn. Pass an idempotency key to make retries safe: the
   * service replays the stored response instead of advancing again.
   */
  postTurn(
    gameId: string,
    scenario: string | ScenarioDocument,
    bias: BiasDocument,
    idempotencyKey?: string,
  ): Promise<TurnResponse> {
    const headers = idempotencyKey ? { "Idempotency-Key": idempotencyKey } : undefined;
    return this.request(
      "POST",
      `/games/${gameId}/turns`,
      { scenario, bias_config: bias },
      headers,
    );
  }

  deleteGame(gameId: string): Promise<void> {
    return this.request("DELETE", `/games/${gameId}`);
  }
}

/** True when an error means the game (or its population) is gone and the
 * dashboard should fall back to setup.
 */
export function isStaleGame(error: unknown): boolean {
  return error instanceof ApiError && error.status === 404;
}
