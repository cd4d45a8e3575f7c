/** Typed client for the service's /api/v1 JSON endpoints. All failures are
 * normalized to ApiError; network-level failures get code "network" so the
 * UI can offer a retry instead of treating them as validation problems.
 */

import type { AnswerMap, Assessment, ErrorDoc, GameDoc, GuessBody, SchemaDoc } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: string[];

  constructor(status: number, code: string, message: string, details: string[] = []) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.details = details;
  }
}

export interface ApiClient {
  listSchemas(): Promise<SchemaDoc[]>;
  getSchema(schemaId: string): Promise<SchemaDoc>;
  assess(schemaId: string, answers: AnswerMap, signal?: AbortSignal): Promise<Assessment>;
  createGame(schemaId: string, answers: AnswerMap): Promise<GameDoc>;
  getGame(sessionId: string): Promise<GameDoc>;
  submitGuess(sessionId: string, guess: GuessBody): Promise<GameDoc>;
}

export function createApiClient(baseUrl: string, fetchFn?: FetchLike): ApiClient {
  const doFetch: FetchLike = fetchFn ?? ((input, init) => fetch(input, init));
  const base = baseUrl.replace(/\/$/, "");

  async function request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await doFetch(`${base}${path}`, init);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ApiError(0, "network", err instanceof Error ? err.message : String(err));
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON body: fall through to the status check below
    }
    if (!response.ok) {
      const doc = (body ?? {}) as Partial<ErrorDoc>;
      throw new ApiError(
        response.status,
        doc.code ?? "error",
        doc.message ?? `request failed with status ${response.status}`,
        doc.details ?? [],
      );
    }
    return body as T;
  }

  const post = (doc: unknown): RequestInit => ({
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(doc),
  });

  return {
    listSchemas: () => request<SchemaDoc[]>("/api/v1/schemas"),
    getSchema: (schemaId) => request<SchemaDoc>(`/api/v1/schemas/${schemaId}`),
    assess: (schemaId, answers, signal) =>
      request<Assessment>(`/api/v1/assess/${schemaId}`, { ...post({ answers }), signal }),
    createGame: (schemaId, answers) =>
      request<GameDoc>("/api/v1/game", post({ schema_id: schemaId, answers })),
    getGame: (sessionId) => request<GameDoc>(`/api/v1/game/${sessionId}`),
    submitGuess: (sessionId, guess) =>
      request<GameDoc>(`/api/v1/game/${sessionId}/guess`, post(guess)),
  };
}
