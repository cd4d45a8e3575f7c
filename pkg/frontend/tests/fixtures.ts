/** Shared fixtures: an in-memory Storage, a small schema document mirroring
 * the served shapes, and a route-driven fetch stub.
 */

import type { FetchLike } from "../src/api.js";
import type { Assessment, SchemaDoc } from "../src/types.js";
import type { StorageLike } from "../src/state.js";

export class MemoryStorage implements StorageLike {
  private items = new Map<string, string>();

  getItem(key: string): string | null {
    return this.items.has(key) ? this.items.get(key)! : null;
  }

  setItem(key: string, value: string): void {
    this.items.set(key, String(value));
  }

  removeItem(key: string): void {
    this.items.delete(key);
  }
}

export const FIXTURE_SCHEMA: SchemaDoc = {
  format_version: 1,
  id: "demo",
  version: 1,
  audience: "patient",
  title: { en: "Demo questionnaire", pl: "Kwestionariusz demo" },
  band_thresholds: { low: 0.01, moderate: 0.05, high: 0.2 },
  sections: [
    {
      id: "base",
      title: { en: "Basics", pl: "Podstawy" },
      enabled_when: null,
      questions: [
        {
          id: "fever",
          widget: "checkbox",
          label: { en: "Fever present", pl: "Występuje gorączka" },
          modifiable: true,
          allow_unknown: false,
          feature: "fever",
        },
        {
          id: "severity",
          widget: "dropdown",
          label: { en: "Severity", pl: "Nasilenie" },
          modifiable: false,
          allow_unknown: false,
          feature: null,
          options: [
            { id: "none", label: { en: "None", pl: "Brak" }, feature: null },
            { id: "mild", label: { en: "Mild", pl: "Łagodne" }, feature: "severity_mild" },
            { id: "severe", label: { en: "Severe", pl: "Ciężkie" }, feature: "severity_severe" },
          ],
        },
        {
          id: "duration",
          widget: "slider",
          label: { en: "Duration (min)", pl: "Czas trwania (min)" },
          modifiable: true,
          allow_unknown: false,
          feature: "duration",
          bounds: { lo: 0, hi: 240 },
        },
        {
          id: "chills",
          widget: "tri-state",
          label: { en: "Chills", pl: "Dreszcze" },
          modifiable: false,
          allow_unknown: true,
          feature: "chills",
        },
      ],
    },
    {
      id: "surgery",
      title: { en: "Surgery", pl: "Zabieg" },
      enabled_when: { question: "severity", equals: "severe" },
      questions: [
        {
          id: "drain",
          widget: "checkbox",
          label: { en: "Drain placed", pl: "Założono dren" },
          modifiable: false,
          allow_unknown: false,
          feature: "drain",
        },
      ],
    },
  ],
  priors: { chills: 0.25 },
  interaction_pairs: [],
};

export function makeAssessment(overrides: Partial<Assessment> = {}): Assessment {
  return {
    probability: 0.05,
    display: "5%",
    band: "moderate",
    factor_deltas: [
      ["fever", -0.013],
      ["duration", 0.0],
    ],
    interval: null,
    ...overrides,
  };
}

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
  signal?: AbortSignal | null;
}

export type RouteHandler = (request: RecordedRequest) => { status?: number; body: unknown } | Promise<{ status?: number; body: unknown }>;

/** fetch stub: dispatches on "METHOD path-prefix" route keys, logs requests.
 * Deliberately ignores abort signals so stale-response ordering is testable. */
export function createFetchStub(routes: Record<string, RouteHandler>) {
  const log: RecordedRequest[] = [];
  const fetchFn: FetchLike = async (input, init) => {
    const url = new URL(input, "http://stub.local");
    const method = (init?.method ?? "GET").toUpperCase();
    const request: RecordedRequest = {
      url: url.pathname,
      method,
      body: init?.body ? JSON.parse(String(init.body)) : null,
      signal: init?.signal,
    };
    log.push(request);
    for (const [key, handler] of Object.entries(routes)) {
      const [routeMethod, prefix] = key.split(" ", 2) as [string, string];
      if (method === routeMethod && url.pathname.startsWith(prefix)) {
        const result = await handler(request);
        return new Response(JSON.stringify(result.body), {
          status: result.status ?? 200,
          headers: { "content-type": "application/json" },
        });
      }
    }
    return new Response(JSON.stringify({ code: "unknown-route", message: url.pathname, details: [] }), {
      status: 404,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetchFn, log };
}

export const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

/** Poll until `probe` returns truthy or the budget runs out. */
export async function waitFor<T>(probe: () => T | null | undefined | false, budgetMs = 2000, stepMs = 10): Promise<T> {
  const deadline = Date.now() + budgetMs;
  for (;;) {
    const result = probe();
    if (result) return result;
    if (Date.now() > deadline) throw new Error("waitFor: condition not met in time");
    await sleep(stepMs);
  }
}
