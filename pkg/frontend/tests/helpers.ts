import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

export interface Recorded {
  status: number;
  body: unknown;
}

export interface Fixture {
  [name: string]: Recorded | { labels: Record<string, string>; etag?: string };
}

const here = dirname(fileURLToPath(import.meta.url));

export function loadFixture(name: string): Fixture {
  return JSON.parse(readFileSync(join(here, "fixtures", `${name}.json`), "utf-8"));
}

export function labelsOf(fixture: Fixture): Record<string, string> {
  return (fixture._meta as { labels: Record<string, string> }).labels;
}

function recorded(fixture: Fixture, name: string): Recorded {
  const entry = fixture[name];
  if (!entry || !("status" in entry)) {
    throw new Error(`fixture entry missing: ${name}`);
  }
  return entry;
}

function asResponse(entry: Recorded): Response {
  return {
    ok: entry.status >= 200 && entry.status < 300,
    status: entry.status,
    json: async () => entry.body,
  } as unknown as Response;
}

/**
 * Fetch stand-in replaying responses recorded from the live service
 * (scripts/capture_api_fixtures.py in the repository root).  Routing
 * mirrors the real URL space; unknown URLs throw so tests notice
 * requests they did not intend to make.
 */
export function fetchFromFixture(fixture: Fixture): FetchLike {
  const labels = labelsOf(fixture);
  return async (url: string, init?: RequestInit) => {
    if (init?.signal?.aborted) {
      throw new DOMException("aborted", "AbortError");
    }
    const u = new URL(url, "http://fixture");
    const path = u.pathname;
    const mode = u.searchParams.get("mode") ?? "unfiltered";
    const pick = (name: string) => asResponse(recorded(fixture, name));

    if (path === "/api/summary") return pick("summary");
    if (path === "/api/components") {
      return pick(mode === "filtered" ? "components_filtered" : "components");
    }
    const component = path.match(/^\/api\/component\/(\d+)$/);
    if (component) {
      const id = Number(component[1]);
      return pick(id <= 2 ? `component_${id}` : "component_missing");
    }
    const token = path.match(/^\/api\/token\/(0x[0-9a-f]+)$/);
    if (token) {
      return pick(token[1] === labels.t6 ? "token_t6" : "token_unknown");
    }
    const ball = path.match(/^\/api\/neighborhood\/(0x[0-9a-f]+)$/);
    if (ball && ball[1] === labels.t6) {
      const depth = Number(u.searchParams.get("depth") ?? "1");
      if (depth > 4) return pick("neighborhood_too_deep");
      return pick(depth >= 2 ? "neighborhood_t6_d2" : "neighborhood_t6_d1");
    }
    if (path === "/api/edges/top") return pick("edges_top");
    if (path === "/api/longest-path") return pick("longest_path_cyclic");
    if (path === "/api/search") {
      const q = u.searchParams.get("q") ?? "";
      return pick(q && "t".startsWith(q[0]) ? "search_t" : "search_none");
    }
    throw new Error(`unrouted fixture URL: ${url}`);
  };
}

/** Fetch wrapper that parks every request until release() is called. */
export function gatedFetch(inner: FetchLike): { fetch: FetchLike; release: () => void } {
  let release: () => void = () => {};
  const gate = new Promise<void>((resolve) => {
    release = resolve;
  });
  return {
    fetch: async (url, init) => {
      await gate;
      return inner(url, init);
    },
    release,
  };
}
