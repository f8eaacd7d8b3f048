import type {
  ComponentDetail,
  ComponentPage,
  GraphMode,
  LongestPath,
  Neighborhood,
  SearchHit,
  Summary,
  TokenDetail,
  TopEdge,
} from "./types.js";

/** Non-2xx API response; `detail` carries the server's JSON error body. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`API error ${status}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin typed client over the read-only explorer API.
 *
 * The fetch implementation is injectable so tests can replay recorded
 * responses; the client never caches — the server's snapshot is
 * immutable and sends a content-hash ETag anyway.
 */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, { signal });
    const body: unknown = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, body);
    }
    return body as T;
  }

  summary(signal?: AbortSignal): Promise<Summary> {
    return this.get("/api/summary", signal);
  }

  components(mode: GraphMode, minSize = 1, page = 0, signal?: AbortSignal): Promise<ComponentPage> {
    return this.get(`/api/components?mode=${mode}&min_size=${minSize}&page=${page}`, signal);
  }

  component(id: number, mode: GraphMode, signal?: AbortSignal): Promise<ComponentDetail> {
    return this.get(`/api/component/${id}?mode=${mode}`, signal);
  }

  token(address: string, mode: GraphMode, signal?: AbortSignal): Promise<TokenDetail> {
    return this.get(`/api/token/${address}?mode=${mode}`, signal);
  }

  neighborhood(
    address: string,
    mode: GraphMode,
    depth = 1,
    signal?: AbortSignal,
  ): Promise<Neighborhood> {
    return this.get(`/api/neighborhood/${address}?mode=${mode}&depth=${depth}`, signal);
  }

  topEdges(mode: GraphMode, k = 5, signal?: AbortSignal): Promise<{ edges: TopEdge[] }> {
    return this.get(`/api/edges/top?mode=${mode}&k=${k}`, signal);
  }

  longestPath(mode: GraphMode, condense = false, signal?: AbortSignal): Promise<LongestPath> {
    return this.get(`/api/longest-path?mode=${mode}&condense=${condense}`, signal);
  }

  search(query: string, signal?: AbortSignal): Promise<{ results: SearchHit[] }> {
    return this.get(`/api/search?q=${encodeURIComponent(query)}`, signal);
  }
}
