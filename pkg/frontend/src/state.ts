import { ApiClient, ApiError } from "./api.js";
import type {
  ComponentEntry,
  GraphMode,
  Subgraph,
  SubgraphEdge,
  TokenDetail,
} from "./types.js";

export interface Banner {
  kind: "error" | "notice";
  message: string;
}

export function edgeKey(source: string, target: string): string {
  return `${source}->${target}`;
}

/**
 * Client-side view model of the explorer.
 *
 * Holds the merged subgraph loaded so far for the current mode.  All
 * mutation goes through async load/expand calls; responses belonging to
 * a superseded mode are discarded (the epoch check), so the invariant
 * that the subgraph is drawn from a single server-side graph holds.
 * Merging only ever adds vertices and edges — expansion is monotone
 * and never drops the current selection.
 */
export class ViewState {
  mode: GraphMode = "unfiltered";
  focus: string | null = null;
  expansionDepth = 1;
  selection = new Set<string>();

  nodes = new Set<string>();
  edges = new Map<string, SubgraphEdge>();
  labels: Record<string, string> = {};
  truncated = false;

  componentList: ComponentEntry[] = [];
  componentTotal = 0;
  tokenDetail: TokenDetail | null = null;
  banners: Banner[] = [];

  private epoch = 0;
  private controller: AbortController | null = null;
  private listeners: Array<() => void> = [];

  constructor(private readonly api: ApiClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  private notice(message: string): void {
    this.banners.push({ kind: "notice", message });
  }

  private fail(message: string): void {
    this.banners.push({ kind: "error", message });
  }

  dismissBanner(index: number): void {
    this.banners.splice(index, 1);
    this.emit();
  }

  /** Abort in-flight requests and return a signal tied to this epoch. */
  private nextSignal(): { epoch: number; signal: AbortSignal } {
    this.controller?.abort();
    this.controller = new AbortController();
    return { epoch: this.epoch, signal: this.controller.signal };
  }

  private stale(epoch: number): boolean {
    return epoch !== this.epoch;
  }

  mergeSubgraph(sub: Subgraph): void {
    for (const v of sub.vertices) {
      this.nodes.add(v);
    }
    for (const e of sub.edges) {
      this.edges.set(edgeKey(e.source, e.target), e);
    }
    Object.assign(this.labels, sub.labels ?? {});
    this.truncated = this.truncated || sub.truncated === true;
  }

  clearSubgraph(): void {
    this.nodes.clear();
    this.edges.clear();
    this.labels = {};
    this.truncated = false;
    this.selection.clear();
    this.focus = null;
    this.tokenDetail = null;
  }

  async refreshComponents(): Promise<void> {
    const { epoch, signal } = this.nextSignal();
    try {
      const page = await this.api.components(this.mode, 1, 0, signal);
      if (this.stale(epoch)) return;
      this.componentList = page.components;
      this.componentTotal = page.total;
      if (page.total === 0) {
        this.notice(`no edges in the ${this.mode} graph`);
      }
    } catch (err) {
      if (this.stale(epoch)) return;
      this.fail(describeError(err));
    }
    this.emit();
  }

  async loadComponent(id: number): Promise<void> {
    const { epoch, signal } = this.nextSignal();
    try {
      const detail = await this.api.component(id, this.mode, signal);
      if (this.stale(epoch)) return;
      this.clearSubgraph();
      this.mergeSubgraph(detail);
      if (detail.truncated) {
        this.notice(`component ${id} truncated to ${detail.vertices.length} vertices`);
      }
    } catch (err) {
      if (this.stale(epoch)) return;
      this.fail(describeError(err));
    }
    this.emit();
  }

  /** Depth-1 (by default) neighborhood expansion around a node. */
  async expand(address: string, depth = this.expansionDepth): Promise<void> {
    const { epoch, signal } = this.nextSignal();
    try {
      const ball = await this.api.neighborhood(address, this.mode, depth, signal);
      if (this.stale(epoch)) return;
      this.mergeSubgraph(ball);
      if (ball.truncated) {
        this.notice("partial view: neighborhood truncated by the server");
      }
    } catch (err) {
      if (this.stale(epoch)) return;
      this.fail(describeError(err));
    }
    this.emit();
  }

  async select(address: string): Promise<void> {
    this.selection.add(address);
    this.focus = address;
    const { epoch, signal } = this.nextSignal();
    try {
      const detail = await this.api.token(address, this.mode, signal);
      if (this.stale(epoch)) return;
      this.tokenDetail = detail;
    } catch (err) {
      if (this.stale(epoch)) return;
      this.tokenDetail = null;
      this.fail(describeError(err));
    }
    this.emit();
  }

  /** Switch graph mode: drops the loaded subgraph and reloads components. */
  async setMode(mode: GraphMode): Promise<void> {
    if (mode === this.mode) return;
    this.mode = mode;
    this.epoch += 1; // invalidates every in-flight response
    this.controller?.abort();
    this.controller = null;
    this.clearSubgraph();
    this.componentList = [];
    this.componentTotal = 0;
    this.emit();
    await this.refreshComponents();
  }

  labelFor(address: string): string {
    return this.labels[address] ?? address.slice(0, 8);
  }
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    const detail = err.detail as { detail?: string; error?: string } | null;
    return detail?.detail ?? detail?.error ?? `request failed (${err.status})`;
  }
  return err instanceof Error ? err.message : String(err);
}
