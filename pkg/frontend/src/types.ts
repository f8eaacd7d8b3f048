/** Response shapes of the explorer HTTP API (all endpoints are GET/JSON). */

export type GraphMode = "unfiltered" | "filtered";

export interface ModeSummary {
  vertices: number;
  edges: number;
  weak_components: number;
  nontrivial_sccs: number;
  loops: number;
}

export interface Summary {
  unfiltered: ModeSummary;
  filtered: ModeSummary;
}

export interface ComponentEntry {
  id: number;
  size: number;
  representative: string;
}

export interface ComponentPage {
  total: number;
  page: number;
  page_size: number;
  components: ComponentEntry[];
}

export interface SubgraphEdge {
  source: string;
  target: string;
  deposit_mint_count: number;
  withdraw_burn_count: number;
  total_source_amount: string;
  total_target_amount: string;
  first_block: number;
  last_block: number;
  sample_tx_hashes: string[];
}

/** Induced subgraph payload shared by component and neighborhood views. */
export interface Subgraph {
  mode: GraphMode;
  vertices: string[];
  edges: SubgraphEdge[];
  labels?: Record<string, string>;
  truncated?: boolean;
}

export interface ComponentDetail extends Subgraph {
  id: number;
  size: number;
}

export interface Neighborhood extends Subgraph {
  center: string;
  depth: number;
}

export interface TokenMetadata {
  symbol: string | null;
  market_cap_usd: number | null;
  pool_count: number;
  snapshot_date: string;
}

export interface IncidentEdge {
  source: string;
  target: string;
  deposit_mint_count: number;
  withdraw_burn_count: number;
}

export interface TokenDetail {
  address: string;
  label: string | null;
  metadata: TokenMetadata | null;
  in_degree: number;
  out_degree: number;
  edges: IncidentEdge[];
}

export interface TopEdge {
  source: string;
  target: string;
  source_label: string | null;
  target_label: string | null;
  meta_event_count: number;
  deposit_mint_count: number;
  withdraw_burn_count: number;
}

export interface LongestPath {
  vertices: string[];
  labels: (string | null)[];
  length: number;
  condensed: boolean;
}

export interface SearchHit {
  address: string;
  label: string | null;
}
