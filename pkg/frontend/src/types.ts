// Wire types for the control-plane API. The UI is a pure view over
// these payloads: it never recomputes scores, ranks or counters.

export interface SelectionThresholds {
  tau_high: number;
  tau_mid: number;
  delta: number;
  top_k: number;
  tau_min: number;
}

export interface CrawlWindow {
  start: string | null;
  end: string | null;
}

export interface CrawlConfig {
  categories: string[];
  window: CrawlWindow;
  gate_threshold: number;
  desc_threshold: number;
  link_mode: string;
  thresholds: SelectionThresholds;
  worker_count: number;
  max_downloads: number;
  verifier_enabled: boolean;
}

export interface CrawlStatus {
  state: string;
  run_id: string | null;
  papers_seen: number;
  gate_positives: number;
  descriptions_extracted: number;
  links_selected: number;
  records_written: number;
  reclassified_negatives: number;
  errors_count: number;
  started_at: string | null;
  last_activity: string | null;
}

export interface SearchHit {
  rank: number;
  similarity: number;
  paper_id: string;
  title: string;
  description: string;
  paper_url: string;
  dataset_url: string | null;
  last_seen: string;
}

export interface SearchResponse {
  query: string;
  k: number;
  hits: SearchHit[];
}

export interface DatasetRecord {
  paper_id: string;
  paper_url: string;
  title: string;
  dataset_url: string | null;
  description: string;
  categories: string[];
  gate_score: number;
  link_score: number | null;
  selection_reason: string;
  first_seen: string;
  last_seen: string;
}

export interface RecordsResponse {
  total: number;
  offset: number;
  records: DatasetRecord[];
}

export const COUNTER_FIELDS = [
  "papers_seen",
  "gate_positives",
  "descriptions_extracted",
  "links_selected",
  "records_written",
  "reclassified_negatives",
  "errors_count",
] as const;

export type CounterField = (typeof COUNTER_FIELDS)[number];
