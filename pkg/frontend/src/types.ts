// Shapes mirror the retrieval service's JSON responses exactly; the UI
// never derives scores, thresholds or predictions on its own.

export interface RankedItem {
  item: number;
  external_id: string;
  score: number;
  predicted: 1 | -1;
  labeled: 1 | -1 | null;
  thumbnail: string | null;
}

export interface RankingResponse {
  items: RankedItem[];
  theta: number;
}

export interface QueryResponse {
  item: number;
  external_id: string;
  thumbnail: string | null;
  score: number;
  round: number;
}

export interface SessionSummary {
  session_id: string;
  collection_id: string;
  strategy: string;
  round: number;
  theta: number;
  pending_item: number | null;
  labeled: number;
  n: number;
}

export interface LabelResponse {
  round: number;
  theta: number;
  queried_next: number | null;
}

export interface HistoryEvent {
  type: string;
  round: number;
  item: number;
  label: number;
  volunteer: boolean;
  theta_after: number;
  queried_next: number | null;
  ts: number;
}

export interface SeedPick {
  item: number;
  label: 1 | -1;
}

/** A ranking page plus the verbatim score text per item, in page order. */
export interface RankingPage {
  data: RankingResponse;
  scoreTexts: string[];
  raw: string;
}
