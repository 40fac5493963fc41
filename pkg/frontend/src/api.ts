import {
  HistoryEvent,
  LabelResponse,
  QueryResponse,
  RankingPage,
  RankingResponse,
  SeedPick,
  SessionSummary,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

/**
 * Pull the verbatim `"score": <token>` texts out of a raw ranking body, in
 * document order. Scores are displayed from these tokens so what the user
 * reads is byte-for-byte what the service sent, never a re-formatted float.
 */
export function extractScoreTexts(raw: string): string[] {
  const out: string[] = [];
  const re = /"score"\s*:\s*([-+0-9.eE]+)/g;
  let match: RegExpExecArray | null;
  while ((match = re.exec(raw)) !== null) {
    out.push(match[1]);
  }
  return out;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class RetrievalApi {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(this.baseUrl + path, init);
    if (!resp.ok) {
      let code = `http_${resp.status}`;
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        code = body.error ?? code;
        detail = body.detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ServiceError(resp.status, code, detail);
    }
    return resp;
  }

  async createSession(
    collectionId: string,
    seeds: SeedPick[],
    strategy = "adaptive",
  ): Promise<SessionSummary> {
    const resp = await this.request(`/collections/${collectionId}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ seeds, strategy }),
    });
    return resp.json();
  }

  async session(sessionId: string): Promise<SessionSummary> {
    return (await this.request(`/sessions/${sessionId}`)).json();
  }

  async ranking(sessionId: string, topK = 16, offset = 0): Promise<RankingPage> {
    const resp = await this.request(
      `/sessions/${sessionId}/ranking?top_k=${topK}&offset=${offset}`,
    );
    const raw = await resp.text();
    const data = JSON.parse(raw) as RankingResponse;
    return { data, scoreTexts: extractScoreTexts(raw), raw };
  }

  async query(sessionId: string): Promise<QueryResponse> {
    return (await this.request(`/sessions/${sessionId}/query`)).json();
  }

  async submitLabel(
    sessionId: string,
    item: number,
    label: 1 | -1,
    volunteer = false,
  ): Promise<LabelResponse> {
    const resp = await this.request(`/sessions/${sessionId}/labels`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ item, label, volunteer }),
    });
    return resp.json();
  }

  async history(sessionId: string): Promise<HistoryEvent[]> {
    const body = await (await this.request(`/sessions/${sessionId}/history`)).json();
    return body.events;
  }
}
