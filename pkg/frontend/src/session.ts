import { RetrievalApi, ServiceError } from "./api.js";
import { gridOrder, renderGrid } from "./grid.js";
import { renderSparkline } from "./sparkline.js";
import { QueryResponse, RankingPage } from "./types.js";

const PAGE_SIZE = 16;

export interface SessionScreenOptions {
  sessionId: string;
  pageSize?: number;
}

/**
 * One live retrieval session. All numbers on screen come from service
 * responses; after every accepted label the query panel and the ranking
 * are refetched (a spinner bridges the gap, never made-up data). At most
 * one label submission is in flight at a time.
 */
export class SessionScreen {
  readonly root: HTMLElement;
  private readonly api: RetrievalApi;
  private readonly sessionId: string;
  private readonly pageSize: number;

  private offset = 0;
  private inFlight = false;
  private thetaTrace: number[] = [];

  // elements
  private roundEl!: HTMLElement;
  private thetaEl!: HTMLElement;
  private queryPanel!: HTMLElement;
  private gridEl!: HTMLElement;
  private pagerLabel!: HTMLElement;
  private sparklineEl!: HTMLElement;
  private errorEl!: HTMLElement;
  private busyEl!: HTMLElement;

  constructor(root: HTMLElement, api: RetrievalApi, options: SessionScreenOptions) {
    this.root = root;
    this.api = api;
    this.sessionId = options.sessionId;
    this.pageSize = options.pageSize ?? PAGE_SIZE;
    this.build();
  }

  private build(): void {
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    this.root.className = "session";

    const status = doc.createElement("div");
    status.className = "status-bar";
    this.roundEl = doc.createElement("span");
    this.roundEl.className = "round";
    this.thetaEl = doc.createElement("span");
    this.thetaEl.className = "theta";
    this.busyEl = doc.createElement("span");
    this.busyEl.className = "spinner";
    this.busyEl.hidden = true;
    this.busyEl.textContent = "…";
    status.append(this.roundEl, this.thetaEl, this.busyEl);
    this.root.appendChild(status);

    this.errorEl = doc.createElement("p");
    this.errorEl.className = "error-banner";
    this.errorEl.hidden = true;
    this.root.appendChild(this.errorEl);

    this.queryPanel = doc.createElement("div");
    this.queryPanel.className = "query-panel";
    this.root.appendChild(this.queryPanel);

    this.sparklineEl = doc.createElement("div");
    this.sparklineEl.className = "theta-trace";
    this.root.appendChild(this.sparklineEl);

    this.gridEl = doc.createElement("div");
    this.gridEl.className = "ranking-grid";
    this.root.appendChild(this.gridEl);

    const pager = doc.createElement("div");
    pager.className = "pager";
    const prev = doc.createElement("button");
    prev.textContent = "prev";
    prev.addEventListener("click", () => this.page(-1));
    const next = doc.createElement("button");
    next.textContent = "next";
    next.addEventListener("click", () => this.page(1));
    this.pagerLabel = doc.createElement("span");
    pager.append(prev, this.pagerLabel, next);
    this.root.appendChild(pager);
  }

  async refresh(): Promise<void> {
    const summary = await this.api.session(this.sessionId);
    this.roundEl.textContent = `round ${summary.round}`;
    this.thetaEl.textContent = `θ = ${summary.theta}`;
    this.thetaTrace = [0, ...(await this.api.history(this.sessionId))
      .filter((e) => !e.volunteer)
      .map((e) => e.theta_after)];
    renderSparkline(this.sparklineEl, this.thetaTrace);
    await this.renderQuery();
    await this.renderRanking();
  }

  private async renderQuery(): Promise<void> {
    const doc = this.root.ownerDocument;
    this.queryPanel.textContent = "";
    let query: QueryResponse;
    try {
      query = await this.api.query(this.sessionId);
    } catch (err) {
      const done = doc.createElement("p");
      done.textContent = "every item is labeled";
      this.queryPanel.appendChild(done);
      return;
    }
    const caption = doc.createElement("p");
    caption.textContent = `label this item (query for round ${query.round}):`;
    const id = doc.createElement("strong");
    id.className = "query-item";
    id.dataset.item = String(query.item);
    id.textContent = query.external_id;
    caption.appendChild(id);
    this.queryPanel.appendChild(caption);
    for (const [text, value] of [["relevant", 1], ["not relevant", -1]] as const) {
      const btn = doc.createElement("button");
      btn.className = `label-btn ${value === 1 ? "pos" : "neg"}`;
      btn.textContent = text;
      btn.addEventListener("click", () => void this.submit(query.item, value, false));
      this.queryPanel.appendChild(btn);
    }
  }

  private async renderRanking(): Promise<void> {
    const page = await this.api.ranking(this.sessionId, this.pageSize, this.offset);
    renderGrid(this.gridEl, page, {
      onVolunteerLabel: (item, label) => void this.submit(item, label, true),
    });
    this.pagerLabel.textContent = `items ${this.offset + 1}–${
      this.offset + page.data.items.length
    }`;
  }

  /** Single-flight labeling; re-entrant clicks are ignored until refresh. */
  private async submit(item: number, label: 1 | -1, volunteer: boolean): Promise<void> {
    if (this.inFlight) {
      return;
    }
    this.inFlight = true;
    this.busyEl.hidden = false;
    this.errorEl.hidden = true;
    try {
      await this.api.submitLabel(this.sessionId, item, label, volunteer);
    } catch (err) {
      if (err instanceof ServiceError && err.status === 409) {
        this.errorEl.textContent = "that item is no longer the pending query; refreshed — try again";
      } else {
        this.errorEl.textContent = err instanceof Error ? err.message : "label failed";
      }
      this.errorEl.hidden = false;
    } finally {
      this.inFlight = false;
      this.busyEl.hidden = true;
    }
    await this.refresh();
  }

  private async page(direction: number): Promise<void> {
    this.offset = Math.max(0, this.offset + direction * this.pageSize);
    await this.renderRanking();
  }

  // --- test hooks ---------------------------------------------------------

  currentRoundText(): string {
    return this.roundEl.textContent ?? "";
  }

  currentGridOrder(): number[] {
    return gridOrder(this.gridEl);
  }

  displayedScoreTexts(): string[] {
    return Array.from(this.gridEl.querySelectorAll(".score")).map(
      (el) => el.textContent ?? "",
    );
  }

  pendingQueryItem(): number | null {
    const el = this.queryPanel.querySelector<HTMLElement>(".query-item");
    return el ? Number(el.dataset.item) : null;
  }

  labelButtons(): HTMLButtonElement[] {
    return Array.from(this.queryPanel.querySelectorAll("button"));
  }
}
