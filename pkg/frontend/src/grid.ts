import { RankingPage } from "./types.js";

export interface GridCallbacks {
  onVolunteerLabel: (item: number, label: 1 | -1) => void;
}

/** Placeholder glyph for collections with no thumbnail references. */
function tileVisual(doc: Document, thumbnail: string | null): HTMLElement {
  if (thumbnail) {
    const img = doc.createElement("img");
    img.className = "thumb";
    img.src = thumbnail;
    img.alt = "";
    return img;
  }
  const glyph = doc.createElement("div");
  glyph.className = "thumb placeholder";
  glyph.textContent = "▦";
  return glyph;
}

/**
 * Render one ranking page into `root` as a tile grid. Scores are written
 * from the page's verbatim score texts; labeled items get a badge; every
 * unlabeled tile carries volunteer +/- buttons.
 */
export function renderGrid(
  root: HTMLElement,
  page: RankingPage,
  callbacks: GridCallbacks,
): void {
  const doc = root.ownerDocument;
  root.textContent = "";
  if (page.data.items.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "empty";
    empty.textContent = "no more items";
    root.appendChild(empty);
    return;
  }
  page.data.items.forEach((item, i) => {
    const tile = doc.createElement("div");
    tile.className = "tile";
    tile.dataset.item = String(item.item);
    tile.appendChild(tileVisual(doc, item.thumbnail));

    const id = doc.createElement("div");
    id.className = "external-id";
    id.textContent = item.external_id;
    tile.appendChild(id);

    const score = doc.createElement("span");
    score.className = "score";
    score.textContent = page.scoreTexts[i];
    tile.appendChild(score);

    const predicted = doc.createElement("span");
    predicted.className = `predicted ${item.predicted === 1 ? "pos" : "neg"}`;
    predicted.textContent = item.predicted === 1 ? "+" : "−";
    tile.appendChild(predicted);

    if (item.labeled !== null) {
      const badge = doc.createElement("span");
      badge.className = `label-badge ${item.labeled === 1 ? "pos" : "neg"}`;
      badge.textContent = item.labeled === 1 ? "labeled +" : "labeled −";
      tile.appendChild(badge);
    } else {
      const actions = doc.createElement("div");
      actions.className = "volunteer";
      for (const value of [1, -1] as const) {
        const btn = doc.createElement("button");
        btn.className = `volunteer-btn ${value === 1 ? "pos" : "neg"}`;
        btn.textContent = value === 1 ? "mark +" : "mark −";
        btn.addEventListener("click", () => callbacks.onVolunteerLabel(item.item, value));
        actions.appendChild(btn);
      }
      tile.appendChild(actions);
    }
    root.appendChild(tile);
  });
}

/** Item order of the currently rendered grid (for re-order detection). */
export function gridOrder(root: HTMLElement): number[] {
  return Array.from(root.querySelectorAll<HTMLElement>(".tile")).map((tile) =>
    Number(tile.dataset.item),
  );
}
