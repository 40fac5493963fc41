import { RetrievalApi, ServiceError } from "./api.js";
import { SeedPick, SessionSummary } from "./types.js";

export interface WizardOptions {
  collectionId: string;
  itemCount: number;
  pickerSize?: number; // how many tiles to offer for seed picking
  onCreated: (session: SessionSummary) => void;
}

/**
 * Seed-picking wizard: a tile per item (cycling blank -> + -> - -> blank),
 * submit enabled once at least one positive is picked. Service errors stay
 * inline; the picks survive a failed submit.
 */
export function mountWizard(
  root: HTMLElement,
  api: RetrievalApi,
  options: WizardOptions,
): void {
  const doc = root.ownerDocument;
  const picks = new Map<number, 1 | -1>();
  root.textContent = "";
  root.className = "wizard";

  const heading = doc.createElement("h2");
  heading.textContent = "Pick seed examples";
  root.appendChild(heading);

  const hint = doc.createElement("p");
  hint.className = "hint";
  hint.textContent =
    "Mark a few items that belong to your concept (+) and optionally some that do not (−).";
  root.appendChild(hint);

  const grid = doc.createElement("div");
  grid.className = "picker-grid";
  root.appendChild(grid);

  const banner = doc.createElement("p");
  banner.className = "error-banner";
  banner.hidden = true;
  root.appendChild(banner);

  const submit = doc.createElement("button");
  submit.className = "submit";
  submit.textContent = "Start session";
  root.appendChild(submit);

  const note = doc.createElement("span");
  note.className = "submit-note";
  root.appendChild(note);

  function refreshSubmit(): void {
    const positives = Array.from(picks.values()).filter((v) => v === 1).length;
    submit.disabled = positives < 1;
    note.textContent =
      positives < 1
        ? "pick at least one positive example"
        : `${positives} positive / ${picks.size - positives} negative picks`;
  }

  const size = Math.min(options.pickerSize ?? 60, options.itemCount);
  for (let item = 0; item < size; item += 1) {
    const tile = doc.createElement("button");
    tile.className = "pick-tile";
    tile.dataset.item = String(item);
    tile.textContent = `#${item}`;
    tile.addEventListener("click", () => {
      const current = picks.get(item);
      if (current === undefined) {
        picks.set(item, 1);
        tile.className = "pick-tile picked-pos";
      } else if (current === 1) {
        picks.set(item, -1);
        tile.className = "pick-tile picked-neg";
      } else {
        picks.delete(item);
        tile.className = "pick-tile";
      }
      refreshSubmit();
    });
    grid.appendChild(tile);
  }
  refreshSubmit();

  submit.addEventListener("click", async () => {
    const seeds: SeedPick[] = Array.from(picks.entries()).map(([item, label]) => ({
      item,
      label,
    }));
    submit.disabled = true;
    try {
      const session = await api.createSession(options.collectionId, seeds);
      options.onCreated(session);
    } catch (err) {
      banner.hidden = false;
      banner.textContent =
        err instanceof ServiceError ? err.message : "session creation failed";
      refreshSubmit(); // picks are preserved; submit re-enabled if still valid
    }
  });
}
