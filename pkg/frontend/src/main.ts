import { RetrievalApi } from "./api.js";
import { SessionScreen } from "./session.js";
import { mountWizard } from "./wizard.js";

/**
 * Entry point: ?collection=<id> starts the seed wizard against that
 * collection; ?session=<id> resumes an existing session. The service base
 * URL defaults to same-origin and can be overridden with ?service=.
 */
export async function boot(root: HTMLElement, location: Location): Promise<void> {
  const params = new URLSearchParams(location.search);
  const base = params.get("service") ?? "";
  const api = new RetrievalApi(base);

  const sessionId = params.get("session");
  if (sessionId) {
    const screen = new SessionScreen(root, api, { sessionId });
    await screen.refresh();
    return;
  }

  const collectionId = params.get("collection");
  if (!collectionId) {
    root.textContent =
      "open with ?collection=<collection id> to start, or ?session=<session id> to resume";
    return;
  }
  const resp = await fetch(`${base}/collections/${collectionId}`);
  if (!resp.ok) {
    root.textContent = `unknown collection ${collectionId}`;
    return;
  }
  const info = await resp.json();
  mountWizard(root, api, {
    collectionId,
    itemCount: info.n,
    onCreated: (session) => {
      const screen = new SessionScreen(root, api, { sessionId: session.session_id });
      void screen.refresh();
    },
  });
}

declare const window: (Window & typeof globalThis) | undefined;

if (typeof window !== "undefined" && typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) {
    void boot(root, window.location);
  }
}
