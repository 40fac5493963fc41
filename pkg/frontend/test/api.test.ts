import { describe, expect, it } from "vitest";

import { RetrievalApi, ServiceError, extractScoreTexts } from "../src/api.js";

describe("extractScoreTexts", () => {
  it("pulls verbatim score tokens in document order", () => {
    const raw =
      '{"items": [{"item": 3, "score": 0.8999999999999999, "predicted": 1}, ' +
      '{"item": 1, "score": -0.5, "predicted": -1}, ' +
      '{"item": 9, "score": 1e-05, "predicted": -1}, ' +
      '{"item": 2, "score": 2.0, "predicted": 1}], "theta": 0.25}';
    expect(extractScoreTexts(raw)).toEqual([
      "0.8999999999999999",
      "-0.5",
      "1e-05",
      "2.0",
    ]);
  });

  it("returns an empty list for an empty page", () => {
    expect(extractScoreTexts('{"items": [], "theta": 0.0}')).toEqual([]);
  });
});

function fakeResponse(status: number, body: unknown): Response {
  const text = typeof body === "string" ? body : JSON.stringify(body);
  return new Response(text, {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("RetrievalApi", () => {
  it("posts label submissions with the exact wire fields", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const api = new RetrievalApi("http://svc", async (url, init) => {
      calls.push({ url, init });
      return fakeResponse(200, { round: 2, theta: 0.5, queried_next: 7 });
    });
    const out = await api.submitLabel("sid", 42, -1, true);
    expect(out).toEqual({ round: 2, theta: 0.5, queried_next: 7 });
    expect(calls[0].url).toBe("http://svc/sessions/sid/labels");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({
      item: 42,
      label: -1,
      volunteer: true,
    });
  });

  it("maps service error envelopes to ServiceError", async () => {
    const api = new RetrievalApi("", async () =>
      fakeResponse(409, { error: "not_pending_item", detail: "item 5 is not pending" }),
    );
    await expect(api.submitLabel("sid", 5, 1)).rejects.toMatchObject({
      status: 409,
      code: "not_pending_item",
    });
  });

  it("keeps ranking raw text alongside parsed data", async () => {
    const raw =
      '{"items":[{"item":0,"external_id":"item00000","score":0.75,' +
      '"predicted":1,"labeled":null,"thumbnail":null}],"theta":0.0}';
    const api = new RetrievalApi("", async () => fakeResponse(200, raw));
    const page = await api.ranking("sid", 1, 0);
    expect(page.raw).toBe(raw);
    expect(page.data.items[0].item).toBe(0);
    expect(page.scoreTexts).toEqual(["0.75"]);
  });

  it("surfaces non-JSON failures with the HTTP status", async () => {
    const api = new RetrievalApi("", async () => new Response("boom", { status: 500 }));
    await expect(api.session("sid")).rejects.toBeInstanceOf(ServiceError);
  });
});
