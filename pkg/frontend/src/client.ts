// Thin HTTP client for the session protocol; usable from the browser
// and from node during tests.

import { HistoryEntry, Request, Response } from "./core.js";

export class SessionClient {
  base: string;
  session: string | null = null;
  log: HistoryEntry[] = [];

  constructor(base = "") {
    this.base = base;
  }

  async open(): Promise<string> {
    const r = await fetch(`${this.base}/session`, { method: "POST", body: "{}" });
    const data = await r.json();
    this.session = data.session;
    return data.session;
  }

  async send(req: Request): Promise<Response> {
    if (!this.session) throw new Error("no session open");
    const r = await fetch(`${this.base}/session/${this.session}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    const resp = (await r.json()) as Response;
    this.log.push({ request: req, response: resp, timestamp: Date.now() });
    return resp;
  }
}
