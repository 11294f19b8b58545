// Thin HTTP client for the session protocol; usable from the browser
// and from node during tests.
export class SessionClient {
    constructor(base = "") {
        this.session = null;
        this.log = [];
        this.base = base;
    }
    async open() {
        const r = await fetch(`${this.base}/session`, { method: "POST", body: "{}" });
        const data = await r.json();
        this.session = data.session;
        return data.session;
    }
    async send(req) {
        if (!this.session)
            throw new Error("no session open");
        const r = await fetch(`${this.base}/session/${this.session}`, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(req),
        });
        const resp = (await r.json());
        this.log.push({ request: req, response: resp, timestamp: Date.now() });
        return resp;
    }
}
