// Pure console logic over the session protocol: rendering, request
// construction, history, script export, and replay.  No kernel logic
// lives here; the view renders exactly what the server sent.

export interface HypView {
  handle: string;
  text: string;
  tactics?: string[];
}

export interface GoalView {
  index: number;
  hyps: HypView[];
  goal: string;
  tactics?: string[];
}

export interface Request {
  id: number;
  cmd: "load" | "theorem" | "tactic" | "undo" | "state" | "search" | "qed";
  payload?: string;
  depth?: number;
}

export interface Response {
  id: number;
  ok: boolean;
  subgoals?: GoalView[];
  answers?: Record<string, string>;
  message?: string;
  error?: string;
}

export interface HistoryEntry {
  request: Request;
  response: Response;
  timestamp: number;
}

// One view per subgoal, handles preserved; an error response renders the
// server message verbatim.
export function renderGoals(resp: Response): GoalView[] {
  if (!resp.ok) {
    throw new ProtocolError(resp.error ?? "unknown server error");
  }
  return (resp.subgoals ?? []).map((g) => ({
    index: g.index,
    hyps: (g.hyps ?? []).map((h) => ({ ...h })),
    goal: g.goal,
    tactics: g.tactics ? [...g.tactics] : [],
  }));
}

export class ProtocolError extends Error {}

let nextId = 1;

export function resetIds(start = 1): void {
  nextId = start;
}

// Exactly one protocol request per submission.  Typed text is sent as
// written; a hypothesis click plus a tactic choice becomes "tactic H".
export function submitTactic(text: string): Request;
export function submitTactic(hypHandle: string, tactic: string): Request;
export function submitTactic(a: string, b?: string): Request {
  const payload = b === undefined ? a.trim() : `${b.trim()} ${a.trim()}`;
  return { id: nextId++, cmd: "tactic", payload };
}

export function makeRequest(cmd: Request["cmd"], payload?: string, depth?: number): Request {
  const req: Request = { id: nextId++, cmd };
  if (payload !== undefined) req.payload = payload;
  if (depth !== undefined) req.depth = depth;
  return req;
}

// The console state is a pure function of the history (replay-tested):
// fold the responses, taking the last rendering.
export interface ConsoleState {
  goals: GoalView[];
  message: string;
  proved: string[];
  theorem?: string;
}

export function foldState(log: HistoryEntry[]): ConsoleState {
  let goals: GoalView[] = [];
  let message = "";
  const proved: string[] = [];
  let theorem: string | undefined;
  for (const { request, response } of log) {
    if (!response.ok) {
      message = response.error ?? "error";
      continue;
    }
    if (request.cmd === "theorem") {
      theorem = request.payload;
    }
    if (response.subgoals !== undefined) {
      goals = renderGoals(response);
    }
    message = response.message ?? "";
    if (request.cmd === "qed" && theorem) {
      proved.push(theorem.split(":")[0].trim());
    }
  }
  return { goals, message, proved, theorem };
}

// Export the request log as a batch-checkable script: the theorem
// statement plus the surviving tactic lines (undone steps drop out).
export function exportScript(log: HistoryEntry[]): string {
  const out: string[] = [];
  let tactics: string[] = [];
  let theorem: string | undefined;
  let importUnit: string | undefined;
  const emit = () => {
    if (theorem !== undefined) {
      out.push(`Theorem ${theorem.includes(":") ? theorem : "goal : " + theorem}.`);
      out.push("Proof.");
      for (const t of tactics) out.push(`  ${t}.`);
      out.push("Qed.");
      out.push("");
    }
    theorem = undefined;
    tactics = [];
  };
  for (const { request, response } of log) {
    if (!response.ok) continue;
    switch (request.cmd) {
      case "load":
        importUnit = request.payload;
        break;
      case "theorem":
        emit();
        theorem = request.payload;
        tactics = [];
        break;
      case "tactic":
        tactics.push((request.payload ?? "").trim());
        break;
      case "undo":
        if (tactics.length > 0) tactics.pop();
        else theorem = undefined;
        break;
      case "qed":
        emit();
        break;
    }
  }
  const header = importUnit ? [`Import ${importUnit}.`, ""] : [];
  return header.concat(out).join("\n");
}

// A deterministic textual rendering of a response, used by the replay
// check: replaying a request log must reproduce these exactly.
export function renderText(resp: Response): string {
  if (!resp.ok) return `error: ${resp.error}`;
  const parts: string[] = [];
  if (resp.message) parts.push(resp.message);
  for (const g of resp.subgoals ?? []) {
    const lines = g.hyps.map((h) => `${h.handle} : ${h.text}`);
    lines.push(`|- ${g.goal}`);
    parts.push(lines.join("\n"));
  }
  if (resp.answers) {
    for (const [k, v] of Object.entries(resp.answers)) parts.push(`${k} = ${v}`);
  }
  return parts.join("\n\n");
}
