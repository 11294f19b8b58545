// DOM wiring for the proof console: goal cards with clickable
// hypotheses, a tactic input, history, and script export.  Requests are
// serialized: the input is disabled until the response lands.

import {
  ConsoleState, GoalView, exportScript, foldState, makeRequest, renderGoals,
  submitTactic,
} from "./core.js";
import { SessionClient } from "./client.js";

const client = new SessionClient("");
let selectedHyp: string | null = null;

const el = (id: string) => document.getElementById(id)!;

function refresh(): void {
  const state: ConsoleState = foldState(client.log);
  const last = client.log[client.log.length - 1];
  const banner = el("banner");
  if (last && !last.response.ok) {
    banner.textContent = last.response.error ?? "error";
    banner.className = "banner error";
  } else {
    banner.textContent = state.message || (state.goals.length === 0 ? "no subgoals" : "");
    banner.className = "banner";
  }
  const goals = el("goals");
  goals.innerHTML = "";
  let views: GoalView[] = [];
  if (last && last.response.ok) {
    try {
      views = renderGoals(last.response);
    } catch {
      views = state.goals;
    }
  } else {
    views = state.goals;
  }
  for (const g of views) {
    const card = document.createElement("div");
    card.className = "goal";
    const head = document.createElement("div");
    head.className = "goal-head";
    head.textContent = `subgoal ${g.index}`;
    card.appendChild(head);
    for (const h of g.hyps) {
      const row = document.createElement("div");
      row.className = "hyp" + (selectedHyp === h.handle ? " selected" : "");
      row.textContent = `${h.handle} : ${h.text}`;
      row.onclick = () => {
        selectedHyp = selectedHyp === h.handle ? null : h.handle;
        refresh();
      };
      row.title = (h.tactics ?? []).join("  ");
      card.appendChild(row);
    }
    const goalRow = document.createElement("div");
    goalRow.className = "goal-line";
    goalRow.textContent = `⊢ ${g.goal}`;
    card.appendChild(goalRow);
    if (g.tactics && g.tactics.length) {
      const hints = document.createElement("div");
      hints.className = "hints";
      for (const t of g.tactics) {
        const b = document.createElement("button");
        b.textContent = t;
        b.onclick = () => run(t.replace(" ?", " "));
        hints.appendChild(b);
      }
      card.appendChild(hints);
    }
    goals.appendChild(card);
  }
  const hist = el("history");
  hist.innerHTML = "";
  for (const e of client.log.slice(-40)) {
    const li = document.createElement("li");
    li.textContent = `${e.request.cmd} ${e.request.payload ?? ""} ${e.response.ok ? "✓" : "✗"}`;
    hist.appendChild(li);
  }
  const proved = el("proved");
  proved.textContent = state.proved.length ? `proved: ${state.proved.join(", ")}` : "";
}

async function run(text: string): Promise<void> {
  const input = el("tactic") as HTMLInputElement;
  input.disabled = true;
  try {
    text = text.trim();
    let req;
    if (text.startsWith("load ")) req = makeRequest("load", text.slice(5));
    else if (text.startsWith("theorem ")) req = makeRequest("theorem", text.slice(8));
    else if (text.startsWith("search ")) req = makeRequest("search", text.slice(7));
    else if (text === "undo" || text === "qed" || text === "state") req = makeRequest(text as any);
    else if (selectedHyp) {
      req = submitTactic(selectedHyp, text);
      selectedHyp = null;
    } else req = submitTactic(text);
    await client.send(req);
  } finally {
    input.disabled = false;
    input.value = "";
    input.focus();
    refresh();
  }
}

async function main(): Promise<void> {
  await client.open();
  el("session-id").textContent = client.session ?? "";
  const input = el("tactic") as HTMLInputElement;
  input.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter" && input.value.trim()) run(input.value);
  });
  el("undo-btn").onclick = () => run("undo");
  el("qed-btn").onclick = () => run("qed");
  el("export-btn").onclick = () => {
    const blob = new Blob([exportScript(client.log)], { type: "text/plain" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "session.fnd";
    a.click();
  };
  refresh();
}

main();
