// Pure console logic over the session protocol: rendering, request
// construction, history, script export, and replay.  No kernel logic
// lives here; the view renders exactly what the server sent.
// One view per subgoal, handles preserved; an error response renders the
// server message verbatim.
export function renderGoals(resp) {
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
export class ProtocolError extends Error {
}
let nextId = 1;
export function resetIds(start = 1) {
    nextId = start;
}
export function submitTactic(a, b) {
    const payload = b === undefined ? a.trim() : `${b.trim()} ${a.trim()}`;
    return { id: nextId++, cmd: "tactic", payload };
}
export function makeRequest(cmd, payload, depth) {
    const req = { id: nextId++, cmd };
    if (payload !== undefined)
        req.payload = payload;
    if (depth !== undefined)
        req.depth = depth;
    return req;
}
export function foldState(log) {
    let goals = [];
    let message = "";
    const proved = [];
    let theorem;
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
export function exportScript(log) {
    const out = [];
    let tactics = [];
    let theorem;
    let importUnit;
    const emit = () => {
        if (theorem !== undefined) {
            out.push(`Theorem ${theorem.includes(":") ? theorem : "goal : " + theorem}.`);
            out.push("Proof.");
            for (const t of tactics)
                out.push(`  ${t}.`);
            out.push("Qed.");
            out.push("");
        }
        theorem = undefined;
        tactics = [];
    };
    for (const { request, response } of log) {
        if (!response.ok)
            continue;
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
                if (tactics.length > 0)
                    tactics.pop();
                else
                    theorem = undefined;
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
export function renderText(resp) {
    if (!resp.ok)
        return `error: ${resp.error}`;
    const parts = [];
    if (resp.message)
        parts.push(resp.message);
    for (const g of resp.subgoals ?? []) {
        const lines = g.hyps.map((h) => `${h.handle} : ${h.text}`);
        lines.push(`|- ${g.goal}`);
        parts.push(lines.join("\n"));
    }
    if (resp.answers) {
        for (const [k, v] of Object.entries(resp.answers))
            parts.push(`${k} = ${v}`);
    }
    return parts.join("\n\n");
}
