// DOM wiring: run picker, WebSocket lifecycle, canvas redraw on frame
// arrival, keyboard capture, and the trial history table.

import { ControlChannel, HEARTBEAT_MS } from "./keyboard.js";
import {
  controlMessage,
  parseServerMessage,
  type Role,
  type StartMessage,
} from "./protocol.js";
import {
  DEFAULT_VIEW,
  disconnectedOverlay,
  renderFrame,
} from "./render.js";
import { footerMeans, formatTime, sortRows, type SortKey } from "./stats.js";
import { ViewModel } from "./viewmodel.js";

const canvas = document.getElementById("arena") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const statusEl = document.getElementById("status")!;
const tableBody = document.querySelector("#trials tbody")!;
const tableFoot = document.querySelector("#trials tfoot")!;
const runSelect = document.getElementById("run") as HTMLSelectElement;
const roleSelect = document.getElementById("role") as HTMLSelectElement;
const seedInput = document.getElementById("seed") as HTMLInputElement;

const model = new ViewModel();
let ws: WebSocket | null = null;
let sortKey: SortKey = "trial";
let sortAscending = true;

const controls = new ControlChannel((bits) => {
  if (ws && ws.readyState === WebSocket.OPEN && model.latestFrame) {
    ws.send(
      JSON.stringify(
        controlMessage(model.latestFrame.trial, bits, Date.now()),
      ),
    );
  }
});

function setStatus(text: string): void {
  statusEl.textContent = text;
}

function redraw(): void {
  if (model.connection !== "connected") {
    disconnectedOverlay(ctx, canvas.width, canvas.height);
    return;
  }
  if (model.latestFrame) {
    renderFrame(ctx, model.latestFrame, DEFAULT_VIEW, canvas.width,
      canvas.height);
  }
}

function renderTable(): void {
  const rows = sortRows(model.trialRows, sortKey, sortAscending);
  tableBody.innerHTML = rows
    .map(
      (r) =>
        `<tr><td>${r.trial}</td><td>${r.role}</td>` +
        `<td>${r.generation}</td><td>${formatTime(r.time)}</td>` +
        `<td>${r.caught ? "caught" : "timeout"}</td></tr>`,
    )
    .join("");
  tableFoot.innerHTML = footerMeans(model.trialRows)
    .map(
      (f) =>
        `<tr><td colspan="2">mean ${f.role}</td><td>${f.generation}</td>` +
        `<td>${formatTime(f.mean)}</td><td>n=${f.count}</td></tr>`,
    )
    .join("");
}

model.onFrame = redraw;
model.onTrialEnd = () => {
  controls.trialEnded();
  renderTable();
  ws?.send(JSON.stringify({ type: "stats" }));
};
model.onStats = renderTable;

async function loadRuns(): Promise<void> {
  const res = await fetch("/runs");
  const payload = await res.json();
  runSelect.innerHTML = "";
  for (const run of payload.runs) {
    for (const gen of run.generations) {
      const opt = document.createElement("option");
      opt.value = String(gen);
      opt.textContent = `${run.run} / generation ${gen}`;
      if (
        run.run === payload.serving.run &&
        gen === payload.serving.generation
      ) {
        opt.selected = true;
      }
      runSelect.appendChild(opt);
    }
  }
}

function connect(): void {
  const url = `ws://${location.host}/ws`;
  model.connection = "connecting";
  setStatus("connecting...");
  ws = new WebSocket(url);
  ws.onopen = () => {
    model.connection = "connected";
    setStatus("connected");
  };
  ws.onmessage = (event) => model.apply(parseServerMessage(event.data));
  ws.onclose = () => {
    model.connection = "disconnected";
    setStatus("disconnected");
    redraw();
  };
}

function startTrial(): void {
  if (!ws || ws.readyState !== WebSocket.OPEN) return;
  const msg: StartMessage = {
    type: "start",
    role: roleSelect.value as Role,
    seed: Number(seedInput.value) || 0,
    generation: Number(runSelect.value),
  };
  model.trialActive = true;
  controls.trialStarted();
  ws.send(JSON.stringify(msg));
}

window.addEventListener("keydown", (e) => {
  if (controls.keyDown(e.key)) e.preventDefault();
});
window.addEventListener("keyup", (e) => {
  if (controls.keyUp(e.key)) e.preventDefault();
});
setInterval(() => controls.poll(), HEARTBEAT_MS / 2);

document.getElementById("connect")!.addEventListener("click", connect);
document.getElementById("start")!.addEventListener("click", startTrial);
document.querySelectorAll("#trials th[data-key]").forEach((th) => {
  th.addEventListener("click", () => {
    const key = (th as HTMLElement).dataset.key as SortKey;
    sortAscending = key === sortKey ? !sortAscending : true;
    sortKey = key;
    renderTable();
  });
});

loadRuns().catch(() => setStatus("run listing unavailable"));
redraw();
