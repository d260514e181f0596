// DOM wiring: command bar, trace panel, suggestion picker, state panel.

import { ApiClient } from "./api.js";
import { CommandController } from "./controller.js";
import { editorLines, isEditor, sceneRows } from "./state.js";
import { frameCard, stageDetail, stageLabel, statusLine } from "./trace.js";
import type { AdapterState, Trace } from "./types.js";

const api = new ApiClient();
const controller = new CommandController(api);

const input = document.getElementById("command-input") as HTMLInputElement;
const runButton = document.getElementById("run-button") as HTMLButtonElement;
const status = document.getElementById("status-line") as HTMLElement;
const picker = document.getElementById("picker") as HTMLElement;
const tracePanel = document.getElementById("trace-panel") as HTMLElement;
const statePanel = document.getElementById("state-panel") as HTMLElement;
const suitSelect = document.getElementById("suit-select") as HTMLSelectElement;

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderTrace(trace: Trace | null): void {
  tracePanel.replaceChildren();
  if (!trace) return;
  if (trace.frame) {
    const card = el("div", "frame-card");
    card.append(el("h3", undefined, "Command frame"));
    const table = el("table");
    for (const row of frameCard(trace.frame)) {
      const tr = el("tr");
      tr.append(
        el("th", undefined, row.label),
        el("td", undefined, row.content),
        el("td", "indices", row.indices),
      );
      table.append(tr);
    }
    card.append(table);
    tracePanel.append(card);
  }
  const list = el("div", "stages");
  for (const stage of trace.stages) {
    const details = el("details") as HTMLDetailsElement;
    const summary = el("summary", stage.error ? "failed" : undefined,
      stageLabel(stage));
    const body = el("pre", undefined, stageDetail(stage));
    details.append(summary, body);
    list.append(details);
  }
  tracePanel.append(list);
}

function renderPicker(): void {
  picker.replaceChildren();
  // Visible iff the last trace ended awaiting a selection.
  picker.hidden = !controller.awaitingSelection;
  if (picker.hidden) return;
  picker.append(el("span", "picker-title", "Did you mean:"));
  for (const entry of controller.pickerEntries) {
    const button = el("button", "pick",
      `${entry.surface} → ${entry.form} (${entry.score.toFixed(3)})`) as HTMLButtonElement;
    button.addEventListener("click", () => {
      void controller.choose(entry.surface, entry.index);
    });
    picker.append(button);
  }
  const reject = el("button", "pick reject", "none of these") as HTMLButtonElement;
  reject.addEventListener("click", () => void controller.rejectSuggestions());
  picker.append(reject);
}

function renderState(state: AdapterState | null): void {
  statePanel.replaceChildren();
  if (!state) return;
  if (isEditor(state)) {
    statePanel.append(el("h3", undefined, "Document"));
    const list = el("ol", "editor-lines");
    for (const segments of editorLines(state)) {
      const li = el("li");
      for (const segment of segments) {
        const span = segment.styles.includes("subscript")
          ? el("sub", "subscript", segment.text)
          : el("span", undefined, segment.text);
        li.append(span);
      }
      list.append(li);
    }
    statePanel.append(list);
    return;
  }
  statePanel.append(el("h3", undefined, "Scene"));
  const table = el("table", "scene");
  const head = el("tr");
  head.append(el("th", undefined, "name"), el("th", undefined, "kind"),
    el("th", undefined, "parameters"));
  table.append(head);
  for (const row of sceneRows(state)) {
    const tr = el("tr");
    tr.append(el("td", undefined, row.name), el("td", undefined, row.kind),
      el("td", undefined, row.params));
    table.append(tr);
  }
  statePanel.append(table);
}

controller.render = () => {
  input.disabled = controller.busy;
  runButton.disabled = controller.busy;
  status.textContent = controller.validation
    ? controller.validation
    : controller.busy
      ? "running…"
      : controller.lastTrace
        ? statusLine(controller.lastTrace)
        : "ready";
  renderTrace(controller.lastTrace);
  renderPicker();
  renderState(controller.state);
};

function submit(): void {
  void controller.submit(input.value);
}

runButton.addEventListener("click", submit);
input.addEventListener("keydown", (event) => {
  if (event.key === "Enter") {
    submit();
  } else if (event.key === "Escape") {
    input.value = "";
    if (controller.awaitingSelection) void controller.rejectSuggestions();
  }
});

suitSelect.addEventListener("change", () => {
  if (suitSelect.value) void controller.loadSuit(suitSelect.value);
});

async function boot(): Promise<void> {
  await controller.init();
  for (const suit of await api.listSuits()) {
    const option = document.createElement("option");
    option.value = suit.id;
    option.textContent = `${suit.name} (${suit.id})`;
    suitSelect.append(option);
  }
  if (controller.sessionId) {
    const events = api.openEvents(controller.sessionId);
    events.addEventListener("state", () => void controller.refreshState());
  }
  input.focus();
}

void boot();
