// Pure render models for the trace panel. Everything shown comes straight
// from the serialized trace; nothing is re-derived client-side.

import type {
  ConditionJson,
  FrameJson,
  NumFormatJson,
  ObjectRefJson,
  StageRecord,
  SuggestionJson,
  Trace,
} from "./types.js";

export interface FrameCardRow {
  label: string;
  content: string;
  indices: string;
}

function describeObject(ref: ObjectRefJson | null): string {
  if (!ref) return "—";
  if (ref.kind === "quotation") return `“${ref.text ?? ""}”`;
  return `word #${ref.index}`;
}

function describeNumFormat(nf: NumFormatJson): string {
  const values = nf.values === "all" ? "all" : nf.values.join(", ");
  return `[${nf.frame}][${nf.kind}] ${values}`;
}

function describeCondition(cond: ConditionJson): string {
  const parts: string[] = [];
  if (cond.numformat) parts.push(describeNumFormat(cond.numformat));
  if (cond.quotes) parts.push(cond.quotes.map((q) => `“${q}”`).join(" "));
  return parts.join(" ") || "—";
}

export function frameCard(frame: FrameJson): FrameCardRow[] {
  const rows: FrameCardRow[] = [
    { label: "Action", content: `#${frame.action}`, indices: String(frame.action) },
    {
      label: "Primary Object",
      content: describeObject(frame.primary),
      indices: String(frame.primary.index),
    },
  ];
  if (frame.secondary) {
    rows.push({
      label: "Secondary Object",
      content: describeObject(frame.secondary),
      indices: String(frame.secondary.index),
    });
  }
  frame.conditions.forEach((cond, i) => {
    rows.push({
      label: `Condition [${i}]`,
      content: describeCondition(cond),
      indices: cond.indices.join(" "),
    });
  });
  return rows;
}

export function stageLabel(stage: StageRecord): string {
  if (stage.error) return `${stage.stage} ✗ ${stage.error.kind}`;
  if (stage.stage === "rewrite") return `rewrite: ${String(stage["rule"])}`;
  return stage.stage;
}

export function stageDetail(stage: StageRecord): string {
  const payload: Record<string, unknown> = {};
  for (const [key, value] of Object.entries(stage)) {
    if (key !== "stage") payload[key] = value;
  }
  return JSON.stringify(payload, null, 2);
}

export interface PickerEntry {
  surface: string;
  index: number;
  form: string;
  score: number;
}

export function suggestionsFrom(trace: Trace): PickerEntry[] {
  if (trace.awaiting !== "selection") return [];
  const entries: PickerEntry[] = [];
  for (const stage of trace.stages) {
    if (stage.stage !== "learner_suggestions") continue;
    const bySurface = stage["suggestions"] as Record<string, SuggestionJson[]>;
    for (const [surface, items] of Object.entries(bySurface)) {
      for (const item of items) {
        entries.push({ surface, ...item });
      }
    }
  }
  return entries;
}

export function statusLine(trace: Trace): string {
  if (trace.awaiting === "selection") return "pick a suggestion (Esc to dismiss)";
  if (trace.awaiting === "rephrase") return "please rephrase the command";
  if (trace.ok && trace.result) {
    return `ok: ${trace.result.handler} affected ${trace.result.affected}`;
  }
  for (let i = trace.stages.length - 1; i >= 0; i--) {
    const stage = trace.stages[i];
    const error =
      stage.error ??
      (stage["result"] as { error?: { kind: string; detail: string } } | undefined)
        ?.error;
    if (error) return `error ${error.kind}: ${error.detail}`;
  }
  return "error";
}
