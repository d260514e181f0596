// Wire types for the engine service. Field names mirror the server's
// serialization exactly; the UI never re-derives frame content.

export interface NumFormatJson {
  kind: "cardinal" | "ordinal" | "range" | "array";
  values: number[] | "all";
  frame: "absolute" | "relative";
}

export interface ObjectRefJson {
  kind: "word" | "quotation";
  index: number;
  text?: string;
}

export interface ConditionJson {
  prep: number;
  indices: number[];
  numformat?: NumFormatJson;
  quotes?: string[];
}

export interface FrameJson {
  action: number;
  primary: ObjectRefJson;
  secondary: ObjectRefJson | null;
  conditions: ConditionJson[];
}

export interface SuggestionJson {
  index: number;
  form: string;
  score: number;
}

export interface StageRecord {
  stage: string;
  error?: { kind: string; detail: string };
  [key: string]: unknown;
}

export interface Trace {
  input: string;
  language: string;
  adapter: string;
  ok: boolean;
  awaiting: "selection" | "rephrase" | null;
  frame: FrameJson | null;
  result: { ok: boolean; handler: string; affected: number } | null;
  stages: StageRecord[];
}

export interface StyleSpan {
  start: number;
  end: number;
  style: string;
}

export interface EditorStateJson {
  kind: "editor";
  lines: string[];
  styles: StyleSpan[][];
  selection: [number, number] | null;
}

export interface SceneObjectJson {
  kind: string;
  name: string;
  params: Record<string, number>;
}

export interface SceneStateJson {
  kind: "scene";
  objects: SceneObjectJson[];
}

export type AdapterState = EditorStateJson | SceneStateJson;

export interface SuitInfo {
  id: string;
  name: string;
  version: string;
  language_id: string;
  adapter_id: string;
}
