// Pure render models for the state panel (editor lines or scene table).

import type {
  AdapterState,
  EditorStateJson,
  SceneStateJson,
  StyleSpan,
} from "./types.js";

export interface LineSegment {
  text: string;
  styles: string[];
}

// Split one line into segments carrying their style names, so subscript
// spans render as real <sub> elements.
export function lineSegments(line: string, spans: StyleSpan[]): LineSegment[] {
  const boundaries = new Set<number>([0, line.length]);
  for (const span of spans) {
    boundaries.add(Math.max(0, Math.min(span.start, line.length)));
    boundaries.add(Math.max(0, Math.min(span.end, line.length)));
  }
  const cuts = [...boundaries].sort((a, b) => a - b);
  const segments: LineSegment[] = [];
  for (let i = 0; i + 1 < cuts.length; i++) {
    const [from, to] = [cuts[i], cuts[i + 1]];
    if (from === to) continue;
    const styles = spans
      .filter((s) => s.start <= from && to <= s.end)
      .map((s) => s.style);
    segments.push({ text: line.slice(from, to), styles });
  }
  return segments;
}

export function editorLines(state: EditorStateJson): LineSegment[][] {
  return state.lines.map((line, i) => lineSegments(line, state.styles[i] ?? []));
}

export interface SceneRow {
  name: string;
  kind: string;
  params: string;
}

export function sceneRows(state: SceneStateJson): SceneRow[] {
  return state.objects.map((obj) => ({
    name: obj.name,
    kind: obj.kind,
    params: Object.entries(obj.params)
      .map(([key, value]) => `${key}=${value}`)
      .join(", "),
  }));
}

export function isEditor(state: AdapterState): state is EditorStateJson {
  return state.kind === "editor";
}
