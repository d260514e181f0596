// Thin client over the engine service endpoints.

import type { AdapterState, SuitInfo, Trace } from "./types.js";

export class ApiClient {
  constructor(private base: string = "") {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw new Error(`${path} failed: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(this.base + path);
    if (!response.ok) {
      throw new Error(`${path} failed: ${response.status}`);
    }
    return (await response.json()) as T;
  }

  async createSession(adapter = "editor", language = "en"): Promise<string> {
    const created = await this.post<{ id: string }>("/api/session", {
      adapter,
      language,
    });
    return created.id;
  }

  sendCommand(sessionId: string, text: string): Promise<Trace> {
    return this.post<Trace>(`/api/session/${sessionId}/command`, { text });
  }

  sendSelection(
    sessionId: string,
    surface: string,
    index: number,
  ): Promise<Trace> {
    return this.post<Trace>(`/api/session/${sessionId}/selection`, {
      surface,
      index,
    });
  }

  fetchState(sessionId: string): Promise<AdapterState> {
    return this.get<AdapterState>(`/api/session/${sessionId}/state`);
  }

  listSuits(): Promise<SuitInfo[]> {
    return this.get<SuitInfo[]>("/api/suits");
  }

  loadSuit(sessionId: string, suitId: string): Promise<{ id: string; adapter: string }> {
    return this.post(`/api/session/${sessionId}/suit`, { suit_id: suitId });
  }

  openEvents(sessionId: string): EventSource {
    return new EventSource(`${this.base}/api/events/${sessionId}`);
  }
}
