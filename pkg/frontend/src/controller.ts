// Session state machine behind the command bar. One in-flight request at a
// time; the DOM layer re-renders whenever `render` fires. The only client
// state is the session id — everything visible comes from server responses.

import type { ApiClient } from "./api.js";
import type { AdapterState, Trace } from "./types.js";
import { suggestionsFrom, type PickerEntry } from "./trace.js";

export class CommandController {
  sessionId: string | null = null;
  busy = false;
  lastTrace: Trace | null = null;
  state: AdapterState | null = null;
  validation: string | null = null;
  render: () => void = () => {};

  constructor(private api: ApiClient) {}

  get pickerEntries(): PickerEntry[] {
    return this.lastTrace ? suggestionsFrom(this.lastTrace) : [];
  }

  get awaitingSelection(): boolean {
    return this.lastTrace?.awaiting === "selection";
  }

  async init(adapter = "editor", language = "en"): Promise<void> {
    this.sessionId = await this.api.createSession(adapter, language);
    this.state = await this.api.fetchState(this.sessionId);
    this.render();
  }

  async refreshState(): Promise<void> {
    if (!this.sessionId) return;
    this.state = await this.api.fetchState(this.sessionId);
    this.render();
  }

  async submit(text: string): Promise<void> {
    if (!this.sessionId || this.busy) return;
    if (!text.trim()) {
      this.validation = "type a command first";
      this.render();
      return;
    }
    this.validation = null;
    this.busy = true;
    this.render();
    try {
      this.lastTrace = await this.api.sendCommand(this.sessionId, text);
      this.state = await this.api.fetchState(this.sessionId);
    } finally {
      this.busy = false;
      this.render();
    }
  }

  async choose(surface: string, index: number): Promise<void> {
    if (!this.sessionId || this.busy || !this.awaitingSelection) return;
    this.busy = true;
    this.render();
    try {
      this.lastTrace = await this.api.sendSelection(this.sessionId, surface, index);
      this.state = await this.api.fetchState(this.sessionId);
    } finally {
      this.busy = false;
      this.render();
    }
  }

  async rejectSuggestions(): Promise<void> {
    if (this.awaitingSelection) {
      await this.choose("", -1);
    }
  }

  async loadSuit(suitId: string): Promise<void> {
    if (!this.sessionId || this.busy) return;
    this.busy = true;
    this.render();
    try {
      await this.api.loadSuit(this.sessionId, suitId);
      this.state = await this.api.fetchState(this.sessionId);
    } finally {
      this.busy = false;
      this.render();
    }
  }
}
