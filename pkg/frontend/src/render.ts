/** DOM renderer driven solely by ChatState. */

import { AppView } from "./app.js";
import {
  ChatState,
  inputEnabled,
  questionnaireVisible,
} from "./state.js";

export interface DomRefs {
  transcript: HTMLElement;
  input: HTMLInputElement;
  sendButton: HTMLButtonElement;
  startButton: HTMLButtonElement;
  policySelect: HTMLSelectElement;
  questionnaire: HTMLElement;
  errorBanner: HTMLElement;
  closedNotice: HTMLElement;
}

export class DomView implements AppView {
  constructor(private readonly refs: DomRefs) {}

  render(state: ChatState): void {
    const r = this.refs;

    r.transcript.replaceChildren(
      ...state.messages.map((m) => {
        const row = document.createElement("div");
        row.className = `message ${m.speaker}${m.failed ? " failed" : ""}`;
        row.textContent = m.text;
        return row;
      }),
    );
    r.transcript.scrollTop = r.transcript.scrollHeight;

    const canType = inputEnabled(state);
    r.input.disabled = !canType;
    r.sendButton.disabled = !canType || r.input.value.trim() === "";

    r.startButton.disabled =
      state.phase === "starting" ||
      state.phase === "waiting" ||
      state.phase === "submitting";
    r.startButton.textContent =
      state.phase === "idle" ? "Start chat" : "New chat";

    // hide the selector when there is nothing to choose between
    r.policySelect.hidden = r.policySelect.options.length <= 1;
    r.policySelect.disabled = state.phase !== "idle" && state.phase !== "closed";

    r.questionnaire.hidden = !questionnaireVisible(state);
    r.errorBanner.hidden = state.error === null;
    r.errorBanner.textContent = state.error ?? "";
    r.closedNotice.hidden = state.phase !== "closed";
  }
}
