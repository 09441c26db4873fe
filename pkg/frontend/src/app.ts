/** Glue between the state machine, the API client and the DOM renderer. */

import { ApiClient } from "./api.js";
import {
  ChatState,
  ChatEvent,
  initialState,
  reduce,
  validQuestionnaire,
} from "./state.js";

export interface AppView {
  render(state: ChatState): void;
}

export class ChatApp {
  private state: ChatState = initialState;

  constructor(
    private readonly client: ApiClient,
    private readonly view: AppView,
  ) {}

  getState(): ChatState {
    return this.state;
  }

  private dispatch(event: ChatEvent): void {
    this.state = reduce(this.state, event);
    this.view.render(this.state);
  }

  async start(policy: string): Promise<void> {
    this.dispatch({ kind: "start_requested", policy });
    try {
      const { sessionId, greeting } = await this.client.createSession(policy);
      this.dispatch({ kind: "session_started", sessionId, greeting });
    } catch (err) {
      this.dispatch({ kind: "request_failed", message: String(err) });
    }
  }

  async send(text: string): Promise<void> {
    if (text.trim() === "") return;
    this.dispatch({ kind: "utterance_sent", text });
    try {
      const reply = await this.client.sendTurn(this.state.sessionId!, text);
      this.dispatch({
        kind: "reply_received",
        text: reply.systemText,
        dialogueOver: reply.status === "awaiting_questionnaire",
      });
    } catch (err) {
      this.dispatch({ kind: "request_failed", message: String(err) });
    }
  }

  async submitQuestionnaire(
    success: boolean,
    askIfNec: number,
    overall: number,
  ): Promise<void> {
    if (!validQuestionnaire(success, askIfNec, overall)) return;
    this.dispatch({ kind: "questionnaire_submitted" });
    try {
      await this.client.submitQuestionnaire(this.state.sessionId!, {
        success,
        askIfNec,
        overall,
      });
      this.dispatch({ kind: "record_stored" });
    } catch (err) {
      this.dispatch({ kind: "request_failed", message: String(err) });
    }
  }

  reset(): void {
    this.dispatch({ kind: "reset" });
  }
}
