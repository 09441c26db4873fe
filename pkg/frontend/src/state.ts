/** Pure chat-session state machine; the DOM layer only renders it.
 *
 * Input is enabled exactly in the "ready" phase, so it is impossible to
 * send while a reply is pending or after the system said goodbye. The
 * questionnaire is visible exactly when the server reported
 * awaiting_questionnaire.
 */

export type Phase =
  | "idle" // no session yet
  | "starting" // create_session in flight
  | "ready" // user may type
  | "waiting" // turn in flight
  | "questionnaire" // dialogue over, form visible
  | "submitting" // questionnaire in flight
  | "closed" // record stored; offer a restart
  | "error";

export interface Message {
  speaker: "user" | "system";
  text: string;
  failed?: boolean;
}

export interface ChatState {
  phase: Phase;
  sessionId: string | null;
  policy: string | null;
  messages: Message[];
  error: string | null;
}

export type ChatEvent =
  | { kind: "start_requested"; policy: string }
  | { kind: "session_started"; sessionId: string; greeting: string }
  | { kind: "utterance_sent"; text: string }
  | { kind: "reply_received"; text: string; dialogueOver: boolean }
  | { kind: "questionnaire_submitted" }
  | { kind: "record_stored" }
  | { kind: "request_failed"; message: string }
  | { kind: "reset" };

export const initialState: ChatState = {
  phase: "idle",
  sessionId: null,
  policy: null,
  messages: [],
  error: null,
};

export class TransitionError extends Error {}

function expect(state: ChatState, event: ChatEvent, phases: Phase[]): void {
  if (!phases.includes(state.phase)) {
    throw new TransitionError(
      `event ${event.kind} not allowed in phase ${state.phase}`,
    );
  }
}

export function reduce(state: ChatState, event: ChatEvent): ChatState {
  switch (event.kind) {
    case "start_requested":
      expect(state, event, ["idle", "closed", "error"]);
      return { ...initialState, phase: "starting", policy: event.policy };
    case "session_started":
      expect(state, event, ["starting"]);
      return {
        ...state,
        phase: "ready",
        sessionId: event.sessionId,
        messages: [{ speaker: "system", text: event.greeting }],
        error: null,
      };
    case "utterance_sent":
      expect(state, event, ["ready"]);
      if (event.text.trim() === "") {
        throw new TransitionError("cannot send an empty utterance");
      }
      return {
        ...state,
        phase: "waiting",
        messages: [...state.messages, { speaker: "user", text: event.text }],
      };
    case "reply_received":
      expect(state, event, ["waiting"]);
      return {
        ...state,
        phase: event.dialogueOver ? "questionnaire" : "ready",
        messages: [
          ...state.messages,
          { speaker: "system", text: event.text },
        ],
      };
    case "questionnaire_submitted":
      expect(state, event, ["questionnaire"]);
      return { ...state, phase: "submitting" };
    case "record_stored":
      expect(state, event, ["submitting"]);
      return { ...state, phase: "closed" };
    case "request_failed": {
      const messages =
        state.phase === "waiting"
          ? state.messages.map((m, i) =>
              i === state.messages.length - 1 ? { ...m, failed: true } : m,
            )
          : state.messages;
      // a failed questionnaire submission returns to the form; a failed
      // turn or session start surfaces the error banner
      if (state.phase === "submitting") {
        return { ...state, phase: "questionnaire", error: event.message };
      }
      return { ...state, phase: "error", messages, error: event.message };
    }
    case "reset":
      return initialState;
  }
}

export function inputEnabled(state: ChatState): boolean {
  return state.phase === "ready";
}

export function questionnaireVisible(state: ChatState): boolean {
  return state.phase === "questionnaire" || state.phase === "submitting";
}

export function validQuestionnaire(
  success: boolean | null,
  askIfNec: number | null,
  overall: number | null,
): boolean {
  const scale = (x: number | null): boolean =>
    x !== null && Number.isInteger(x) && x >= 1 && x <= 5;
  return success !== null && scale(askIfNec) && scale(overall);
}
