import { describe, expect, it } from "vitest";

import {
  ChatState,
  initialState,
  inputEnabled,
  questionnaireVisible,
  reduce,
  TransitionError,
  validQuestionnaire,
} from "../src/state.js";

function started(): ChatState {
  let s = reduce(initialState, { kind: "start_requested", policy: "fg" });
  s = reduce(s, {
    kind: "session_started",
    sessionId: "abc",
    greeting: "Hello, how may I help you?",
  });
  return s;
}

describe("session lifecycle", () => {
  it("walks greeting, turns, bye, questionnaire and close", () => {
    let s = started();
    expect(s.phase).toBe("ready");
    expect(s.messages).toHaveLength(1);
    expect(s.messages[0].speaker).toBe("system");

    for (const text of ["cheap place", "phone number", "goodbye"]) {
      s = reduce(s, { kind: "utterance_sent", text });
      expect(inputEnabled(s)).toBe(false);
      s = reduce(s, {
        kind: "reply_received",
        text: "ok",
        dialogueOver: text === "goodbye",
      });
    }
    expect(s.phase).toBe("questionnaire");
    expect(questionnaireVisible(s)).toBe(true);
    expect(inputEnabled(s)).toBe(false);
    expect(s.messages).toHaveLength(7);

    s = reduce(s, { kind: "questionnaire_submitted" });
    expect(s.phase).toBe("submitting");
    expect(questionnaireVisible(s)).toBe(true);
    s = reduce(s, { kind: "record_stored" });
    expect(s.phase).toBe("closed");
    expect(questionnaireVisible(s)).toBe(false);
  });

  it("allows a fresh start after close", () => {
    let s = started();
    s = reduce(s, { kind: "utterance_sent", text: "bye" });
    s = reduce(s, { kind: "reply_received", text: "bye", dialogueOver: true });
    s = reduce(s, { kind: "questionnaire_submitted" });
    s = reduce(s, { kind: "record_stored" });
    s = reduce(s, { kind: "start_requested", policy: "fg" });
    expect(s.phase).toBe("starting");
    expect(s.messages).toHaveLength(0);
    expect(s.sessionId).toBeNull();
  });
});

describe("invariants", () => {
  it("input is enabled only in the ready phase", () => {
    expect(inputEnabled(initialState)).toBe(false);
    const s = started();
    expect(inputEnabled(s)).toBe(true);
    const waiting = reduce(s, { kind: "utterance_sent", text: "hi" });
    expect(inputEnabled(waiting)).toBe(false);
  });

  it("rejects a turn after the dialogue ended", () => {
    let s = started();
    s = reduce(s, { kind: "utterance_sent", text: "bye" });
    s = reduce(s, { kind: "reply_received", text: "bye", dialogueOver: true });
    expect(() =>
      reduce(s, { kind: "utterance_sent", text: "one more" }),
    ).toThrow(TransitionError);
  });

  it("rejects the questionnaire before the dialogue ended", () => {
    const s = started();
    expect(() => reduce(s, { kind: "questionnaire_submitted" })).toThrow(
      TransitionError,
    );
  });

  it("rejects a duplicate submission", () => {
    let s = started();
    s = reduce(s, { kind: "utterance_sent", text: "bye" });
    s = reduce(s, { kind: "reply_received", text: "bye", dialogueOver: true });
    s = reduce(s, { kind: "questionnaire_submitted" });
    s = reduce(s, { kind: "record_stored" });
    expect(() => reduce(s, { kind: "questionnaire_submitted" })).toThrow(
      TransitionError,
    );
  });

  it("rejects empty utterances", () => {
    const s = started();
    expect(() => reduce(s, { kind: "utterance_sent", text: "   " })).toThrow(
      TransitionError,
    );
  });
});

describe("failures", () => {
  it("marks the last message failed when a turn errors", () => {
    let s = started();
    s = reduce(s, { kind: "utterance_sent", text: "hi" });
    s = reduce(s, { kind: "request_failed", message: "network down" });
    expect(s.phase).toBe("error");
    expect(s.error).toBe("network down");
    expect(s.messages.at(-1)?.failed).toBe(true);
    // recovery: start over
    const fresh = reduce(s, { kind: "start_requested", policy: "fg" });
    expect(fresh.phase).toBe("starting");
    expect(fresh.error).toBeNull();
  });

  it("returns to the form when submission errors", () => {
    let s = started();
    s = reduce(s, { kind: "utterance_sent", text: "bye" });
    s = reduce(s, { kind: "reply_received", text: "bye", dialogueOver: true });
    s = reduce(s, { kind: "questionnaire_submitted" });
    s = reduce(s, { kind: "request_failed", message: "conflict" });
    expect(s.phase).toBe("questionnaire");
    expect(questionnaireVisible(s)).toBe(true);
    expect(s.error).toBe("conflict");
  });
});

describe("questionnaire validation", () => {
  it("accepts integer 1-5 scales with a success answer", () => {
    expect(validQuestionnaire(true, 5, 4)).toBe(true);
    expect(validQuestionnaire(false, 1, 1)).toBe(true);
  });

  it.each([
    [null, 3, 3],
    [true, 0, 3],
    [true, 6, 3],
    [true, 3, 2.5],
    [true, null, 3],
  ] as const)("rejects %s/%s/%s", (success, a, b) => {
    expect(validQuestionnaire(success, a, b)).toBe(false);
  });
});
