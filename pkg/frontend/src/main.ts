import { ApiClient } from "./api.js";
import { ChatApp } from "./app.js";
import { DomRefs, DomView } from "./render.js";

function ref<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

async function boot(): Promise<void> {
  const refs: DomRefs = {
    transcript: ref("transcript"),
    input: ref<HTMLInputElement>("utterance"),
    sendButton: ref<HTMLButtonElement>("send"),
    startButton: ref<HTMLButtonElement>("start"),
    policySelect: ref<HTMLSelectElement>("policy"),
    questionnaire: ref("questionnaire"),
    errorBanner: ref("error-banner"),
    closedNotice: ref("closed-notice"),
  };
  const client = new ApiClient();
  const view = new DomView(refs);
  const app = new ChatApp(client, view);

  const policies = await client.policies();
  refs.policySelect.replaceChildren(
    ...policies.map((name) => {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      return opt;
    }),
  );

  refs.startButton.addEventListener("click", () => {
    const state = app.getState();
    if (state.phase !== "idle" && state.phase !== "closed" && state.phase !== "error") {
      return;
    }
    if (state.phase !== "idle") app.reset();
    void app.start(refs.policySelect.value || policies[0]);
  });

  const send = (): void => {
    const text = refs.input.value;
    if (text.trim() === "") return;
    refs.input.value = "";
    void app.send(text);
  };
  refs.sendButton.addEventListener("click", send);
  refs.input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") send();
  });
  refs.input.addEventListener("input", () => view.render(app.getState()));

  const form = ref<HTMLFormElement>("questionnaire-form");
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const success = data.get("success") === "yes";
    const askIfNec = Number(data.get("ask_if_nec"));
    const overall = Number(data.get("overall"));
    void app.submitQuestionnaire(success, askIfNec, overall);
  });

  view.render(app.getState());
}

void boot();
