// Application shell: fetches config, routes between views on state changes.

import { ApiClient, FetchLike } from "./api.js";
import { clear, el } from "./dom.js";
import { ViewState } from "./state.js";
import { renderConsentInterstitial, renderLogin, renderRegister } from "./views/auth.js";
import { renderChat } from "./views/chat.js";
import { renderDone, renderQuestionnaire } from "./views/questionnaire.js";

export interface App {
  state: ViewState;
  api: ApiClient;
  root: HTMLElement;
}

export function mountApp(root: HTMLElement, baseUrl = "", fetchImpl?: FetchLike): App {
  const api = fetchImpl ? new ApiClient(baseUrl, fetchImpl) : new ApiClient(baseUrl);
  const state = new ViewState();

  async function ensureTask(): Promise<void> {
    if (state.questions.length === 0) {
      state.questions = (await api.questionnaire()).questions;
    }
    const task = await api.nextTask();
    if (task === null) {
      state.task = null;
      state.phase = "done";
    } else {
      state.startTask(task);
      return;
    }
    state.notify();
  }

  function render(): void {
    clear(root);
    root.append(el("h1", { text: "Dialogue evaluation" }));
    switch (state.phase) {
      case "login":
        root.append(renderLogin(state, api));
        break;
      case "register":
        root.append(renderRegister(state, api));
        break;
      case "consent":
        root.append(renderConsentInterstitial(state));
        break;
      case "task":
        if (state.task === null) {
          void ensureTask();
          root.append(el("p", { text: "Fetching your next dialogue..." }));
        } else {
          root.append(renderChat(state, api));
        }
        break;
      case "questionnaire":
        root.append(renderQuestionnaire(state, api));
        break;
      case "done":
        if (state.task === null) {
          root.append(
            el("section", { class: "card", "data-view": "exhausted" }, [
              el("h2", { text: "All done" }),
              el("p", { text: "There are no more dialogues assigned to you. Thank you!" }),
            ]),
          );
        } else {
          root.append(
            renderDone(state, () => {
              state.task = null;
              state.setPhase("task");
            }),
          );
        }
        break;
    }
  }

  state.subscribe(render);
  void api
    .meta()
    .then((meta) => {
      state.consentText = meta.consent_text;
      state.notify();
    })
    .catch(() => state.notify());
  render();
  return { state, api, root };
}
