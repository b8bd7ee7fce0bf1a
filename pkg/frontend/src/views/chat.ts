// The task page: scenario, live chat transcript, inline utterance ratings.
// The system under evaluation is never named here (blind comparison).

import { ApiClient, ApiError, Question } from "../api.js";
import { el } from "../dom.js";
import { ViewState } from "../state.js";
import { renderQuestionControl } from "./questionnaire.js";

export interface ChatHandlers {
  submitUtteranceFeedback: (question: Question, turnIndex: number, answer: unknown) => Promise<void>;
}

export function renderChat(state: ViewState, api: ApiClient): HTMLElement {
  const task = state.task;
  if (!task) throw new Error("no task assigned");

  const transcript = el("div", { class: "transcript", id: "transcript", role: "log", "aria-live": "polite" });
  for (const message of state.transcript) {
    const bubble = el("div", {
      class: `bubble ${message.speaker}`,
      "data-speaker": message.speaker,
      text: message.text,
    });
    transcript.append(bubble);
    if (message.speaker === "system") {
      transcript.append(renderUtteranceWidget(state, api, message.turnIndex));
    }
  }

  const input = el("input", { id: "chat-input", "aria-label": "Your message" });
  const send = el("button", { id: "chat-send", text: "Send" });
  const retryBar = el("div", { class: "error-banner", id: "chat-error", role: "alert" });
  retryBar.hidden = state.error === null;
  if (state.error) {
    retryBar.append(el("span", { text: state.error + " " }));
    const retry = el("button", { id: "chat-retry", text: "Retry" });
    retry.addEventListener("click", () => {
      if (state.pendingTurn !== null) void sendTurn(state, api, state.pendingTurn);
    });
    retryBar.append(retry);
  }

  send.addEventListener("click", () => {
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    void sendTurn(state, api, text);
  });
  input.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") send.click();
  });

  const finish = el("button", { id: "finish-dialogue", text: "Finish dialogue and rate it" });
  finish.disabled = state.transcript.length === 0;
  finish.addEventListener("click", () => state.setPhase("questionnaire"));

  return el("section", { class: "card", "data-view": "task" }, [
    el("h2", { text: `Dialogue ${task.dialogue_number} of ${task.dialogues_total}` }),
    el("p", { class: "scenario", id: "scenario", text: task.scenario }),
    transcript,
    retryBar,
    el("div", { class: "composer" }, [input, send]),
    finish,
  ]);
}

async function sendTurn(state: ViewState, api: ApiClient, text: string): Promise<void> {
  const task = state.task;
  if (!task) return;
  state.pendingTurn = text;
  try {
    const trace = await api.sendTurn(task.session_id, text);
    // transcript only changes on success, in request order
    state.transcript.push({ speaker: "user", text, turnIndex: trace.turn_index });
    state.transcript.push({ speaker: "system", text: trace.response_text, turnIndex: trace.turn_index });
    state.pendingTurn = null;
    state.error = null;
  } catch (err) {
    state.error = err instanceof ApiError ? `message failed (${err.message})` : "message failed";
  }
  state.notify();
}

function renderUtteranceWidget(state: ViewState, api: ApiClient, turnIndex: number): HTMLElement {
  const widget = el("div", { class: "utterance-feedback", "data-turn": String(turnIndex) });
  for (const question of state.utteranceQuestions()) {
    const key = state.draftKey(question, turnIndex);
    widget.append(
      renderQuestionControl(question, state.drafts.get(key) ?? state.savedAnswers.get(key), (answer) => {
        state.setDraft(key, answer);
      }, `u${turnIndex}`),
    );
    const saveButton = el("button", {
      class: "save-utterance",
      "data-turn": String(turnIndex),
      text: "Save rating",
    });
    saveButton.addEventListener("click", async () => {
      const answer = state.drafts.get(key);
      if (answer === undefined) return;
      try {
        await api.submitFeedback({
          session_id: state.task!.session_id,
          question_id: question.id,
          turn_index: turnIndex,
          answer,
        });
        state.savedAnswers.set(key, answer);
        state.error = null;
      } catch (err) {
        state.error = err instanceof ApiError ? err.message : "saving feedback failed";
      }
      state.notify();
    });
    widget.append(saveButton);
    if (state.savedAnswers.has(key)) {
      widget.append(el("span", { class: "saved-marker", text: "saved" }));
    }
  }
  return widget;
}
