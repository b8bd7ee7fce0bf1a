// Questionnaire rendering: likert5 as a 5-point radio group, binary as a
// toggle, freetext as a textarea. All controls are native elements, so they
// stay keyboard-operable. Dialogue-level submission gates task completion.

import { ApiClient, ApiError, Answer, Question } from "../api.js";
import { el } from "../dom.js";
import { ViewState, validateAnswer } from "../state.js";

function promptText(question: Question): string {
  return question.prompt["eng"] ?? Object.values(question.prompt)[0] ?? question.id;
}

export function renderQuestionControl(
  question: Question,
  current: Answer | undefined,
  onChange: (answer: Answer) => void,
  idPrefix = "q",
): HTMLElement {
  const container = el("div", { class: "question", "data-question": question.id });
  container.append(el("label", { class: "prompt", text: promptText(question) }));

  if (question.kind === "likert5") {
    const group = el("div", { class: "likert", role: "radiogroup", "aria-label": promptText(question) });
    for (let value = 1; value <= 5; value++) {
      const id = `${idPrefix}-${question.id}-${value}`;
      const radio = el("input", {
        type: "radio",
        id,
        name: `${idPrefix}-${question.id}`,
        value: String(value),
      }) as HTMLInputElement;
      radio.checked = current === value;
      radio.addEventListener("change", () => onChange(value));
      group.append(radio, el("label", { for: id, text: String(value) }));
    }
    container.append(group);
  } else if (question.kind === "binary") {
    const id = `${idPrefix}-${question.id}-toggle`;
    const toggle = el("input", { type: "checkbox", id, class: "toggle" }) as HTMLInputElement;
    toggle.checked = current === true;
    toggle.addEventListener("change", () => onChange(toggle.checked));
    container.append(toggle, el("label", { for: id, text: " yes" }));
  } else {
    const area = el("textarea", { "aria-label": promptText(question) }) as HTMLTextAreaElement;
    area.value = typeof current === "string" ? current : "";
    area.addEventListener("input", () => onChange(area.value));
    container.append(area);
  }
  return container;
}

export function renderQuestionnaire(state: ViewState, api: ApiClient): HTMLElement {
  const task = state.task;
  if (!task) throw new Error("no task assigned");

  const form = el("section", { class: "card", "data-view": "questionnaire" }, [
    el("h2", { text: "Rate this dialogue" }),
  ]);
  const fieldErrors = new Map<string, HTMLElement>();

  for (const question of state.dialogueQuestions()) {
    const control = renderQuestionControl(
      question,
      state.drafts.get(question.id) ?? state.savedAnswers.get(question.id),
      (answer) => state.setDraft(question.id, answer),
      "d",
    );
    const error = el("div", { class: "field-error", "data-error-for": question.id });
    error.hidden = true;
    fieldErrors.set(question.id, error);
    control.append(error);
    form.append(control);
  }

  const submit = el("button", { id: "questionnaire-submit", text: "Submit and finish" });
  submit.disabled = !state.mandatoryAnswered();

  submit.addEventListener("click", async () => {
    let failed = false;
    for (const question of state.dialogueQuestions()) {
      const draft = state.drafts.get(question.id);
      if (draft === undefined) {
        if (question.required && question.kind !== "freetext" && !state.savedAnswers.has(question.id)) {
          failed = true;
        }
        continue; // optional questions may stay empty; drafts never auto-submit
      }
      const problem = validateAnswer(question, draft);
      const errorNode = fieldErrors.get(question.id);
      if (problem) {
        if (errorNode) {
          errorNode.textContent = problem;
          errorNode.hidden = false;
        }
        failed = true;
        continue;
      }
      try {
        await api.submitFeedback({
          session_id: task!.session_id,
          question_id: question.id,
          answer: draft,
        });
        state.savedAnswers.set(question.id, draft);
      } catch (err) {
        failed = true;
        if (errorNode) {
          errorNode.textContent = err instanceof ApiError ? err.message : "submission failed";
          errorNode.hidden = false;
        }
      }
    }
    if (!failed) {
      state.setPhase("done");
    } else {
      state.notify();
    }
  });

  form.append(submit);
  return form;
}

export function renderDone(state: ViewState, onNext: () => void): HTMLElement {
  const next = el("button", { id: "next-task", text: "Request the next dialogue" });
  next.addEventListener("click", onNext);
  return el("section", { class: "card", "data-view": "done" }, [
    el("h2", { text: "Thank you!" }),
    el("p", { text: "Your feedback has been recorded." }),
    next,
  ]);
}

export const __testing = { promptText };
