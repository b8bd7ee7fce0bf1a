// Client-side view state. Invariants: no protected view renders without a
// token, and questionnaire drafts never submit themselves.

import type { Answer, EvalTask, Question } from "./api.js";

export type Phase =
  | "login"
  | "register"
  | "consent" // interstitial shown before tasks when consent is not on record here
  | "task"
  | "questionnaire"
  | "done";

export interface ChatMessage {
  speaker: "user" | "system";
  text: string;
  turnIndex: number;
}

export class ViewState {
  phase: Phase = "login";
  token: string | null = null;
  username = "";
  consentAcknowledged = false;
  consentText = "";
  task: EvalTask | null = null;
  transcript: ChatMessage[] = [];
  questions: Question[] = [];
  // drafts, keyed by question id (dialogue level) or `turn:questionId`
  drafts = new Map<string, Answer>();
  savedAnswers = new Map<string, Answer>();
  error: string | null = null;
  pendingTurn: string | null = null; // user text awaiting a reply, for retry

  private listeners: Array<() => void> = [];

  subscribe(listener: () => void): void {
    this.listeners.push(listener);
  }

  notify(): void {
    for (const listener of this.listeners) listener();
  }

  setPhase(phase: Phase): void {
    if ((phase === "task" || phase === "questionnaire") && this.token === null) {
      throw new Error("protected view requires a token");
    }
    this.phase = phase;
    this.error = null;
    this.notify();
  }

  startTask(task: EvalTask): void {
    this.task = task;
    this.transcript = [];
    this.drafts = new Map();
    this.savedAnswers = new Map();
    this.pendingTurn = null;
    this.setPhase("task");
  }

  draftKey(question: Question, turnIndex?: number): string {
    return question.level === "utterance" ? `${turnIndex}:${question.id}` : question.id;
  }

  setDraft(key: string, answer: Answer): void {
    this.drafts.set(key, answer);
    this.notify();
  }

  dialogueQuestions(): Question[] {
    return this.questions.filter((q) => q.level === "dialogue");
  }

  utteranceQuestions(): Question[] {
    return this.questions.filter((q) => q.level === "utterance");
  }

  // Mandatory = every required dialogue-level question has a draft or a saved answer.
  mandatoryAnswered(): boolean {
    return this.dialogueQuestions()
      .filter((q) => q.required && q.kind !== "freetext")
      .every((q) => this.drafts.has(q.id) || this.savedAnswers.has(q.id));
  }
}

export function validateAnswer(question: Question, answer: Answer): string | null {
  if (question.kind === "likert5") {
    if (typeof answer !== "number" || !Number.isInteger(answer) || answer < 1 || answer > 5) {
      return "choose a rating from 1 to 5";
    }
  } else if (question.kind === "binary") {
    if (typeof answer !== "boolean") return "choose yes or no";
  } else if (typeof answer !== "string") {
    return "enter text";
  }
  return null;
}
