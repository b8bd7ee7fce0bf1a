// In-memory double of the human-evaluation REST surface, faithful to the
// backend's status codes and validation rules, for driving the UI in tests.

import type { FetchLike, Question } from "../src/api.js";

export const DEFAULT_QUESTIONS: Question[] = [
  { id: "coherent", level: "dialogue", kind: "binary", prompt: { eng: "Coherent?" }, required: true },
  { id: "consistent", level: "dialogue", kind: "binary", prompt: { eng: "Consistent?" }, required: true },
  { id: "understands_user", level: "dialogue", kind: "binary", prompt: { eng: "Understands you?" }, required: true },
  { id: "informative", level: "dialogue", kind: "binary", prompt: { eng: "Informative?" }, required: true },
  { id: "diverse", level: "dialogue", kind: "binary", prompt: { eng: "Diverse responses?" }, required: true },
  { id: "likeable", level: "dialogue", kind: "binary", prompt: { eng: "Likeable personality?" }, required: true },
  { id: "overall", level: "dialogue", kind: "likert5", prompt: { eng: "Overall rating" }, required: true },
  { id: "utterance_quality", level: "utterance", kind: "likert5", prompt: { eng: "Response quality" }, required: true },
  { id: "comments", level: "dialogue", kind: "freetext", prompt: { eng: "Comments (optional)" }, required: false },
];

interface StoredFeedback {
  user: string;
  session_id: string;
  turn_index: number | null;
  question_id: string;
  answer: unknown;
}

export class FakeServer {
  accounts = new Map<string, { password: string; consent: boolean }>();
  sessions = new Map<string, { user: string; turns: number }>();
  assignments: Array<{ user: string; session_id: string }> = [];
  feedback = new Map<string, StoredFeedback>();
  quota = 2;
  replies = [
    "golden wok is a cheap restaurant in the north . would you like more information ?",
    "the phone number is 01223111111 and the address is 12 high street .",
    "you are welcome , goodbye .",
  ];
  failNextTurn = false;
  private sessionCounter = 0;

  feedbackRecords(): StoredFeedback[] {
    return [...this.feedback.values()];
  }

  fetch: FetchLike = async (input, init) => {
    const method = init?.method ?? "GET";
    const url = new URL(input, "http://fake");
    const path = url.pathname;
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    const authHeader = (init?.headers as Record<string, string> | undefined)?.["Authorization"];
    const user = authHeader?.startsWith("Bearer tok-") ? authHeader.slice("Bearer tok-".length) : null;

    const json = (status: number, data: unknown) =>
      new Response(JSON.stringify(data), { status, headers: { "Content-Type": "application/json" } });
    const requireAuth = () => (user === null || !this.accounts.has(user) ? json(401, { detail: "missing bearer token" }) : null);

    if (path === "/meta") {
      return json(200, { consent_text: "Research data consent notice.", dialogues_per_participant: this.quota });
    }

    if (path === "/auth/register" && method === "POST") {
      if (!body.consent) return json(400, { detail: "registration requires consent" });
      if (this.accounts.has(body.username)) return json(409, { detail: "username already registered" });
      this.accounts.set(body.username, { password: body.password, consent: true });
      return json(201, { user_id: body.username, role: "participant" });
    }

    if (path === "/auth/login" && method === "POST") {
      const account = this.accounts.get(body.username);
      if (!account || account.password !== body.password) return json(401, { detail: "invalid credentials" });
      return json(200, { token: `tok-${body.username}`, role: "participant" });
    }

    const denied = requireAuth();
    if (denied) return denied;

    if (path === "/questionnaire") {
      return json(200, { questions: DEFAULT_QUESTIONS });
    }

    if (path === "/tasks/next") {
      const done = this.assignments.filter((a) => a.user === user).length;
      if (done >= this.quota) return json(200, { task: null, reason: "quota exhausted" });
      const sessionId = `sess-${++this.sessionCounter}`;
      this.sessions.set(sessionId, { user: user!, turns: 0 });
      this.assignments.push({ user: user!, session_id: sessionId });
      return json(200, {
        task: {
          task_id: `task-${this.sessionCounter}`,
          session_id: sessionId,
          scenario: "Find a cheap restaurant in the north and ask for its phone number.",
          dialogue_number: done + 1,
          dialogues_total: this.quota,
        },
      });
    }

    const turnMatch = path.match(/^\/sessions\/([^/]+)\/turns$/);
    if (turnMatch && method === "POST") {
      const session = this.sessions.get(turnMatch[1]!);
      if (!session) return json(404, { detail: "unknown session" });
      if (session.user !== user) return json(403, { detail: "session belongs to another participant" });
      if (this.failNextTurn) {
        this.failNextTurn = false;
        return json(502, { detail: "backend unavailable" });
      }
      const turnIndex = session.turns++;
      return json(200, {
        turn_index: turnIndex,
        user_text: body.text,
        response_text: this.replies[Math.min(turnIndex, this.replies.length - 1)],
      });
    }

    if (path === "/feedback" && method === "POST") {
      const session = this.sessions.get(body.session_id);
      if (!session) return json(404, { detail: "unknown session" });
      if (session.user !== user) return json(403, { detail: "session belongs to another participant" });
      const question = DEFAULT_QUESTIONS.find((q) => q.id === body.question_id);
      if (!question) return json(422, { detail: `unknown question ${body.question_id}` });
      const turnIndex = body.turn_index ?? null;
      if (question.level === "utterance" && turnIndex === null) {
        return json(422, { detail: "utterance-level feedback needs turn_index" });
      }
      if (question.level === "dialogue" && turnIndex !== null) {
        return json(422, { detail: "dialogue-level feedback must not carry turn_index" });
      }
      const answer = body.answer;
      if (question.kind === "likert5" && !(Number.isInteger(answer) && answer >= 1 && answer <= 5)) {
        return json(422, { detail: "expects an integer in 1..5" });
      }
      if (question.kind === "binary" && typeof answer !== "boolean") {
        return json(422, { detail: "expects true/false" });
      }
      if (question.kind === "freetext" && typeof answer !== "string") {
        return json(422, { detail: "expects text" });
      }
      const key = `${user}:${body.session_id}:${turnIndex}:${body.question_id}`;
      this.feedback.set(key, {
        user: user!,
        session_id: body.session_id,
        turn_index: turnIndex,
        question_id: body.question_id,
        answer,
      });
      return json(201, { status: "stored", question_id: body.question_id });
    }

    if (path === "/feedback" && method === "GET") {
      const sessionId = url.searchParams.get("session_id");
      const records = this.feedbackRecords().filter(
        (r) => r.session_id === sessionId && r.user === user,
      );
      return json(200, { records });
    }

    return json(404, { detail: `no route for ${method} ${path}` });
  };
}
