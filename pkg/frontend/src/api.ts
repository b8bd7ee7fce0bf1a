// Typed client for the human-evaluation REST surface. The UI talks to the
// backend exclusively through this module.

export type QuestionKind = "likert5" | "binary" | "freetext";
export type QuestionLevel = "utterance" | "dialogue";

export interface Question {
  id: string;
  level: QuestionLevel;
  kind: QuestionKind;
  prompt: Record<string, string>;
  required: boolean;
}

export interface Questionnaire {
  questions: Question[];
}

export interface EvalTask {
  task_id: string;
  session_id: string;
  scenario: string;
  dialogue_number: number;
  dialogues_total: number;
}

export interface TurnTrace {
  turn_index: number;
  user_text: string;
  response_text: string;
}

export interface FeedbackRecord {
  session_id: string;
  question_id: string;
  answer: number | boolean | string;
  turn_index?: number | null;
}

export interface Meta {
  consent_text: string;
  dialogues_per_participant: number;
}

export type Answer = number | boolean | string;

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private token: string | null = null;

  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  // The token lives in memory only; a page reload requires a fresh login.
  setToken(token: string | null): void {
    this.token = token;
  }

  hasToken(): boolean {
    return this.token !== null;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const data = (await response.json()) as { detail?: string };
        if (data.detail) detail = data.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  meta(): Promise<Meta> {
    return this.request<Meta>("GET", "/meta");
  }

  async register(username: string, password: string, consent: boolean): Promise<void> {
    await this.request("POST", "/auth/register", { username, password, consent });
  }

  async login(username: string, password: string): Promise<string> {
    const body = await this.request<{ token: string }>("POST", "/auth/login", {
      username,
      password,
    });
    this.token = body.token;
    return body.token;
  }

  questionnaire(): Promise<Questionnaire> {
    return this.request<Questionnaire>("GET", "/questionnaire");
  }

  async nextTask(): Promise<EvalTask | null> {
    const body = await this.request<{ task: EvalTask | null }>("GET", "/tasks/next");
    return body.task;
  }

  sendTurn(sessionId: string, text: string): Promise<TurnTrace> {
    return this.request<TurnTrace>("POST", `/sessions/${sessionId}/turns`, { text });
  }

  async submitFeedback(record: FeedbackRecord): Promise<void> {
    await this.request("POST", "/feedback", record);
  }

  async feedbackFor(sessionId: string): Promise<FeedbackRecord[]> {
    const body = await this.request<{ records: FeedbackRecord[] }>(
      "GET",
      `/feedback?session_id=${encodeURIComponent(sessionId)}`,
    );
    return body.records;
  }
}
