// The scripted end-to-end flow: register -> consent -> login -> assigned task
// -> 3-turn chat -> utterance + dialogue feedback -> the server store contains
// exactly the entered records, with submission gated on mandatory questions.

import { beforeEach, describe, expect, it } from "vitest";

import { mountApp } from "../src/app.js";
import type { App } from "../src/app.js";
import { FakeServer } from "./fake-server.js";

let server: FakeServer;
let app: App;
let root: HTMLElement;

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function q<T extends HTMLElement>(selector: string): T {
  const node = root.querySelector(selector);
  if (!node) throw new Error(`missing element ${selector}`);
  return node as T;
}

function setInput(selector: string, value: string): void {
  const input = q<HTMLInputElement>(selector);
  input.value = value;
  input.dispatchEvent(new Event("input", { bubbles: true }));
}

function click(selector: string): void {
  q<HTMLButtonElement>(selector).click();
}

async function registerAndLogin(): Promise<void> {
  click("#goto-register");
  await flush();
  setInput("#register-username", "annotator");
  setInput("#register-password", "secret1");
  expect(q<HTMLButtonElement>("#register-submit").disabled).toBe(true); // consent gate
  const consent = q<HTMLInputElement>("#register-consent");
  consent.checked = true;
  consent.dispatchEvent(new Event("change", { bubbles: true }));
  expect(q<HTMLButtonElement>("#register-submit").disabled).toBe(false);
  click("#register-submit");
  await flush();

  expect(root.querySelector("[data-view=login]")).toBeTruthy();
  setInput("#login-username", "annotator");
  setInput("#login-password", "secret1");
  click("#login-submit");
  await flush();
  await flush();
}

async function chatTurn(text: string): Promise<void> {
  setInput("#chat-input", text);
  click("#chat-send");
  await flush();
  await flush();
}

beforeEach(async () => {
  server = new FakeServer();
  document.body.innerHTML = '<main id="app"></main>';
  root = document.getElementById("app") as HTMLElement;
  app = mountApp(root, "", server.fetch);
  await flush();
});

describe("full evaluation flow", () => {
  it("walks register, consent, login, chat, feedback; store holds exactly the entered records", async () => {
    await registerAndLogin();

    // registration already acknowledged consent, so the task page loads
    await flush();
    expect(root.querySelector("[data-view=task]")).toBeTruthy();
    expect(q("#scenario").textContent).toContain("cheap restaurant");
    // blinding: no system label anywhere in the page
    expect(root.innerHTML).not.toMatch(/system-[ab]/);

    await chatTurn("i am looking for a cheap restaurant in the north .");
    await chatTurn("what is the phone number ?");
    await chatTurn("thank you , goodbye .");
    const bubbles = root.querySelectorAll(".bubble");
    expect(bubbles.length).toBe(6); // 3 turns = 6 bubbles in order
    expect(bubbles[0]!.textContent).toContain("cheap restaurant");
    expect(bubbles[1]!.textContent).toContain("golden wok");

    // inline utterance rating on the second system turn: pick 4
    const radio = q<HTMLInputElement>("#u1-utterance_quality-4");
    radio.checked = true;
    radio.dispatchEvent(new Event("change", { bubbles: true }));
    await flush();
    root.querySelectorAll<HTMLButtonElement>(".save-utterance[data-turn='1']").forEach((b) => b.click());
    await flush();
    await flush();
    expect(root.querySelector(".saved-marker")).toBeTruthy();

    // dialogue-level questionnaire
    click("#finish-dialogue");
    await flush();
    expect(root.querySelector("[data-view=questionnaire]")).toBeTruthy();

    // mandatory gating: submit stays disabled until the overall rating exists
    expect(q<HTMLButtonElement>("#questionnaire-submit").disabled).toBe(true);

    for (const id of ["coherent", "consistent", "understands_user", "informative"]) {
      const toggle = q<HTMLInputElement>(`#d-${id}-toggle`);
      toggle.checked = true;
      toggle.dispatchEvent(new Event("change", { bubbles: true }));
      await flush();
    }
    // binary toggles record explicit "no" answers too
    for (const id of ["diverse", "likeable"]) {
      const toggle = q<HTMLInputElement>(`#d-${id}-toggle`);
      toggle.checked = false;
      toggle.dispatchEvent(new Event("change", { bubbles: true }));
      await flush();
    }
    expect(q<HTMLButtonElement>("#questionnaire-submit").disabled).toBe(true);

    const overall = q<HTMLInputElement>("#d-overall-4");
    overall.checked = true;
    overall.dispatchEvent(new Event("change", { bubbles: true }));
    await flush();
    expect(q<HTMLButtonElement>("#questionnaire-submit").disabled).toBe(false);

    click("#questionnaire-submit");
    await flush();
    await flush();
    expect(root.querySelector("[data-view=done]")).toBeTruthy();

    // server store contains exactly the entered records
    const records = server.feedbackRecords();
    const byQuestion = new Map(records.map((r) => [`${r.turn_index}:${r.question_id}`, r.answer]));
    expect(byQuestion.get("1:utterance_quality")).toBe(4);
    expect(byQuestion.get("null:overall")).toBe(4);
    expect(byQuestion.get("null:coherent")).toBe(true);
    expect(byQuestion.get("null:diverse")).toBe(false);
    expect(byQuestion.get("null:likeable")).toBe(false);
    // nothing extra: 1 utterance + 6 binary + 1 likert, no freetext draft was entered
    expect(records.length).toBe(8);
  });

  it("keeps binary answers explicit: unchecked toggles are false, not missing", async () => {
    await registerAndLogin();
    await flush();
    await chatTurn("hello");
    click("#finish-dialogue");
    await flush();
    for (const id of ["coherent", "consistent", "understands_user", "informative", "diverse", "likeable"]) {
      const toggle = q<HTMLInputElement>(`#d-${id}-toggle`);
      toggle.checked = id === "coherent";
      toggle.dispatchEvent(new Event("change", { bubbles: true }));
      await flush();
    }
    const overall = q<HTMLInputElement>("#d-overall-2");
    overall.checked = true;
    overall.dispatchEvent(new Event("change", { bubbles: true }));
    await flush();
    click("#questionnaire-submit");
    await flush();
    await flush();
    const answers = server.feedbackRecords().filter((r) => r.question_id === "consistent");
    expect(answers).toEqual([
      { user: "annotator", session_id: answers[0]!.session_id, turn_index: null, question_id: "consistent", answer: false },
    ]);
  });
});

describe("relay failures", () => {
  it("shows a retry affordance and leaves the transcript unchanged", async () => {
    await registerAndLogin();
    await flush();
    await chatTurn("hello there");
    expect(root.querySelectorAll(".bubble").length).toBe(2);

    server.failNextTurn = true;
    await chatTurn("second message");
    expect(root.querySelectorAll(".bubble").length).toBe(2); // unchanged
    const banner = q("#chat-error");
    expect(banner.hidden).toBe(false);
    expect(root.querySelector("#chat-retry")).toBeTruthy();
    expect((q<HTMLInputElement>("#chat-input")).disabled).toBe(false); // input re-enabled

    click("#chat-retry");
    await flush();
    await flush();
    expect(root.querySelectorAll(".bubble").length).toBe(4);
    expect(q("#chat-error").hidden).toBe(true);
  });
});

describe("quota", () => {
  it("after the configured dialogues the exhausted view renders", async () => {
    await registerAndLogin();
    await flush();
    for (let i = 0; i < 2; i++) {
      await chatTurn("hello");
      click("#finish-dialogue");
      await flush();
      for (const id of ["coherent", "consistent", "understands_user", "informative", "diverse", "likeable"]) {
        const toggle = q<HTMLInputElement>(`#d-${id}-toggle`);
        toggle.checked = true;
        toggle.dispatchEvent(new Event("change", { bubbles: true }));
      }
      const overall = q<HTMLInputElement>("#d-overall-5");
      overall.checked = true;
      overall.dispatchEvent(new Event("change", { bubbles: true }));
      await flush();
      click("#questionnaire-submit");
      await flush();
      await flush();
      click("#next-task");
      await flush();
      await flush();
    }
    expect(root.querySelector("[data-view=exhausted]")).toBeTruthy();
  });
});

describe("consent interstitial for returning users", () => {
  it("login without a registration this session passes through the consent notice", async () => {
    server.accounts.set("returning", { password: "pw", consent: true });
    setInput("#login-username", "returning");
    setInput("#login-password", "pw");
    click("#login-submit");
    await flush();
    await flush();
    expect(root.querySelector("[data-view=consent]")).toBeTruthy();
    expect(q("#consent-text").textContent).toContain("consent");
    click("#consent-proceed");
    await flush();
    await flush();
    expect(root.querySelector("[data-view=task]")).toBeTruthy();
  });
});
