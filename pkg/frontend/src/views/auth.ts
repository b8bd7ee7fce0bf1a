// Login, registration with the consent gate, and the consent interstitial.

import { ApiClient, ApiError } from "../api.js";
import { el } from "../dom.js";
import { ViewState } from "../state.js";

function errorBanner(message: string | null): HTMLElement {
  const banner = el("div", { class: "error-banner", role: "alert" });
  if (message) banner.textContent = message;
  else banner.hidden = true;
  return banner;
}

export function renderLogin(state: ViewState, api: ApiClient): HTMLElement {
  const username = el("input", { id: "login-username", autocomplete: "username" });
  const password = el("input", { id: "login-password", type: "password" });
  const submit = el("button", { id: "login-submit", text: "Log in" });
  const toRegister = el("button", { id: "goto-register", class: "link", text: "Create an account" });
  const banner = errorBanner(state.error);

  submit.addEventListener("click", async () => {
    submit.disabled = true;
    try {
      state.token = await api.login(username.value, password.value);
      state.username = username.value;
      // returning users acknowledge the consent notice before evaluating
      state.setPhase(state.consentAcknowledged ? "task" : "consent");
    } catch (err) {
      state.error = err instanceof ApiError ? err.message : "login failed";
      state.notify();
    } finally {
      submit.disabled = false;
    }
  });
  toRegister.addEventListener("click", () => state.setPhase("register"));

  return el("section", { class: "card", "data-view": "login" }, [
    el("h2", { text: "Log in" }),
    banner,
    el("label", { for: "login-username", text: "Username" }),
    username,
    el("label", { for: "login-password", text: "Password" }),
    password,
    submit,
    toRegister,
  ]);
}

export function renderRegister(state: ViewState, api: ApiClient): HTMLElement {
  const username = el("input", { id: "register-username", autocomplete: "username" });
  const password = el("input", { id: "register-password", type: "password" });
  const consent = el("input", { id: "register-consent", type: "checkbox" });
  const submit = el("button", { id: "register-submit", text: "Register" });
  const toLogin = el("button", { id: "goto-login", class: "link", text: "Back to login" });
  const banner = errorBanner(state.error);

  // the consent gate: registration cannot be submitted without the explicit action
  submit.disabled = true;
  consent.addEventListener("change", () => {
    submit.disabled = !consent.checked;
  });

  submit.addEventListener("click", async () => {
    if (!consent.checked) return;
    submit.disabled = true;
    try {
      await api.register(username.value, password.value, true);
      state.consentAcknowledged = true;
      state.username = username.value;
      state.error = null;
      state.setPhase("login");
    } catch (err) {
      state.error = err instanceof ApiError ? err.message : "registration failed";
      state.notify();
    } finally {
      submit.disabled = !consent.checked;
    }
  });
  toLogin.addEventListener("click", () => state.setPhase("login"));

  return el("section", { class: "card", "data-view": "register" }, [
    el("h2", { text: "Create an account" }),
    banner,
    el("label", { for: "register-username", text: "Username" }),
    username,
    el("label", { for: "register-password", text: "Password" }),
    password,
    el("div", { class: "consent-box" }, [
      el("p", { id: "consent-text", text: state.consentText }),
      el("div", {}, [
        consent,
        el("label", { for: "register-consent", text: " I consent to my data being collected for research." }),
      ]),
    ]),
    submit,
    toLogin,
  ]);
}

export function renderConsentInterstitial(state: ViewState): HTMLElement {
  const proceed = el("button", { id: "consent-proceed", text: "I understand, continue" });
  proceed.addEventListener("click", () => {
    state.consentAcknowledged = true;
    state.setPhase("task");
  });
  return el("section", { class: "card", "data-view": "consent" }, [
    el("h2", { text: "Consent" }),
    el("p", { id: "consent-text", text: state.consentText }),
    proceed,
  ]);
}
