import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { FakeServer } from "./fake-server.js";

function clientWith(server: FakeServer): ApiClient {
  return new ApiClient("", server.fetch);
}

describe("ApiClient", () => {
  it("registers, logs in, and carries the bearer token", async () => {
    const server = new FakeServer();
    const api = clientWith(server);
    await api.register("u1", "pw", true);
    expect(api.hasToken()).toBe(false);
    await api.login("u1", "pw");
    expect(api.hasToken()).toBe(true);
    const task = await api.nextTask();
    expect(task?.session_id).toBeTruthy();
  });

  it("raises ApiError with the server detail", async () => {
    const server = new FakeServer();
    const api = clientWith(server);
    await expect(api.register("u1", "pw", false)).rejects.toMatchObject({
      status: 400,
      message: "registration requires consent",
    });
  });

  it("protected calls without a token are 401", async () => {
    const server = new FakeServer();
    const api = clientWith(server);
    await expect(api.nextTask()).rejects.toBeInstanceOf(ApiError);
  });

  it("feedback round-trips: GET after POST returns the stored value", async () => {
    const server = new FakeServer();
    const api = clientWith(server);
    await api.register("u1", "pw", true);
    await api.login("u1", "pw");
    const task = await api.nextTask();
    await api.submitFeedback({
      session_id: task!.session_id,
      question_id: "overall",
      answer: 3,
    });
    const records = await api.feedbackFor(task!.session_id);
    expect(records).toHaveLength(1);
    expect(records[0]).toMatchObject({ question_id: "overall", answer: 3 });
  });

  it("type mismatches surface as 422", async () => {
    const server = new FakeServer();
    const api = clientWith(server);
    await api.register("u1", "pw", true);
    await api.login("u1", "pw");
    const task = await api.nextTask();
    await expect(
      api.submitFeedback({ session_id: task!.session_id, question_id: "overall", answer: 9 }),
    ).rejects.toMatchObject({ status: 422 });
  });
});
