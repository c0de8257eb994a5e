import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, type FetchLike } from "../src/api.js";

function recordingFetch(status: number, payload: unknown) {
  const calls: { url: string; init?: Parameters<FetchLike>[1] }[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    calls.push({ url, init });
    return { ok: status < 400, status, json: async () => payload };
  };
  return { calls, fetchFn };
}

describe("api client", () => {
  it("posts JSON bodies with the content type header", async () => {
    const { calls, fetchFn } = recordingFetch(200, { state: "awaiting_request" });
    const client = new ApiClient("http://server/", fetchFn);
    await client.sendMessage("s1", "simulate VGG8");
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe("http://server/sessions/s1/messages");
    expect(calls[0].init?.method).toBe("POST");
    expect(calls[0].init?.headers).toEqual({ "Content-Type": "application/json" });
    expect(JSON.parse(calls[0].init?.body ?? "")).toEqual({ text: "simulate VGG8" });
  });

  it("strips trailing slashes from the base url", async () => {
    const { calls, fetchFn } = recordingFetch(200, { status: "ok" });
    await new ApiClient("http://server///", fetchFn).health();
    expect(calls[0].url).toBe("http://server/health");
  });

  it("maps error responses to ApiError with the server detail", async () => {
    const { fetchFn } = recordingFetch(409, { detail: "cannot submit in state done" });
    const client = new ApiClient("http://server", fetchFn);
    const err = await client.confirm("s1").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(409);
    expect((err as ApiError).detail).toBe("cannot submit in state done");
  });

  it("uses GET without a body for reads", async () => {
    const { calls, fetchFn } = recordingFetch(200, { id: "j1", state: "done" });
    await new ApiClient("http://server", fetchFn).getJob("j1");
    expect(calls[0].init?.method).toBe("GET");
    expect(calls[0].init?.body).toBeUndefined();
  });
});
