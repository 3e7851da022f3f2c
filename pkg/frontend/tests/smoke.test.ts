/**
 * End-to-end smoke test against a live service instance: the three
 * interactive flows (label + refit, infinity stop, overlap rejection)
 * run through the same client, geometry, and state modules the page
 * uses, so what the assertions see is what the chart would draw.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { dragToLabel, linearScale, mergedLabels } from "../src/geometry.js";
import { INFINITY_INDEX, penaltyParamAt } from "../src/grid.js";
import {
  acceptedLabelPayloads,
  applyAcceptedLabels,
  applyFit,
  applyRejection,
  applySession,
  initialState,
  setSlider,
  type ViewState,
} from "../src/state.js";

const PORT = 8900 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
const api = new ApiClient(BASE);

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      if (await api.health()) {
        return;
      }
    } catch (error) {
      lastError = error;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service did not come up on ${BASE}: ${String(lastError)}`);
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "lopart.cli", "serve", "--port", String(PORT)],
    { cwd: new URL("../..", import.meta.url).pathname, stdio: "ignore" },
  );
  await waitForHealth(60_000);
}, 90_000);

afterAll(async () => {
  server.kill("SIGTERM");
  await new Promise((resolve) => {
    server.once("exit", resolve);
    setTimeout(resolve, 3_000);
  });
});

/** A step sequence: clearly one change, around position 20. */
const VALUES = [...Array(40)].map((_, i) => (i < 20 ? 0 : 5));
const xScale = linearScale(0.5, VALUES.length + 0.5, 0, 1000);

async function startSession(): Promise<ViewState> {
  const id = await api.createSequence(VALUES);
  const session = await api.getSequence(id);
  return applySession(
    initialState(),
    id,
    session.values,
    session.labels,
    session.version,
  );
}

async function dragAndSubmit(
  state: ViewState,
  fromPosition: number,
  toPosition: number,
  changes: 0 | 1,
): Promise<ViewState> {
  const label = dragToLabel(
    xScale.toPixel(fromPosition),
    xScale.toPixel(toPosition),
    xScale,
    VALUES.length,
    changes,
  );
  expect(label).not.toBeNull();
  const submitted = mergedLabels(acceptedLabelPayloads(state), label!);
  const version = await api.putLabels(state.sessionId!, submitted);
  return applyAcceptedLabels(state, submitted, version);
}

describe("labeling workflow against the live service", () => {
  it("creating a positive label and refitting shows a change inside it", async () => {
    let state = await startSession();
    state = await dragAndSubmit(state, 15, 25, 1);
    expect(state.labels).toEqual([
      { start: 15, end: 25, changes: 1, status: null },
    ]);
    const fit = await api.getFit(
      state.sessionId!,
      penaltyParamAt(state.sliderIndex),
      "lopart",
    );
    state = applyFit(state, fit);
    const inside = state.fits.lopart!.changepoints.filter(
      (c) => c >= 15 && c <= 24,
    );
    expect(inside.length).toBeGreaterThanOrEqual(1);
    expect(state.labels[0].status).toBe("correct");
  });

  it("the infinity stop draws exactly one change per positive label", async () => {
    let state = await startSession();
    state = await dragAndSubmit(state, 15, 25, 1);
    state = await dragAndSubmit(state, 30, 38, 1);
    state = setSlider(state, INFINITY_INDEX);
    const fit = await api.getFit(
      state.sessionId!,
      penaltyParamAt(state.sliderIndex),
      "lopart",
    );
    state = applyFit(state, fit);
    const cps = state.fits.lopart!.changepoints;
    expect(cps).toHaveLength(2);
    expect(cps.filter((c) => c >= 15 && c <= 24)).toHaveLength(1);
    expect(cps.filter((c) => c >= 30 && c <= 37)).toHaveLength(1);
    expect(state.labels.map((l) => l.status)).toEqual(["correct", "correct"]);
  });

  it("an overlapping drag is rejected and the view reverts", async () => {
    let state = await startSession();
    state = await dragAndSubmit(state, 10, 20, 1);
    const before = acceptedLabelPayloads(state);
    const overlapping = dragToLabel(
      xScale.toPixel(15),
      xScale.toPixel(30),
      xScale,
      VALUES.length,
      0,
    )!;
    try {
      await api.putLabels(
        state.sessionId!,
        mergedLabels(acceptedLabelPayloads(state), overlapping),
      );
      expect.unreachable("server accepted overlapping labels");
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      state = applyRejection(state, (error as ApiError).detail);
    }
    expect(acceptedLabelPayloads(state)).toEqual(before);
    expect(state.banner).toMatch(/overlap/);
    const echoed = await api.getSequence(state.sessionId!);
    expect(echoed.labels).toEqual(before);
    expect(echoed.version).toBe(state.version);
  });

  it("sub-width drags are a no-op", () => {
    const pixel = xScale.toPixel(12);
    expect(dragToLabel(pixel, pixel + 2, xScale, VALUES.length, 1)).toBeNull();
  });
});
