import { describe, expect, it } from "vitest";

import type { Advice, SessionState } from "../src/api.js";
import { buildBoardView, renderBoardHtml, renderBoxHtml } from "../src/board.js";

function sampleState(overrides: Partial<SessionState> = {}): SessionState {
  return {
    id: "s1",
    n: 4,
    support: [1, 2, 3, 4, 5, 6],
    rewards: [1, 2, 3, 4],
    mode: "simulated",
    seed: 0,
    version: 3,
    remaining: [1, 3, 4],
    history: [{ value: 5, slot: 2 }],
    pending_roll: 4,
    banked: 10,
    finished: false,
    optimal_remaining_value: 17.25,
    ...overrides,
  };
}

function sampleAdvice(): Advice {
  return {
    pending_roll: 4,
    banked: 10,
    recommended_slot: 3,
    recommended_rank: 2,
    whatif: [
      { slot: 1, reward: 1, total: 24.5 },
      { slot: 3, reward: 3, total: 26.125 },
      { slot: 4, reward: 4, total: 25.75 },
    ],
    thresholds: [2.5, 4.5],
    version: 3,
  };
}

describe("buildBoardView", () => {
  it("lists boxes right to left, slot 1 last", () => {
    const view = buildBoardView(sampleState(), null);
    expect(view.boxes.map((b) => b.slot)).toEqual([4, 3, 2, 1]);
    expect(view.boxes.map((b) => b.reward)).toEqual([4, 3, 2, 1]);
  });

  it("marks filled boxes from history", () => {
    const view = buildBoardView(sampleState(), null);
    const filled = view.boxes.find((b) => b.slot === 2);
    expect(filled?.filledValue).toBe(5);
    expect(view.boxes.filter((b) => b.filledValue !== null)).toHaveLength(1);
  });

  it("echoes service numbers verbatim", () => {
    const advice = sampleAdvice();
    const view = buildBoardView(sampleState(), advice);
    for (const w of advice.whatif) {
      const box = view.boxes.find((b) => b.slot === w.slot);
      // strict identity: the UI shows exactly what the service sent
      expect(box?.whatifTotal).toBe(w.total);
    }
    expect(view.banked).toBe(10);
    expect(view.optimalFromHere).toBe(17.25);
    expect(view.pendingRoll).toBe(4);
  });

  it("highlights only the advised slot", () => {
    const view = buildBoardView(sampleState(), sampleAdvice());
    expect(view.boxes.filter((b) => b.advised).map((b) => b.slot)).toEqual([3]);
  });

  it("gives the advised move the hottest strip", () => {
    const view = buildBoardView(sampleState(), sampleAdvice());
    const advised = view.boxes.find((b) => b.advised);
    expect(advised?.heat).toBe(1);
    const coolest = view.boxes.find((b) => b.slot === 1);
    expect(coolest?.heat).toBe(0);
    const filled = view.boxes.find((b) => b.slot === 2);
    expect(filled?.heat).toBeNull();
  });

  it("leaves heat null without advice", () => {
    const view = buildBoardView(sampleState(), null);
    expect(view.boxes.every((b) => b.heat === null && b.whatifTotal === null)).toBe(true);
  });

  it("is a pure function of its inputs", () => {
    const state = sampleState();
    const advice = sampleAdvice();
    const snapshot = JSON.stringify({ state, advice });
    const first = buildBoardView(state, advice);
    const second = buildBoardView(state, advice);
    expect(second).toEqual(first);
    expect(JSON.stringify({ state, advice })).toBe(snapshot);
  });

  it("handles a single remaining what-if without dividing by zero", () => {
    const state = sampleState({ remaining: [4], history: [
      { value: 5, slot: 2 }, { value: 1, slot: 1 }, { value: 2, slot: 3 },
    ] });
    const advice: Advice = {
      ...sampleAdvice(),
      recommended_slot: 4,
      whatif: [{ slot: 4, reward: 4, total: 30 }],
    };
    const view = buildBoardView(state, advice);
    const only = view.boxes.find((b) => b.slot === 4);
    expect(only?.heat).toBe(1);
  });
});

describe("render helpers", () => {
  it("renders slot markers and classes", () => {
    const view = buildBoardView(sampleState(), sampleAdvice());
    const html = renderBoardHtml(view);
    expect(html).toContain('data-slot="3"');
    expect(html).toContain("advised");
    expect(html).toContain("filled");
    // display order: slot 4 appears before slot 1
    expect(html.indexOf('data-slot="4"')).toBeLessThan(html.indexOf('data-slot="1"'));
  });

  it("shows what-if totals only on open boxes", () => {
    const view = buildBoardView(sampleState(), sampleAdvice());
    const open = view.boxes.find((b) => b.slot === 3);
    const filled = view.boxes.find((b) => b.slot === 2);
    expect(renderBoxHtml(open!)).toContain("26.13");
    expect(renderBoxHtml(filled!)).not.toContain("26");
  });
});
