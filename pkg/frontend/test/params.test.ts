import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import {
  ALPHA_MAX, ALPHA_MIN, alphaToSlider, ParamSender, ReliefParams,
  sliderToAlpha,
} from "../src/params";

const p = (alpha: number): ReliefParams => ({ alpha, beta: 0.01, gamma: 0 });

describe("ParamSender debounce contract", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("sends at most 31 messages for 1000 events in one second", () => {
    const sent: ReliefParams[] = [];
    const sender = new ParamSender((x) => sent.push(x));
    for (let i = 0; i < 1000; i++) {
      sender.update(p(i));
      vi.advanceTimersByTime(1); // one event per millisecond
    }
    expect(sent.length).toBeGreaterThanOrEqual(1);
    expect(sent.length).toBeLessThanOrEqual(31);
  });

  it("the last value always wins", () => {
    const sent: ReliefParams[] = [];
    const sender = new ParamSender((x) => sent.push(x));
    for (let i = 0; i <= 100; i++) sender.update(p(i));
    vi.advanceTimersByTime(200);
    expect(sent[sent.length - 1].alpha).toBe(100);
  });

  it("an isolated change is sent immediately", () => {
    const sent: ReliefParams[] = [];
    const sender = new ParamSender((x) => sent.push(x));
    sender.update(p(3));
    expect(sent).toEqual([p(3)]);
  });

  it("flush delivers the queued value at once", () => {
    const sent: ReliefParams[] = [];
    const sender = new ParamSender((x) => sent.push(x));
    sender.update(p(1));
    sender.update(p(2));
    expect(sent.length).toBe(1);
    sender.flush();
    expect(sent).toEqual([p(1), p(2)]);
  });

  it("goes quiet once events stop", () => {
    const sent: ReliefParams[] = [];
    const sender = new ParamSender((x) => sent.push(x));
    sender.update(p(1));
    vi.advanceTimersByTime(5000);
    expect(sent.length).toBe(1);
  });
});

describe("alpha slider mapping", () => {
  it("covers the full range log-scale", () => {
    expect(sliderToAlpha(0)).toBeCloseTo(ALPHA_MIN, 10);
    expect(sliderToAlpha(1)).toBeCloseTo(ALPHA_MAX, 10);
    // geometric midpoint, not arithmetic
    expect(sliderToAlpha(0.5)).toBeCloseTo(Math.sqrt(ALPHA_MIN * ALPHA_MAX), 6);
  });

  it("is the inverse of alphaToSlider", () => {
    for (const a of [0.001, 0.1, 1, 4, 32]) {
      expect(sliderToAlpha(alphaToSlider(a))).toBeCloseTo(a, 9);
    }
  });

  it("clamps out-of-range positions", () => {
    expect(sliderToAlpha(-1)).toBe(sliderToAlpha(0));
    expect(sliderToAlpha(2)).toBe(sliderToAlpha(1));
  });
});
