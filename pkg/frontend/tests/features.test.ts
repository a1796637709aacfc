import { describe, expect, it } from "vitest";
import { DEFAULT_FRAME, extractFeatures, goertzel } from "../src/features.js";

const RATE = 16000;

function tone(freqHz: number, n: number, amp = 0.5): Float64Array {
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = amp * Math.sin((2 * Math.PI * freqHz * i) / RATE);
  }
  return out;
}

describe("goertzel", () => {
  it("peaks at the tone frequency", () => {
    const samples = tone(600, 400);
    const at = goertzel(samples, 0, 400, 600, RATE);
    const off = goertzel(samples, 0, 400, 2400, RATE);
    expect(at).toBeGreaterThan(100 * off);
  });

  it("matches the analytic energy of a bin-aligned sine", () => {
    // 600 Hz is an exact bin of a 400-sample window at 16 kHz, so the
    // normalized Goertzel power is (amplitude / 2)^2.
    const e = goertzel(tone(600, 400, 0.8), 0, 400, 600, RATE);
    expect(e).toBeCloseTo(0.16, 6);
  });

  it("is zero on silence", () => {
    expect(goertzel(new Float64Array(400), 0, 400, 600, RATE)).toBe(0);
  });
});

describe("extractFeatures", () => {
  it("emits one frame per hop", () => {
    const frames = extractFeatures(new Float64Array(400 + 3 * 160), [300, 600], RATE);
    expect(frames.length).toBe(4);
  });

  it("concentrates band shares on the tone band", () => {
    const frames = extractFeatures(tone(1200, 1600), [300, 600, 1200, 2400], RATE);
    for (const f of frames) {
      expect(f.shares[2]).toBeGreaterThan(0.95);
      expect(f.shares.reduce((a, b) => a + b, 0)).toBeCloseTo(1, 9);
    }
  });

  it("reports floor log-energy and zero shares on silence", () => {
    const [f] = extractFeatures(new Float64Array(DEFAULT_FRAME.size), [300, 600], RATE);
    expect(f.logEnergy).toBeCloseTo(-10, 6);
    expect(f.shares).toEqual([0, 0]);
  });
});
