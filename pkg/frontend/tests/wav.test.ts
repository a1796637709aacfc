import { describe, expect, it } from "vitest";
import { encodeWav, parseWav } from "../src/wav.js";

describe("parseWav", () => {
  it("round-trips PCM16 audio through encodeWav", () => {
    const samples = new Float64Array([0, 0.5, -0.5, 0.25, -1, 1]);
    const audio = parseWav(encodeWav(samples));
    expect(audio.sampleRate).toBe(16000);
    expect(audio.samples.length).toBe(samples.length);
    for (let i = 0; i < samples.length; i++) {
      expect(audio.samples[i]).toBeCloseTo(samples[i], 3);
    }
  });

  it("rejects non-RIFF data", () => {
    expect(() => parseWav(Buffer.alloc(100), "x.wav")).toThrow(/not a RIFF/);
  });

  it("rejects a truncated header", () => {
    expect(() => parseWav(Buffer.from("RIFF"), "x.wav")).toThrow(/not a RIFF/);
  });

  it("rejects stereo audio", () => {
    const buf = encodeWav(new Float64Array(100));
    buf.writeUInt16LE(2, 22); // channels
    expect(() => parseWav(buf, "x.wav")).toThrow(/only mono/);
  });

  it("rejects non-16 kHz audio", () => {
    const buf = encodeWav(new Float64Array(100), 8000);
    expect(() => parseWav(buf, "x.wav")).toThrow(/expected 16 kHz/);
  });

  it("rejects 8-bit PCM", () => {
    const buf = encodeWav(new Float64Array(100));
    buf.writeUInt16LE(8, 34); // bits per sample
    expect(() => parseWav(buf, "x.wav")).toThrow(/only 16-bit PCM/);
  });
});
