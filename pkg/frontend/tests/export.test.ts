import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { beforeAll, describe, expect, it } from "vitest";
import { main } from "../src/cli.js";
import { SAMPLE_CLIPS, renderClip } from "../src/samples.js";
import { encodeWav } from "../src/wav.js";

const MODEL_PATH = fileURLToPath(new URL("../assets/model.json", import.meta.url));
const LABELMAP_PATH = fileURLToPath(new URL("../assets/labelmap.json", import.meta.url));
const ENGINE_SRC = fileURLToPath(new URL("../../src", import.meta.url));
const PY_ENV = { ...process.env, PYTHONPATH: ENGINE_SRC };

function python(code: string, ...args: string[]): string {
  return execFileSync("python3", ["-c", code, ...args], { env: PY_ENV, encoding: "utf-8" });
}

let audioDir: string;
let outDir: string;
let manifest: { utterances: { id: string; pgram: string; text: string; cohort: string }[] };

beforeAll(async () => {
  audioDir = mkdtempSync(join(tmpdir(), "audio-"));
  outDir = mkdtempSync(join(tmpdir(), "pgrams-"));
  const transcripts: Record<string, string> = {};
  for (const spec of SAMPLE_CLIPS) {
    writeFileSync(join(audioDir, `${spec.id}.wav`), encodeWav(renderClip(spec)));
    transcripts[spec.id] = spec.phones.join(" ");
  }
  writeFileSync(join(audioDir, "transcripts.json"), JSON.stringify(transcripts));
  const code = await main([
    "export", "--audio", audioDir, "--labelmap", LABELMAP_PATH, "--out", outDir,
    "--model", MODEL_PATH, "--speaker", "spk01",
  ]);
  expect(code).toBe(0);
  manifest = JSON.parse(readFileSync(join(outDir, "manifest.json"), "utf-8"));
});

describe("export end to end", () => {
  it("writes one posteriorgram per clip plus a manifest", () => {
    expect(manifest.utterances.map((u) => u.id)).toEqual(["clip01", "clip02", "clip03"]);
    for (const u of manifest.utterances) {
      expect(u.cohort).toBe("L2");
      expect(existsSync(join(outDir, u.pgram))).toBe(true);
    }
    expect(manifest.utterances[2].text).toBe("eh s eh");
  });

  it("writes normalized rows over the engine inventory", () => {
    const lines = readFileSync(join(outDir, "clip01.pgram"), "utf-8").trimEnd().split("\n");
    expect(lines[1]).toBe("aa eh s pause eos blank");
    for (const line of lines.slice(3)) {
      const row = line.split(" ").map(Number);
      expect(row.length).toBe(6);
      expect(row.reduce((a, b) => a + b, 0)).toBeCloseTo(1, 9);
    }
  });

  it("passes the engine reader's validation", () => {
    const out = python(
      [
        "import sys",
        "from prondet import pgram_io",
        "from prondet.phonemes import build_inventory",
        "m = pgram_io.load_manifest(sys.argv[1])",
        "with open(m.utterances[0].pgram) as f:",
        "    f.readline(); inv = build_inventory(f.readline().split())",
        "for u in m.utterances:",
        "    pg = pgram_io.read_posteriorgram(u.pgram, inv)",
        "    print(u.id, pg.frames.shape[0])",
      ].join("\n"),
      join(outDir, "manifest.json"),
    );
    const counts = out.trim().split("\n");
    expect(counts.length).toBe(3);
    for (const line of counts) {
      expect(Number(line.split(" ")[1])).toBeGreaterThan(10);
    }
  });

  it("round-trips values bitwise through the engine reader", () => {
    const out = python(
      [
        "import sys",
        "from prondet import pgram_io",
        "from prondet.phonemes import build_inventory",
        "with open(sys.argv[1]) as f:",
        "    f.readline(); inv = build_inventory(f.readline().split())",
        "pg = pgram_io.read_posteriorgram(sys.argv[1], inv)",
        "print('\\n'.join(' '.join(repr(float(v)) for v in row) for row in pg.frames))",
      ].join("\n"),
      join(outDir, "clip02.pgram"),
    );
    const written = readFileSync(join(outDir, "clip02.pgram"), "utf-8")
      .trimEnd().split("\n").slice(3)
      .map((line) => line.split(" ").map(Number));
    const readBack = out.trim().split("\n").map((line) => line.split(" ").map(Number));
    expect(readBack).toEqual(written);
  });

  it("decodes back to the spoken phone sequences", () => {
    const decoded = mkdtempSync(join(tmpdir(), "nbest-"));
    execFileSync(
      "python3",
      ["-m", "prondet.cli", "decode",
       "--manifest", join(outDir, "manifest.json"), "--out", decoded],
      { env: PY_ENV, encoding: "utf-8" },
    );
    let distance = 0;
    let total = 0;
    for (const u of manifest.utterances) {
      const doc = JSON.parse(readFileSync(join(decoded, `${u.id}.nbest.json`), "utf-8"));
      const best = doc.hypotheses[0].phonemes as string[];
      const reference = u.text.split(" ");
      distance += editDistance(best, reference);
      total += reference.length;
    }
    expect(distance / total).toBeLessThan(0.4);
  }, 60000);
});

describe("cli", () => {
  it("rejects an unknown command", async () => {
    await expect(main(["frobnicate"])).rejects.toThrow();
  });

  it("rejects an empty audio directory", async () => {
    const empty = mkdtempSync(join(tmpdir(), "empty-"));
    await expect(main([
      "export", "--audio", empty, "--labelmap", LABELMAP_PATH, "--out", empty,
    ])).rejects.toThrow(/no .wav files/);
  });
});

function editDistance(a: string[], b: string[]): number {
  const dp = Array.from({ length: a.length + 1 }, (_, i) =>
    Array.from({ length: b.length + 1 }, (_, j) => (i === 0 ? j : j === 0 ? i : 0)));
  for (let i = 1; i <= a.length; i++) {
    for (let j = 1; j <= b.length; j++) {
      dp[i][j] = Math.min(
        dp[i - 1][j] + 1,
        dp[i][j - 1] + 1,
        dp[i - 1][j - 1] + (a[i - 1] === b[j - 1] ? 0 : 1),
      );
    }
  }
  return dp[a.length][b.length];
}
