/** PGRAM v1 writer and corpus manifest writer.
 *
 * PGRAM v1 (text): line 1 "PGRAM 1"; line 2 the inventory labels,
 * space separated, blank last; line 3 "frames=<T> step_ms=<ms>"; then
 * one row of space-separated floats per frame.  Numbers use the
 * shortest exact decimal representation, so files round-trip bitwise
 * through the engine's reader.
 */

import { mkdirSync, renameSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";

export interface ManifestEntry {
  id: string;
  pgram: string;
  text: string;
  speaker: string;
  cohort: string;
}

function atomicWrite(path: string, content: string): void {
  mkdirSync(dirname(path), { recursive: true });
  const tmp = `${path}.tmp.${process.pid}`;
  writeFileSync(tmp, content, "utf-8");
  renameSync(tmp, path);
}

export function writePgram(path: string, labels: string[], frames: number[][],
                           stepMs = 10): void {
  const lines = [
    "PGRAM 1",
    labels.join(" "),
    `frames=${frames.length} step_ms=${String(stepMs)}`,
  ];
  for (const row of frames) {
    if (row.length !== labels.length) {
      throw new Error(`row width ${row.length} does not match ${labels.length} labels`);
    }
    lines.push(row.map((v) => String(v)).join(" "));
  }
  atomicWrite(path, lines.join("\n") + "\n");
}

export function writeManifest(outDir: string, entries: ManifestEntry[]): string {
  const path = join(outDir, "manifest.json");
  atomicWrite(path, JSON.stringify({ utterances: entries }, null, 1) + "\n");
  return path;
}
