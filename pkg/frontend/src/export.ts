/** Batch export: WAV directory -> PGRAM v1 files + corpus manifest. */

import { existsSync, readdirSync, readFileSync } from "node:fs";
import { basename, join } from "node:path";
import { LabelMap, mapPosteriors, validateAgainstModel } from "./labelmap.js";
import { AcousticModel, infer } from "./model.js";
import { ManifestEntry, writeManifest, writePgram } from "./pgram.js";
import { parseWav } from "./wav.js";

export interface ExportOptions {
  cohort: string;
  speaker: string;
}

export interface ExportResult {
  manifestPath: string;
  entries: ManifestEntry[];
}

/** Transcripts are optional: a transcripts.json of {clip id: text}. */
function loadTranscripts(audioDir: string): Record<string, string> {
  const path = join(audioDir, "transcripts.json");
  if (!existsSync(path)) {
    return {};
  }
  return JSON.parse(readFileSync(path, "utf-8")) as Record<string, string>;
}

export function exportDirectory(audioDir: string, model: AcousticModel,
                                labelMap: LabelMap, outDir: string,
                                options: ExportOptions = { cohort: "L2", speaker: "unknown" },
                                ): ExportResult {
  validateAgainstModel(labelMap, model);
  const clips = readdirSync(audioDir).filter((f) => f.endsWith(".wav")).sort();
  if (clips.length === 0) {
    throw new Error(`${audioDir}: no .wav files found`);
  }
  const transcripts = loadTranscripts(audioDir);
  const stepMs = (model.frame.hop / model.sampleRate) * 1000;
  const entries: ManifestEntry[] = [];
  for (const clip of clips) {
    const id = basename(clip, ".wav");
    const audio = parseWav(readFileSync(join(audioDir, clip)), clip);
    const posteriors = infer(model, audio.samples);
    const mapped = mapPosteriors(posteriors, model, labelMap);
    const fileName = `${id}.pgram`;
    writePgram(join(outDir, fileName), labelMap.inventory, mapped, stepMs);
    entries.push({
      id,
      pgram: fileName, // relative to the manifest
      text: transcripts[id] ?? "",
      speaker: options.speaker,
      cohort: options.cohort,
    });
  }
  const manifestPath = writeManifest(outDir, entries);
  return { manifestPath, entries };
}
