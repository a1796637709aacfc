/** Regenerate the bundled sample WAV clips (deterministic). */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { SAMPLE_CLIPS, renderClip } from "../src/samples.js";
import { encodeWav } from "../src/wav.js";

const outDir = fileURLToPath(new URL("../samples", import.meta.url));
mkdirSync(outDir, { recursive: true });

const transcripts: Record<string, string> = {};
for (const spec of SAMPLE_CLIPS) {
  writeFileSync(join(outDir, `${spec.id}.wav`), encodeWav(renderClip(spec)));
  transcripts[spec.id] = spec.phones.join(" ");
}
writeFileSync(join(outDir, "transcripts.json"), JSON.stringify(transcripts, null, 1) + "\n");
console.error(`wrote ${SAMPLE_CLIPS.length} clips -> ${outDir}`);
