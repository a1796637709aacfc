#!/usr/bin/env node
/** Command-line entry point: export a directory of WAV clips as PGRAM files. */

import { fileURLToPath } from "node:url";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { exportDirectory } from "./export.js";
import { LabelMapError, loadLabelMap } from "./labelmap.js";
import { ModelError, loadModel } from "./model.js";
import { WavError } from "./wav.js";

export const DEFAULT_MODEL = fileURLToPath(new URL("../assets/model.json", import.meta.url));

export async function main(argv: string[]): Promise<number> {
  const parser = yargs(argv)
    .scriptName("pgram-export")
    .command("export", "convert WAV clips to posteriorgram files", (y) =>
      y.option("audio", { type: "string", demandOption: true, describe: "directory of 16 kHz mono PCM16 .wav clips" })
        .option("labelmap", { type: "string", demandOption: true, describe: "JSON map from model labels to engine inventory" })
        .option("out", { type: "string", demandOption: true, describe: "output directory for .pgram files + manifest.json" })
        .option("model", { type: "string", default: DEFAULT_MODEL, describe: "acoustic model JSON" })
        .option("cohort", { type: "string", default: "L2", choices: ["L1", "L2"] })
        .option("speaker", { type: "string", default: "unknown" }))
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      if (err) throw err;
      throw new Error(msg);
    });

  const args = await parser.parse();
  const model = loadModel(args.model as string);
  const labelMap = loadLabelMap(args.labelmap as string);
  const result = exportDirectory(args.audio as string, model, labelMap,
                                 args.out as string,
                                 { cohort: args.cohort as string, speaker: args.speaker as string });
  console.error(`exported ${result.entries.length} clips -> ${result.manifestPath}`);
  return 0;
}

const entryPath = process.argv[1] ? fileURLToPath(new URL(`file://${process.argv[1]}`)) : "";
if (entryPath && fileURLToPath(import.meta.url) === entryPath) {
  main(hideBin(process.argv)).then(
    (code) => process.exit(code),
    (err: unknown) => {
      const usage = !(err instanceof WavError || err instanceof ModelError || err instanceof LabelMapError)
        && !(err instanceof Error && err.message.includes("no .wav files"));
      console.error(`pgram-export: ${err instanceof Error ? err.message : String(err)}`);
      process.exit(usage ? 2 : 1);
    },
  );
}
