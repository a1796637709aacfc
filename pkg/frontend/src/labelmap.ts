/** Mapping from acoustic-model labels onto the engine's phoneme inventory. */

import { readFileSync } from "node:fs";
import { AcousticModel } from "./model.js";

const BLANK = "blank";
const RESERVED = ["pause", "eos", BLANK];

export interface LabelMap {
  /** Engine inventory labels, blank last. */
  inventory: string[];
  /** model label -> engine label, or null to drop the column. */
  map: Record<string, string | null>;
}

export class LabelMapError extends Error {}

export function loadLabelMap(path: string): LabelMap {
  const doc = JSON.parse(readFileSync(path, "utf-8")) as LabelMap;
  if (!Array.isArray(doc.inventory) || typeof doc.map !== "object" || doc.map === null) {
    throw new LabelMapError(`${path}: expected {inventory: [...], map: {...}}`);
  }
  for (const r of RESERVED) {
    if (!doc.inventory.includes(r)) {
      throw new LabelMapError(`${path}: inventory is missing the reserved label '${r}'`);
    }
  }
  if (doc.inventory[doc.inventory.length - 1] !== BLANK) {
    throw new LabelMapError(`${path}: '${BLANK}' must be the last inventory label`);
  }
  if (new Set(doc.inventory).size !== doc.inventory.length) {
    throw new LabelMapError(`${path}: duplicate inventory labels`);
  }
  for (const [from, to] of Object.entries(doc.map)) {
    if (to !== null && !doc.inventory.includes(to)) {
      throw new LabelMapError(`${path}: '${from}' maps to unknown label '${to}'`);
    }
  }
  return doc;
}

/** Check the map is total over the model's labels and maps blank to blank. */
export function validateAgainstModel(labelMap: LabelMap, model: AcousticModel): void {
  const missing = model.labels.filter((l) => !(l in labelMap.map));
  if (missing.length > 0) {
    throw new LabelMapError(
      `label map does not cover model label(s): ${missing.join(", ")}`,
    );
  }
  if (labelMap.map[model.blankLabel] !== BLANK) {
    throw new LabelMapError(
      `model blank '${model.blankLabel}' must map to '${BLANK}'`,
    );
  }
}

/** Project model-label posteriors onto the engine inventory.
 *
 * Columns mapping to the same engine label accumulate; dropped columns
 * lose their mass, so every row is renormalized afterwards.
 */
export function mapPosteriors(frames: number[][], model: AcousticModel,
                              labelMap: LabelMap): number[][] {
  validateAgainstModel(labelMap, model);
  const targets = model.labels.map((l) => {
    const to = labelMap.map[l];
    return to === null ? -1 : labelMap.inventory.indexOf(to);
  });
  return frames.map((row) => {
    const out = new Array<number>(labelMap.inventory.length).fill(0);
    for (let i = 0; i < row.length; i++) {
      if (targets[i] >= 0) {
        out[targets[i]] += row[i];
      }
    }
    const total = out.reduce((a, b) => a + b, 0);
    if (total <= 0) {
      throw new LabelMapError("a frame lost all probability mass to dropped labels");
    }
    return out.map((p) => p / total);
  });
}
