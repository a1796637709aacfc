/** A bundled CTC acoustic model: linear scoring of band features + softmax.
 *
 * The model file is plain JSON so inference is dependency-free and
 * fully deterministic; it trades accuracy for reproducibility, which
 * is all the downstream engine's file contract requires.
 */

import { readFileSync } from "node:fs";
import { FrameParams, extractFeatures } from "./features.js";

export interface AcousticModel {
  format: string;
  sampleRate: number;
  frame: FrameParams;
  bandsHz: number[];
  /** Output labels; must contain the CTC blank label. */
  labels: string[];
  blankLabel: string;
  /** Per label: weights over band shares. */
  weights: number[][];
  /** Per label: weight on (logEnergy - energyRef). */
  energyWeight: number[];
  energyRef: number;
  bias: number[];
}

export class ModelError extends Error {}

export function loadModel(path: string): AcousticModel {
  const model = JSON.parse(readFileSync(path, "utf-8")) as AcousticModel;
  if (model.format !== "pgram-frontend-am 1") {
    throw new ModelError(`${path}: unsupported model format ${model.format}`);
  }
  const n = model.labels.length;
  if (model.weights.length !== n || model.energyWeight.length !== n ||
      model.bias.length !== n ||
      model.weights.some((row) => row.length !== model.bandsHz.length)) {
    throw new ModelError(`${path}: inconsistent weight shapes`);
  }
  if (!model.labels.includes(model.blankLabel)) {
    throw new ModelError(`${path}: blank label ${model.blankLabel} not in labels`);
  }
  return model;
}

/** Frame-level posterior matrix over the model's labels. */
export function infer(model: AcousticModel, samples: Float64Array): number[][] {
  const features = extractFeatures(samples, model.bandsHz, model.sampleRate, model.frame);
  return features.map((f) => {
    const logits = model.labels.map((_, l) => {
      let z = model.bias[l] + model.energyWeight[l] * (f.logEnergy - model.energyRef);
      for (let b = 0; b < model.bandsHz.length; b++) {
        z += model.weights[l][b] * f.shares[b];
      }
      return z;
    });
    const top = Math.max(...logits);
    const exp = logits.map((z) => Math.exp(z - top));
    const total = exp.reduce((a, b) => a + b, 0);
    return exp.map((e) => e / total);
  });
}
