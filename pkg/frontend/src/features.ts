/** Framewise acoustic features: per-band energies via Goertzel filters. */

export interface FrameParams {
  /** Window length in samples (25 ms at 16 kHz). */
  size: number;
  /** Hop length in samples (10 ms at 16 kHz). */
  hop: number;
}

export const DEFAULT_FRAME: FrameParams = { size: 400, hop: 160 };

/** Energy of one frequency component over a window (Goertzel algorithm). */
export function goertzel(samples: Float64Array, start: number, size: number,
                         freqHz: number, sampleRate: number): number {
  const w = (2 * Math.PI * freqHz) / sampleRate;
  const coeff = 2 * Math.cos(w);
  let s0 = 0;
  let s1 = 0;
  let s2 = 0;
  for (let i = start; i < start + size; i++) {
    s0 = samples[i] + coeff * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  return (s1 * s1 + s2 * s2 - coeff * s1 * s2) / (size * size);
}

export interface FrameFeatures {
  /** Band energy shares, one per analysis band; sums to 1 (or all 0). */
  shares: number[];
  /** Log10 mean-square frame energy. */
  logEnergy: number;
}

/** Slice audio into frames and compute band shares + log energy. */
export function extractFeatures(samples: Float64Array, bandsHz: number[],
                                sampleRate: number,
                                frame: FrameParams = DEFAULT_FRAME): FrameFeatures[] {
  const out: FrameFeatures[] = [];
  for (let start = 0; start + frame.size <= samples.length; start += frame.hop) {
    let meanSquare = 0;
    for (let i = start; i < start + frame.size; i++) {
      meanSquare += samples[i] * samples[i];
    }
    meanSquare /= frame.size;
    const energies = bandsHz.map(
      (f) => goertzel(samples, start, frame.size, f, sampleRate),
    );
    const total = energies.reduce((a, b) => a + b, 0);
    out.push({
      shares: total > 0 ? energies.map((e) => e / total) : energies.map(() => 0),
      logEnergy: Math.log10(1e-10 + meanSquare),
    });
  }
  return out;
}
