/** Deterministic tone-sequence sample clips for demos and tests.
 *
 * Each engine phoneme is rendered as a pure tone at the centre of one
 * analysis band; silences separate the tones and become CTC blanks.
 */

export const SAMPLE_RATE = 16000;

export const PHONE_TONES_HZ: Record<string, number> = {
  aa: 300,
  eh: 600,
  s: 1200,
};

export interface ClipSpec {
  id: string;
  phones: string[];
}

export const SAMPLE_CLIPS: ClipSpec[] = [
  { id: "clip01", phones: ["aa", "eh"] },
  { id: "clip02", phones: ["s", "aa"] },
  { id: "clip03", phones: ["eh", "s", "eh"] },
];

const TONE_SECONDS = 0.3;
const GAP_SECONDS = 0.2;
const AMPLITUDE = 0.5;

export function renderClip(spec: ClipSpec): Float64Array {
  const tone = Math.round(TONE_SECONDS * SAMPLE_RATE);
  const gap = Math.round(GAP_SECONDS * SAMPLE_RATE);
  const total = gap + spec.phones.length * (tone + gap);
  const samples = new Float64Array(total);
  let at = gap;
  for (const phone of spec.phones) {
    const freq = PHONE_TONES_HZ[phone];
    if (freq === undefined) {
      throw new Error(`no tone assigned to phone '${phone}'`);
    }
    for (let i = 0; i < tone; i++) {
      samples[at + i] = AMPLITUDE * Math.sin((2 * Math.PI * freq * i) / SAMPLE_RATE);
    }
    at += tone + gap;
  }
  return samples;
}
