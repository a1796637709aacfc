/** Minimal RIFF/WAVE reader for 16 kHz mono PCM16 audio. */

export interface WavAudio {
  sampleRate: number;
  /** Samples normalized to [-1, 1]. */
  samples: Float64Array;
}

export class WavError extends Error {}

export function parseWav(buffer: Buffer, path = "<buffer>"): WavAudio {
  if (buffer.length < 44 || buffer.toString("ascii", 0, 4) !== "RIFF" ||
      buffer.toString("ascii", 8, 12) !== "WAVE") {
    throw new WavError(`${path}: not a RIFF/WAVE file`);
  }
  let fmt: { format: number; channels: number; sampleRate: number; bits: number } | null = null;
  let data: Buffer | null = null;
  let offset = 12;
  while (offset + 8 <= buffer.length) {
    const id = buffer.toString("ascii", offset, offset + 4);
    const size = buffer.readUInt32LE(offset + 4);
    const body = buffer.subarray(offset + 8, offset + 8 + size);
    if (id === "fmt ") {
      fmt = {
        format: body.readUInt16LE(0),
        channels: body.readUInt16LE(2),
        sampleRate: body.readUInt32LE(4),
        bits: body.readUInt16LE(14),
      };
    } else if (id === "data") {
      data = body;
    }
    offset += 8 + size + (size % 2); // chunks are word-aligned
  }
  if (!fmt || !data) {
    throw new WavError(`${path}: missing fmt/data chunk`);
  }
  if (fmt.format !== 1 || fmt.bits !== 16) {
    throw new WavError(`${path}: only 16-bit PCM is supported`);
  }
  if (fmt.channels !== 1) {
    throw new WavError(`${path}: only mono audio is supported`);
  }
  if (fmt.sampleRate !== 16000) {
    throw new WavError(`${path}: expected 16 kHz audio, got ${fmt.sampleRate} Hz`);
  }
  const n = Math.floor(data.length / 2);
  const samples = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    samples[i] = data.readInt16LE(2 * i) / 32768;
  }
  return { sampleRate: fmt.sampleRate, samples };
}

/** Encode normalized samples as a 16 kHz mono PCM16 WAV file. */
export function encodeWav(samples: Float64Array, sampleRate = 16000): Buffer {
  const data = Buffer.alloc(samples.length * 2);
  for (let i = 0; i < samples.length; i++) {
    const clipped = Math.max(-1, Math.min(1, samples[i]));
    data.writeInt16LE(Math.round(clipped * 32767), 2 * i);
  }
  const header = Buffer.alloc(44);
  header.write("RIFF", 0, "ascii");
  header.writeUInt32LE(36 + data.length, 4);
  header.write("WAVE", 8, "ascii");
  header.write("fmt ", 12, "ascii");
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20); // PCM
  header.writeUInt16LE(1, 22); // mono
  header.writeUInt32LE(sampleRate, 24);
  header.writeUInt32LE(sampleRate * 2, 28);
  header.writeUInt16LE(2, 32);
  header.writeUInt16LE(16, 34);
  header.write("data", 36, "ascii");
  header.writeUInt32LE(data.length, 40);
  return Buffer.concat([header, data]);
}
