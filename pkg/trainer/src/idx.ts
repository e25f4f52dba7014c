/**
 * MNIST-style IDX readers.
 *
 * Data format (big endian):
 *   images: u32 magic 0x00000803 | u32 count | u32 rows | u32 cols | pixels
 *   labels: u32 magic 0x00000801 | u32 count | label bytes
 */
import * as fs from "fs";
import * as zlib from "zlib";

export const IMAGE_MAGIC = 0x00000803;
export const LABEL_MAGIC = 0x00000801;

export interface IdxImages {
  count: number;
  rows: number;
  cols: number;
  /** grey values in [0, 1], row-major per image */
  pixels: Float32Array;
}

function readMaybeGz(path: string): Buffer {
  const raw = fs.readFileSync(path);
  if (raw.length >= 2 && raw[0] === 0x1f && raw[1] === 0x8b) {
    return zlib.gunzipSync(raw);
  }
  return raw;
}

export function readIdxImages(path: string): IdxImages {
  const buf = readMaybeGz(path);
  const magic = buf.readUInt32BE(0);
  if (magic !== IMAGE_MAGIC) {
    throw new Error(`bad image magic 0x${magic.toString(16)} in ${path}`);
  }
  const count = buf.readUInt32BE(4);
  const rows = buf.readUInt32BE(8);
  const cols = buf.readUInt32BE(12);
  const need = 16 + count * rows * cols;
  if (buf.length < need) {
    throw new Error(`truncated image stream ${path}: ${buf.length} < ${need}`);
  }
  const pixels = new Float32Array(count * rows * cols);
  for (let i = 0; i < pixels.length; i++) {
    pixels[i] = buf[16 + i] / 255;
  }
  return { count, rows, cols, pixels };
}

export function readIdxLabels(path: string): Uint8Array {
  const buf = readMaybeGz(path);
  const magic = buf.readUInt32BE(0);
  if (magic !== LABEL_MAGIC) {
    throw new Error(`bad label magic 0x${magic.toString(16)} in ${path}`);
  }
  const count = buf.readUInt32BE(4);
  if (buf.length < 8 + count) {
    throw new Error(`truncated label stream ${path}`);
  }
  return new Uint8Array(buf.buffer, buf.byteOffset + 8, count);
}
