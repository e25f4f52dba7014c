/**
 * Label CSV parsing and train/val/test splitting.
 *
 * The CSV is the single source of labels: cell values are kept as raw
 * strings so (id, label) pairs round-trip bit-exactly, and numeric views
 * are derived on demand.
 */
import * as fs from "fs";

export interface LabelTable {
  header: string[];
  /** raw cells per row, aligned with header */
  rows: string[][];
  /** row index by image id */
  byId: Map<number, number>;
}

export function parseLabelCsv(text: string): LabelTable {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new Error("empty label CSV");
  const header = lines[0].split(",");
  if (header[0] !== "id" || header[1] !== "label") {
    throw new Error(`unexpected label CSV header: ${lines[0]}`);
  }
  const rows = lines.slice(1).map((l) => l.split(","));
  const byId = new Map<number, number>();
  rows.forEach((row, i) => byId.set(Number(row[0]), i));
  return { header, rows, byId };
}

export function readLabelTable(path: string): LabelTable {
  return parseLabelCsv(fs.readFileSync(path, "utf8"));
}

/** Column name for a theta value, matching the exporter's %g formatting. */
export function thetaColumnName(theta: number): string {
  return `theta=${formatG(theta)}`;
}

function formatG(x: number): string {
  // mimic printf %g for the values used in theta grids
  const fixed = x.toPrecision(6);
  return String(Number(fixed));
}

export function columnIndex(table: LabelTable, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`label CSV lacks column '${name}' (have: ${table.header.join(", ")})`);
  }
  return idx;
}

export function columnValues(table: LabelTable, name: string, ids: number[]): Float32Array {
  const col = columnIndex(table, name);
  const out = new Float32Array(ids.length);
  ids.forEach((id, i) => {
    const row = table.byId.get(id);
    if (row === undefined) throw new Error(`id ${id} missing from label CSV`);
    out[i] = Number(table.rows[row][col]);
  });
  return out;
}

export function rawPairs(table: LabelTable, column: string): Array<[string, string]> {
  const col = columnIndex(table, column);
  return table.rows.map((row) => [row[0], row[col]]);
}

/** Deterministic PRNG (mulberry32) so splits reproduce across runs. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export interface Split {
  train: number[];
  val: number[];
  test: number[];
}

export function splitIndices(n: number, ratios: [number, number, number], seed: number): Split {
  const sum = ratios[0] + ratios[1] + ratios[2];
  if (Math.abs(sum - 1) > 1e-9) throw new Error(`split ratios must sum to 1, got ${sum}`);
  const idx = Array.from({ length: n }, (_, i) => i);
  const rand = mulberry32(seed);
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [idx[i], idx[j]] = [idx[j], idx[i]];
  }
  const nTrain = Math.round(n * ratios[0]);
  const nVal = Math.round(n * ratios[1]);
  return {
    train: idx.slice(0, nTrain),
    val: idx.slice(nTrain, nTrain + nVal),
    test: idx.slice(nTrain + nVal),
  };
}
