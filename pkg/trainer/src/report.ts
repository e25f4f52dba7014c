/** Metrics JSON and prediction-dump CSV emission. */
import * as fs from "fs";
import * as path from "path";

import { EvalReport } from "./train";

export function writeMetricsJson(dir: string, report: EvalReport): string {
  fs.mkdirSync(dir, { recursive: true });
  const p = path.join(dir, "metrics.json");
  fs.writeFileSync(p, JSON.stringify(report, null, 2) + "\n");
  return p;
}

/**
 * Prediction-vs-truth dump for plotting: rows are ordered by increasing
 * ground truth per target, with the order index in the first column.
 */
export function writePredictionsCsv(
  dir: string,
  name: string,
  targets: string[],
  truth: Float32Array[],
  predictions: Float32Array[],
  testIds: number[]
): string {
  fs.mkdirSync(dir, { recursive: true });
  const p = path.join(dir, name);
  const lines = ["target,order,id,truth,prediction"];
  targets.forEach((target, k) => {
    const order = Array.from(truth[k].keys()).sort((a, b) => truth[k][a] - truth[k][b]);
    order.forEach((row, rank) => {
      lines.push(`${target},${rank},${testIds[row]},${truth[k][row]},${predictions[k][row]}`);
    });
  });
  fs.writeFileSync(p, lines.join("\n") + "\n");
  return p;
}

export function formatTimingLines(report: EvalReport): string[] {
  const lines: string[] = [];
  if (report.nnBatch100Seconds !== undefined) {
    lines.push(`nn_batch100_seconds: ${report.nnBatch100Seconds.toFixed(6)}`);
  }
  if (report.pipelineBatch100Seconds !== undefined) {
    lines.push(`pipeline_batch100_seconds: ${report.pipelineBatch100Seconds.toFixed(6)}`);
  }
  return lines;
}
