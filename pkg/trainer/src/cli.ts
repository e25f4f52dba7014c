/**
 * Surrogate trainer CLI.
 *
 *   node dist/cli.js classify --images <idx> --labels-csv <csv> --theta 0.3 --out runs/c03
 *   node dist/cli.js regress  --images <idx> --labels-csv <csv> --out runs/trop
 *
 * Desk scale is the default (epoch cap 10, optional --limit to subsample);
 * --full raises the epoch cap to 300 and lets early stopping decide.
 */
import { parseArgs } from "node:util";

import { readIdxImages } from "./idx";
import { LabelTable, readLabelTable } from "./labels";
import { benchInference, readPipelineBatch100 } from "./bench";
import { saveModel } from "./model";
import { formatTimingLines, writeMetricsJson, writePredictionsCsv } from "./report";
import {
  DESK_CONFIG,
  FULL_CONFIG,
  REGRESSION_TARGETS,
  TrainConfig,
  trainClassifier,
  trainRegressor,
} from "./train";

function limitTable(table: LabelTable, limit: number | undefined): LabelTable {
  if (!limit || limit >= table.rows.length) return table;
  const rows = table.rows.slice(0, limit);
  const byId = new Map<number, number>();
  rows.forEach((row, i) => byId.set(Number(row[0]), i));
  return { header: table.header, rows, byId };
}

function buildConfig(values: Record<string, unknown>): TrainConfig {
  const cfg: TrainConfig = { ...(values.full ? FULL_CONFIG : DESK_CONFIG) };
  if (values.epochs !== undefined) cfg.epochCap = Number(values.epochs);
  if (values.batch !== undefined) cfg.batchSize = Number(values.batch);
  if (values.lr !== undefined) cfg.learningRate = Number(values.lr);
  if (values.seed !== undefined) cfg.seed = Number(values.seed);
  if (values.quiet) cfg.verbose = false;
  return cfg;
}

async function main(): Promise<number> {
  const { positionals, values } = parseArgs({
    allowPositionals: true,
    options: {
      images: { type: "string" },
      "labels-csv": { type: "string" },
      out: { type: "string", default: "runs/out" },
      theta: { type: "string", default: "0.3" },
      targets: { type: "string" },
      epochs: { type: "string" },
      batch: { type: "string" },
      lr: { type: "string" },
      seed: { type: "string" },
      limit: { type: "string" },
      full: { type: "boolean", default: false },
      quiet: { type: "boolean", default: false },
      "pipeline-bench": { type: "string" },
    },
  });
  const command = positionals[0];
  if (!command || !["classify", "regress"].includes(command)) {
    console.error("usage: cli.js <classify|regress> --images <idx> --labels-csv <csv> [options]");
    return 2;
  }
  if (!values.images || !values["labels-csv"]) {
    console.error("--images and --labels-csv are required");
    return 2;
  }

  const images = readIdxImages(values.images);
  const table = limitTable(readLabelTable(values["labels-csv"]), values.limit ? Number(values.limit) : undefined);
  const cfg = buildConfig(values);
  const out = String(values.out);
  console.log(`${command}: ${table.rows.length} labeled images, epochs<=${cfg.epochCap}`);

  let report;
  let model = null;
  let testIds: number[];
  let truthCols: Float32Array[];
  let predCols: Float32Array[];
  let targets: string[];

  if (command === "classify") {
    const theta = Number(values.theta);
    const res = await trainClassifier(images, table, theta, cfg);
    report = res.report;
    model = res.model;
    testIds = res.testIds;
    targets = [`theta=${theta}`];
    truthCols = [res.truth];
    predCols = [res.predictions];
  } else {
    targets = values.targets ? String(values.targets).split(",") : REGRESSION_TARGETS;
    const res = await trainRegressor(images, table, targets, cfg);
    report = res.report;
    model = res.model;
    testIds = res.testIds;
    truthCols = res.truth;
    predCols = res.predictions;
  }

  if (model) {
    report.nnBatch100Seconds = await benchInference(model, images, testIds, 100, cfg.centerInputs);
    await saveModel(model, `${out}/checkpoint`);
  }
  if (values["pipeline-bench"]) {
    report.pipelineBatch100Seconds = readPipelineBatch100(String(values["pipeline-bench"]));
  }

  const metricsPath = writeMetricsJson(out, report);
  const predPath = writePredictionsCsv(out, "predictions.csv", targets, truthCols, predCols, testIds);

  if (report.task === "classify") {
    console.log(
      `test accuracy overall ${report.overall?.toFixed(4)}  class0 ${report.class0?.toFixed(4)}` +
        `  class1 ${report.class1?.toFixed(4)}  (n0=${report.n0}, n1=${report.n1})`
    );
  } else {
    for (const [t, v] of Object.entries(report.relMse ?? {})) {
      console.log(`relative MSE ${t}: ${v.toFixed(6)}`);
    }
  }
  for (const line of formatTimingLines(report)) console.log(line);
  console.log(`wrote ${metricsPath}`);
  console.log(`wrote ${predPath}`);
  return 0;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(err);
    process.exit(2);
  }
);
