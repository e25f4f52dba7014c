/**
 * Desk-scale acceptance gate. Expects a data directory prepared by the
 * batch pipeline (see trainer/README.md):
 *
 *   train-images-idx3-ubyte   images (synthetic or real MNIST)
 *   labels.csv                cubiph labels output
 *   bench.csv                 cubiph bench output
 *
 * Gates: theta=0.3 classifier overall test accuracy >= 0.75; every
 * tropical regression target relative MSE <= 0.05; the timing report
 * carries both per-batch times. Prints one PASS/FAIL line per gate and
 * exits nonzero on any failure.
 */
import { parseArgs } from "node:util";

import { benchInference, readPipelineBatch100 } from "./bench";
import { readIdxImages } from "./idx";
import { readLabelTable } from "./labels";
import { writeMetricsJson, writePredictionsCsv } from "./report";
import { DESK_CONFIG, REGRESSION_TARGETS, trainClassifier, trainRegressor } from "./train";

const ACCURACY_FLOOR = 0.75;
const REL_MSE_CEIL = 0.05;

async function main(): Promise<number> {
  const { values } = parseArgs({
    options: {
      data: { type: "string", default: "data/desk" },
      out: { type: "string", default: "runs/acceptance" },
      theta: { type: "string", default: "0.3" },
      epochs: { type: "string" },
      limit: { type: "string", default: "5000" },
    },
  });
  const data = String(values.data);
  const out = String(values.out);
  const theta = Number(values.theta);
  const limit = Number(values.limit);

  const images = readIdxImages(`${data}/train-images-idx3-ubyte`);
  let table = readLabelTable(`${data}/labels.csv`);
  if (table.rows.length > limit) {
    const rows = table.rows.slice(0, limit);
    const byId = new Map<number, number>();
    rows.forEach((row, i) => byId.set(Number(row[0]), i));
    table = { header: table.header, rows, byId };
  }
  const cfg = { ...DESK_CONFIG };
  if (values.epochs !== undefined) cfg.epochCap = Number(values.epochs);

  let failures = 0;
  const check = (name: string, ok: boolean, detail: string) => {
    console.log(`${ok ? "PASS" : "FAIL"} ${name}: ${detail}`);
    if (!ok) failures++;
  };

  console.log(`desk acceptance on ${table.rows.length} images (epoch cap ${cfg.epochCap})`);

  // classification gate
  const cls = await trainClassifier(images, table, theta, cfg);
  if (cls.model) {
    cls.report.nnBatch100Seconds = await benchInference(cls.model, images, cls.testIds, 100, cfg.centerInputs);
  }
  cls.report.pipelineBatch100Seconds = readPipelineBatch100(`${data}/bench.csv`);
  writeMetricsJson(`${out}/classify`, cls.report);
  writePredictionsCsv(
    `${out}/classify`, "predictions.csv", [`theta=${theta}`], [cls.truth], [cls.predictions], cls.testIds
  );
  check(
    `classifier theta=${theta}`,
    (cls.report.overall ?? 0) >= ACCURACY_FLOOR,
    `overall ${cls.report.overall?.toFixed(4)} (class0 ${cls.report.class0?.toFixed(4)}, ` +
      `class1 ${cls.report.class1?.toFixed(4)}), floor ${ACCURACY_FLOOR}`
  );

  // regression gate
  const reg = await trainRegressor(images, table, REGRESSION_TARGETS, cfg);
  if (reg.model) {
    reg.report.nnBatch100Seconds = await benchInference(reg.model, images, reg.testIds, 100, cfg.centerInputs);
  }
  reg.report.pipelineBatch100Seconds = readPipelineBatch100(`${data}/bench.csv`);
  writeMetricsJson(`${out}/regress`, reg.report);
  writePredictionsCsv(
    `${out}/regress`, "predictions.csv", REGRESSION_TARGETS, reg.truth, reg.predictions, reg.testIds
  );
  for (const target of REGRESSION_TARGETS) {
    const v = reg.report.relMse?.[target] ?? Number.POSITIVE_INFINITY;
    check(`regression ${target}`, v <= REL_MSE_CEIL, `relative MSE ${v.toFixed(6)}, ceiling ${REL_MSE_CEIL}`);
  }

  // timing-report gate: both per-batch numbers present
  const haveBoth =
    cls.report.nnBatch100Seconds !== undefined && cls.report.pipelineBatch100Seconds !== undefined;
  check(
    "timing report",
    haveBoth,
    `nn_batch100 ${cls.report.nnBatch100Seconds?.toFixed(4)} s, ` +
      `pipeline_batch100 ${cls.report.pipelineBatch100Seconds?.toFixed(4)} s` +
      (haveBoth && cls.report.nnBatch100Seconds! < cls.report.pipelineBatch100Seconds!
        ? " (nn faster)"
        : " (nn not faster at desk scale; full-scale criterion only)")
  );

  console.log(failures === 0 ? "desk acceptance: all gates passed" : `desk acceptance: ${failures} gate(s) failed`);
  return failures === 0 ? 0 : 1;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(err);
    process.exit(2);
  }
);
