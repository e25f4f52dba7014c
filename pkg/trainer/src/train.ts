/**
 * Training harness: epoch-by-epoch fits with early stopping (patience 30)
 * and learning-rate reduction on validation plateau (patience 5), plus the
 * degenerate-input guards. The label CSV is the only source of targets.
 */
import * as tf from "@tensorflow/tfjs";

import { IdxImages } from "./idx";
import {
  LabelTable,
  Split,
  columnValues,
  splitIndices,
  thetaColumnName,
} from "./labels";
import { ClassificationMetrics, classificationMetrics, relativeMse } from "./metrics";
import { buildLeNet5, setLearningRate } from "./model";
import { EarlyStopping, ReduceLrOnPlateau } from "./schedule";

export interface TrainConfig {
  epochCap: number;
  batchSize: number;
  learningRate: number;
  earlyStopPatience: number;
  lrPatience: number;
  lrFactor: number;
  minLr: number;
  splitRatios: [number, number, number];
  seed: number;
  verbose: boolean;
  /** map [0,1] grey values to [-1,1] before the first conv */
  centerInputs: boolean;
}

export const DESK_CONFIG: TrainConfig = {
  epochCap: 14,
  batchSize: 64,
  learningRate: 5e-3,
  earlyStopPatience: 30,
  lrPatience: 5,
  lrFactor: 0.2,
  minLr: 1e-5,
  splitRatios: [0.8, 0.1, 0.1],
  seed: 7,
  verbose: true,
  centerInputs: true,
};

export const FULL_CONFIG: TrainConfig = {
  ...DESK_CONFIG,
  epochCap: 300,
};

export interface EpochRecord {
  epoch: number;
  loss: number;
  valLoss: number;
  lr: number;
}

export interface EvalReport {
  task: string;
  theta?: number;
  targets?: string[];
  nTrain: number;
  nVal: number;
  nTest: number;
  epochsRun: number;
  degenerate: boolean;
  overall?: number;
  class0?: number;
  class1?: number;
  n0?: number;
  n1?: number;
  relMse?: Record<string, number>;
  history: EpochRecord[];
  nnBatch100Seconds?: number;
  pipelineBatch100Seconds?: number;
}

export const REGRESSION_TARGETS = ["t1_x10", "t2_x10", "t3_x10", "t4_x10", "mean_d_x10"];

export function gatherImages(images: IdxImages, ids: number[], center = false): tf.Tensor4D {
  const { rows, cols } = images;
  const px = rows * cols;
  const out = new Float32Array(ids.length * px);
  ids.forEach((id, i) => {
    const src = images.pixels.subarray(id * px, (id + 1) * px);
    if (center) {
      for (let p = 0; p < px; p++) out[i * px + p] = src[p] * 2 - 1;
    } else {
      out.set(src, i * px);
    }
  });
  return tf.tensor4d(out, [ids.length, rows, cols, 1]);
}

export function makeSplit(n: number, cfg: TrainConfig): Split {
  return splitIndices(n, cfg.splitRatios, cfg.seed);
}

async function fitWithSchedules(
  model: tf.LayersModel,
  x: tf.Tensor,
  y: tf.Tensor,
  xVal: tf.Tensor,
  yVal: tf.Tensor,
  cfg: TrainConfig
): Promise<EpochRecord[]> {
  const stopper = new EarlyStopping(cfg.earlyStopPatience);
  const reducer = new ReduceLrOnPlateau(cfg.learningRate, cfg.lrPatience, cfg.lrFactor, cfg.minLr);
  const history: EpochRecord[] = [];
  let bestVal = Number.POSITIVE_INFINITY;
  let bestWeights: tf.Tensor[] | null = null;

  for (let epoch = 0; epoch < cfg.epochCap; epoch++) {
    const h = await model.fit(x, y, {
      epochs: 1,
      batchSize: cfg.batchSize,
      validationData: [xVal, yVal],
      shuffle: true,
      verbose: 0,
    });
    const loss = Number(h.history.loss[0]);
    const valLoss = Number(h.history.val_loss[0]);
    history.push({ epoch, loss, valLoss, lr: reducer.current });
    if (cfg.verbose) {
      console.log(
        `epoch ${epoch + 1}/${cfg.epochCap}  loss ${loss.toFixed(4)}  val ${valLoss.toFixed(4)}  lr ${reducer.current}`
      );
    }
    if (valLoss < bestVal) {
      bestVal = valLoss;
      if (bestWeights) bestWeights.forEach((w) => w.dispose());
      bestWeights = model.getWeights().map((w) => w.clone());
    }
    const newLr = reducer.update(valLoss);
    if (newLr !== null) {
      setLearningRate(model, newLr);
      if (cfg.verbose) console.log(`  reducing learning rate to ${newLr}`);
    }
    if (stopper.update(valLoss, epoch)) {
      if (cfg.verbose) console.log(`  early stop at epoch ${epoch + 1}`);
      break;
    }
  }
  if (bestWeights) {
    model.setWeights(bestWeights);
    bestWeights.forEach((w) => w.dispose());
  }
  return history;
}

export interface ClassifyResult {
  model: tf.LayersModel | null;
  report: EvalReport;
  predictions: Float32Array;
  truth: Float32Array;
  testIds: number[];
}

export async function trainClassifier(
  images: IdxImages,
  table: LabelTable,
  theta: number,
  cfg: TrainConfig
): Promise<ClassifyResult> {
  const ids = table.rows.map((r) => Number(r[0]));
  const split = makeSplit(ids.length, cfg);
  const column = thetaColumnName(theta);
  const y = {
    train: columnValues(table, column, split.train.map((i) => ids[i])),
    val: columnValues(table, column, split.val.map((i) => ids[i])),
    test: columnValues(table, column, split.test.map((i) => ids[i])),
  };
  const testIds = split.test.map((i) => ids[i]);

  const trainClasses = new Set(Array.from(y.train));
  if (trainClasses.size < 2) {
    // single-class training split: report the majority predictor instead
    console.warn(`warning: training split has a single class for ${column}; skipping fit`);
    const majority = y.train.length > 0 ? y.train[0] : 0;
    const preds = new Float32Array(y.test.length).fill(majority);
    const m = classificationMetrics(preds, y.test);
    return {
      model: null,
      predictions: preds,
      truth: y.test,
      testIds,
      report: {
        task: "classify",
        theta,
        nTrain: y.train.length,
        nVal: y.val.length,
        nTest: y.test.length,
        epochsRun: 0,
        degenerate: true,
        ...metricsFields(m),
        history: [],
      },
    };
  }

  const model = buildLeNet5(images.rows, images.cols, 1, "classify", 1, cfg.learningRate);
  const xTrain = gatherImages(images, split.train.map((i) => ids[i]), cfg.centerInputs);
  const xVal = gatherImages(images, split.val.map((i) => ids[i]), cfg.centerInputs);
  const xTest = gatherImages(images, testIds, cfg.centerInputs);
  const yTrain = tf.tensor2d(y.train, [y.train.length, 1]);
  const yVal = tf.tensor2d(y.val, [y.val.length, 1]);

  const history = await fitWithSchedules(model, xTrain, yTrain, xVal, yVal, cfg);

  const predTensor = model.predict(xTest, { batchSize: cfg.batchSize }) as tf.Tensor;
  const preds = new Float32Array(await predTensor.data());
  const m = classificationMetrics(preds, y.test);
  tf.dispose([xTrain, xVal, xTest, yTrain, yVal, predTensor]);

  return {
    model,
    predictions: preds,
    truth: y.test,
    testIds,
    report: {
      task: "classify",
      theta,
      nTrain: y.train.length,
      nVal: y.val.length,
      nTest: y.test.length,
      epochsRun: history.length,
      degenerate: false,
      ...metricsFields(m),
      history,
    },
  };
}

function metricsFields(m: ClassificationMetrics) {
  return { overall: m.overall, class0: m.class0, class1: m.class1, n0: m.n0, n1: m.n1 };
}

export interface RegressResult {
  model: tf.LayersModel | null;
  report: EvalReport;
  predictions: Float32Array[];
  truth: Float32Array[];
  testIds: number[];
}

export async function trainRegressor(
  images: IdxImages,
  table: LabelTable,
  targets: string[],
  cfg: TrainConfig
): Promise<RegressResult> {
  const ids = table.rows.map((r) => Number(r[0]));
  const split = makeSplit(ids.length, cfg);
  const pick = (part: number[]) => part.map((i) => ids[i]);
  const gatherTargets = (sel: number[]) =>
    targets.map((t) => columnValues(table, t, sel));

  const trainT = gatherTargets(pick(split.train));
  const valT = gatherTargets(pick(split.val));
  const testT = gatherTargets(pick(split.test));
  const testIds = pick(split.test);

  const constant = trainT.every((col) => new Set(Array.from(col)).size <= 1);
  if (constant) {
    console.warn("warning: all regression targets are constant on the training split");
    const preds = testT.map((col, k) => {
      const fill = trainT[k].length > 0 ? trainT[k][0] : 0;
      return new Float32Array(col.length).fill(fill);
    });
    const relMse: Record<string, number> = {};
    targets.forEach((t, k) => (relMse[t] = relativeMse(preds[k], testT[k])));
    return {
      model: null,
      predictions: preds,
      truth: testT,
      testIds,
      report: {
        task: "regress",
        targets,
        nTrain: trainT[0].length,
        nVal: valT[0].length,
        nTest: testT[0].length,
        epochsRun: 0,
        degenerate: true,
        relMse,
        history: [],
      },
    };
  }

  const model = buildLeNet5(images.rows, images.cols, 1, "regress", targets.length, cfg.learningRate);
  const xTrain = gatherImages(images, pick(split.train), cfg.centerInputs);
  const xVal = gatherImages(images, pick(split.val), cfg.centerInputs);
  const xTest = gatherImages(images, testIds, cfg.centerInputs);

  // standardize each target on the training split so the joint MSE weighs
  // small-scale targets (mean bar length) the same as the large sums;
  // predictions are mapped back to the raw scale before scoring
  const mu = trainT.map((col) => col.reduce((a, b) => a + b, 0) / col.length);
  const sigma = trainT.map((col, k) => {
    let s = 0;
    for (const v of col) s += (v - mu[k]) ** 2;
    return Math.max(Math.sqrt(s / col.length), 1e-6);
  });
  const stack = (cols: Float32Array[]) => {
    const n = cols[0].length;
    const out = new Float32Array(n * cols.length);
    for (let i = 0; i < n; i++)
      for (let k = 0; k < cols.length; k++)
        out[i * cols.length + k] = (cols[k][i] - mu[k]) / sigma[k];
    return tf.tensor2d(out, [n, cols.length]);
  };
  const yTrain = stack(trainT);
  const yVal = stack(valT);

  const history = await fitWithSchedules(model, xTrain, yTrain, xVal, yVal, cfg);

  const predTensor = model.predict(xTest, { batchSize: cfg.batchSize }) as tf.Tensor;
  const flat = new Float32Array(await predTensor.data());
  const preds = targets.map((_, k) => {
    const col = new Float32Array(testT[0].length);
    for (let i = 0; i < col.length; i++) col[i] = flat[i * targets.length + k] * sigma[k] + mu[k];
    return col;
  });
  const relMse: Record<string, number> = {};
  targets.forEach((t, k) => (relMse[t] = relativeMse(preds[k], testT[k])));
  tf.dispose([xTrain, xVal, xTest, yTrain, yVal, predTensor]);

  return {
    model,
    predictions: preds,
    truth: testT,
    testIds,
    report: {
      task: "regress",
      targets,
      nTrain: trainT[0].length,
      nVal: valT[0].length,
      nTest: testT[0].length,
      epochsRun: history.length,
      degenerate: false,
      relMse,
      history,
    },
  };
}
