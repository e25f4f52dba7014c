/** LeNet-5 model builders and file round-trip helpers. */
import * as tf from "@tensorflow/tfjs";
import * as fs from "fs";
import * as path from "path";

export type Task = "classify" | "regress";

/**
 * LeNet-5: two 5x5 conv + pool blocks, then 120/84 dense layers. Pooling
 * is max rather than average so thin low-contrast structures survive the
 * downsampling. The head is a sigmoid unit for binary classification or a
 * linear layer with one unit per regression target.
 */
export function buildLeNet5(
  rows: number,
  cols: number,
  channels: number,
  task: Task,
  outputs = 1,
  learningRate = 1e-3
): tf.LayersModel {
  const model = tf.sequential();
  model.add(
    tf.layers.conv2d({
      inputShape: [rows, cols, channels],
      filters: 6,
      kernelSize: 5,
      padding: "same",
      activation: "relu",
    })
  );
  model.add(tf.layers.maxPooling2d({ poolSize: 2 }));
  model.add(tf.layers.conv2d({ filters: 16, kernelSize: 5, activation: "relu" }));
  model.add(tf.layers.maxPooling2d({ poolSize: 2 }));
  model.add(tf.layers.flatten());
  model.add(tf.layers.dense({ units: 120, activation: "relu" }));
  model.add(tf.layers.dense({ units: 84, activation: "relu" }));
  if (task === "classify") {
    model.add(tf.layers.dense({ units: 1, activation: "sigmoid" }));
  } else {
    model.add(tf.layers.dense({ units: outputs }));
  }
  compileFor(model, task, learningRate);
  return model;
}

export function compileFor(model: tf.LayersModel, task: Task, learningRate: number): void {
  model.compile({
    optimizer: tf.train.adam(learningRate),
    loss: task === "classify" ? "binaryCrossentropy" : "meanSquaredError",
  });
}

/** Adjust the optimizer's learning rate in place (Adam reads it per step). */
export function setLearningRate(model: tf.LayersModel, lr: number): void {
  (model.optimizer as unknown as { learningRate: number }).learningRate = lr;
}

/** Save as model.json + weights.bin without the tfjs-node file handler. */
export async function saveModel(model: tf.LayersModel, dir: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      const weightData = artifacts.weightData as ArrayBuffer;
      const manifest = {
        modelTopology: artifacts.modelTopology,
        weightsManifest: [{ paths: ["weights.bin"], weights: artifacts.weightSpecs }],
      };
      fs.writeFileSync(path.join(dir, "model.json"), JSON.stringify(manifest));
      fs.writeFileSync(path.join(dir, "weights.bin"), Buffer.from(weightData));
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: "JSON" as const,
        },
      };
    })
  );
}

export async function loadModel(dir: string): Promise<tf.LayersModel> {
  const manifest = JSON.parse(fs.readFileSync(path.join(dir, "model.json"), "utf8"));
  const raw = fs.readFileSync(path.join(dir, "weights.bin"));
  const weightData = raw.buffer.slice(raw.byteOffset, raw.byteOffset + raw.byteLength);
  return tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: manifest.modelTopology,
      weightSpecs: manifest.weightsManifest[0].weights,
      weightData,
    })
  );
}
