/** Inference timing versus the exported pipeline bench. */
import * as tf from "@tensorflow/tfjs";
import * as fs from "fs";

import { IdxImages } from "./idx";
import { gatherImages } from "./train";

/** Mean wall seconds to predict one batch of `batchSize` test images. */
export async function benchInference(
  model: tf.LayersModel,
  images: IdxImages,
  ids: number[],
  batchSize = 100,
  centerInputs = false
): Promise<number> {
  if (ids.length === 0) throw new Error("empty test set");
  const batches: number[][] = [];
  for (let k = 0; k + batchSize <= ids.length; k += batchSize) {
    batches.push(ids.slice(k, k + batchSize));
  }
  if (batches.length === 0) batches.push(ids.slice());

  // warmup compiles kernels outside the timed region
  {
    const x = gatherImages(images, batches[0], centerInputs);
    const y = model.predict(x) as tf.Tensor;
    await y.data();
    tf.dispose([x, y]);
  }
  const times: number[] = [];
  for (const batch of batches) {
    const x = gatherImages(images, batch, centerInputs);
    const t0 = process.hrtime.bigint();
    const y = model.predict(x) as tf.Tensor;
    await y.data();
    const t1 = process.hrtime.bigint();
    tf.dispose([x, y]);
    times.push(Number(t1 - t0) / 1e9);
  }
  return times.reduce((a, b) => a + b, 0) / times.length;
}

/**
 * Pull the pipeline's batch-of-100 seconds out of a bench.csv written by
 * the batch CLI (row ``batch_of_100,<mean_s>,...``).
 */
export function readPipelineBatch100(path: string): number {
  const text = fs.readFileSync(path, "utf8");
  for (const line of text.split(/\r?\n/)) {
    const cells = line.split(",");
    if (cells[0] === "batch_of_100") {
      const v = Number(cells[1]);
      if (!Number.isFinite(v)) throw new Error(`bad batch_of_100 value in ${path}`);
      return v;
    }
  }
  throw new Error(`no batch_of_100 row in ${path}`);
}
