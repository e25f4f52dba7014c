/** Evaluation metrics for the surrogate tasks. */

export interface ClassificationMetrics {
  overall: number;
  class0: number;
  class1: number;
  n0: number;
  n1: number;
  n: number;
}

export function classificationMetrics(
  probs: Float32Array | number[],
  truth: Float32Array | number[],
  threshold = 0.5
): ClassificationMetrics {
  const n = truth.length;
  if (probs.length !== n) throw new Error(`${probs.length} predictions vs ${n} labels`);
  if (n === 0) throw new Error("empty evaluation set");
  let ok = 0;
  let ok0 = 0;
  let ok1 = 0;
  let n0 = 0;
  let n1 = 0;
  for (let i = 0; i < n; i++) {
    const pred = probs[i] >= threshold ? 1 : 0;
    const t = truth[i] >= 0.5 ? 1 : 0;
    if (t === 0) {
      n0++;
      if (pred === 0) ok0++;
    } else {
      n1++;
      if (pred === 1) ok1++;
    }
    if (pred === t) ok++;
  }
  return {
    overall: ok / n,
    class0: n0 > 0 ? ok0 / n0 : NaN,
    class1: n1 > 0 ? ok1 / n1 : NaN,
    n0,
    n1,
    n,
  };
}

/**
 * MSE normalized by the MSE of the constant mean predictor (the variance),
 * i.e. 1 - R^2. A constant target column with a constant predictor scores 0.
 */
export function relativeMse(pred: Float32Array | number[], truth: Float32Array | number[]): number {
  const n = truth.length;
  if (pred.length !== n) throw new Error(`${pred.length} predictions vs ${n} targets`);
  if (n === 0) throw new Error("empty evaluation set");
  let mean = 0;
  for (let i = 0; i < n; i++) mean += truth[i];
  mean /= n;
  let mse = 0;
  let variance = 0;
  for (let i = 0; i < n; i++) {
    mse += (pred[i] - truth[i]) ** 2;
    variance += (truth[i] - mean) ** 2;
  }
  mse /= n;
  variance /= n;
  if (variance === 0) {
    return mse === 0 ? 0 : Number.POSITIVE_INFINITY;
  }
  return mse / variance;
}

export function mean(xs: number[]): number {
  return xs.reduce((a, b) => a + b, 0) / xs.length;
}
