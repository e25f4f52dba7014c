/**
 * Validation-loss driven schedules: early stopping and learning-rate
 * reduction, tracked outside the model so the training loop stays a plain
 * epoch-by-epoch fit.
 */

export class EarlyStopping {
  private best = Number.POSITIVE_INFINITY;
  private wait = 0;
  bestEpoch = -1;

  constructor(private patience: number, private minDelta = 0) {
    if (patience <= 0) throw new Error("patience must be positive");
  }

  /** Returns true when training should stop. */
  update(valLoss: number, epoch: number): boolean {
    if (valLoss < this.best - this.minDelta) {
      this.best = valLoss;
      this.bestEpoch = epoch;
      this.wait = 0;
      return false;
    }
    this.wait++;
    return this.wait >= this.patience;
  }
}

export class ReduceLrOnPlateau {
  private best = Number.POSITIVE_INFINITY;
  private wait = 0;
  current: number;

  constructor(
    initialLr: number,
    private patience: number,
    private factor = 0.2,
    private minLr = 1e-5
  ) {
    if (patience <= 0) throw new Error("patience must be positive");
    this.current = initialLr;
  }

  /** Returns the new learning rate, or null if unchanged. */
  update(valLoss: number): number | null {
    if (valLoss < this.best) {
      this.best = valLoss;
      this.wait = 0;
      return null;
    }
    this.wait++;
    if (this.wait < this.patience) return null;
    this.wait = 0;
    const next = Math.max(this.current * this.factor, this.minLr);
    if (next === this.current) return null;
    this.current = next;
    return next;
  }
}
