// Relief parameters, slider ranges, and the coalescing sender.

export interface ReliefParams {
  alpha: number;
  beta: number;
  gamma: number;
}

export const DEFAULT_PARAMS: ReliefParams = { alpha: 4.0, beta: 0.01, gamma: 0.02 };

// demonstrated useful ranges; alpha is driven on a log scale
export const ALPHA_MIN = 0.001;
export const ALPHA_MAX = 32;
export const BETA_MAX = 10;
export const GAMMA_MAX = 0.1;

/** Map a [0, 1] slider position to alpha on a log scale. */
export function sliderToAlpha(t: number): number {
  const lo = Math.log(ALPHA_MIN);
  const hi = Math.log(ALPHA_MAX);
  return Math.exp(lo + (hi - lo) * Math.min(1, Math.max(0, t)));
}

export function alphaToSlider(alpha: number): number {
  const lo = Math.log(ALPHA_MIN);
  const hi = Math.log(ALPHA_MAX);
  return Math.min(1, Math.max(0, (Math.log(alpha) - lo) / (hi - lo)));
}

export const SEND_INTERVAL_MS = 33; // at most ~30 set_params messages per second

/**
 * Coalesces rapid parameter changes: the first change in an idle period
 * is sent immediately, later ones are folded into one message per tick
 * (latest value wins).
 */
export class ParamSender {
  private pending: ReliefParams | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(private send: (p: ReliefParams) => void,
              private intervalMs: number = SEND_INTERVAL_MS) {}

  update(params: ReliefParams): void {
    if (this.timer !== null) {
      this.pending = params;
      return;
    }
    this.send(params);
    this.timer = setTimeout(() => this.tick(), this.intervalMs);
  }

  /** Send any queued value now (used on reconnect). */
  flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.pending !== null) {
      const p = this.pending;
      this.pending = null;
      this.send(p);
    }
  }

  private tick(): void {
    this.timer = null;
    if (this.pending !== null) {
      const p = this.pending;
      this.pending = null;
      this.send(p);
      this.timer = setTimeout(() => this.tick(), this.intervalMs);
    }
  }

  dispose(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.pending = null;
  }
}
