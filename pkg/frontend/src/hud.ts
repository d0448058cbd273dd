// HUD text, error banner, and frame-rate tracking.

import type { ReliefParams } from "./params";

export class FpsCounter {
  private times: number[] = [];

  tick(now: number = performance.now()): void {
    this.times.push(now);
    const cutoff = now - 2000;
    while (this.times.length && this.times[0] < cutoff) this.times.shift();
  }

  fps(now: number = performance.now()): number {
    const cutoff = now - 2000;
    const recent = this.times.filter((t) => t >= cutoff);
    if (recent.length < 2) return 0;
    return (recent.length - 1) / ((recent[recent.length - 1] - recent[0]) / 1000);
  }
}

export function formatHud(params: ReliefParams | null, span: number | null,
                          spanFraction: number | null, fps: number): string {
  const p = params
    ? `alpha ${params.alpha.toPrecision(3)}  beta ${params.beta.toPrecision(3)}  gamma ${params.gamma.toPrecision(2)}`
    : "no params";
  const s = span !== null && spanFraction !== null
    ? `span ${span.toFixed(4)} (${(spanFraction * 100).toFixed(1)}% of diagonal)`
    : "span -";
  return `${p}  |  ${s}  |  ${fps.toFixed(1)} fps`;
}

export class Banner {
  constructor(private el: HTMLElement) {}

  show(message: string): void {
    this.el.textContent = message;
    this.el.style.display = "block";
  }

  hide(): void {
    this.el.style.display = "none";
  }
}
