/** Software canvas: pixels, lines, rectangles, bitmap text, plot axes. */

import { GLYPH_H, GLYPH_W, glyph } from "./font";
import { RGB } from "./colormap";
import { encodePng } from "./png";

export class Canvas {
  readonly width: number;
  readonly height: number;
  private readonly px: Uint8Array;

  constructor(width: number, height: number, background: RGB = [255, 255, 255]) {
    this.width = width;
    this.height = height;
    this.px = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.px[4 * i] = background[0];
      this.px[4 * i + 1] = background[1];
      this.px[4 * i + 2] = background[2];
      this.px[4 * i + 3] = 255;
    }
  }

  set(x: number, y: number, c: RGB): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = 4 * (y * this.width + x);
    this.px[i] = c[0];
    this.px[i + 1] = c[1];
    this.px[i + 2] = c[2];
    this.px[i + 3] = 255;
  }

  fillRect(x0: number, y0: number, w: number, h: number, c: RGB): void {
    for (let y = y0; y < y0 + h; y++) {
      for (let x = x0; x < x0 + w; x++) {
        this.set(x, y, c);
      }
    }
  }

  /** Bresenham segment between pixel coordinates. */
  line(x0: number, y0: number, x1: number, y1: number, c: RGB): void {
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(xa, ya, c);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  dot(x: number, y: number, c: RGB, r = 1): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    for (let dy = -r + 1; dy < r; dy++) {
      for (let dx = -r + 1; dx < r; dx++) {
        this.set(xi + dx, yi + dy, c);
      }
    }
  }

  text(x: number, y: number, s: string, c: RGB, scale = 1): void {
    let cx = Math.round(x);
    const cy = Math.round(y);
    for (const ch of s) {
      const rows = glyph(ch);
      for (let gy = 0; gy < GLYPH_H; gy++) {
        for (let gx = 0; gx < GLYPH_W; gx++) {
          if (rows[gy][gx] === "#") {
            this.fillRect(cx + gx * scale, cy + gy * scale, scale, scale, c);
          }
        }
      }
      cx += (GLYPH_W + 1) * scale;
    }
  }

  png(): Buffer {
    return encodePng(this.width, this.height, this.px);
  }

  pixel(x: number, y: number): RGB {
    const i = 4 * (y * this.width + x);
    return [this.px[i], this.px[i + 1], this.px[i + 2]];
  }
}

export interface AxisRange {
  lo: number;
  hi: number;
}

/** Round tick positions covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, target = 5): number[] {
  if (!(hi > lo)) return [lo];
  const raw = (hi - lo) / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => (hi - lo) / s <= target + 1) ?? candidates[3];
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = first; t <= hi + 1e-12 * Math.abs(step); t += step) {
    ticks.push(Math.abs(t) < 1e-12 ? 0 : t);
  }
  return ticks;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return parseFloat(v.toPrecision(4)).toString();
  }
  return v.toExponential(1).replace("e-", "e-").replace("e+", "e+");
}

const AXIS: RGB = [90, 90, 90];
const TEXT: RGB = [40, 40, 40];

/** A margin-framed plot area with linear data-to-pixel transforms. */
export class Plot {
  readonly canvas: Canvas;
  readonly left: number;
  readonly top: number;
  readonly plotW: number;
  readonly plotH: number;
  readonly x: AxisRange;
  readonly y: AxisRange;

  constructor(
    canvas: Canvas,
    x: AxisRange,
    y: AxisRange,
    margins = { left: 56, right: 16, top: 28, bottom: 40 },
  ) {
    this.canvas = canvas;
    this.left = margins.left;
    this.top = margins.top;
    this.plotW = canvas.width - margins.left - margins.right;
    this.plotH = canvas.height - margins.top - margins.bottom;
    this.x = x;
    this.y = y;
  }

  px(v: number): number {
    return this.left + ((v - this.x.lo) / (this.x.hi - this.x.lo)) * this.plotW;
  }

  py(v: number): number {
    return this.top + (1 - (v - this.y.lo) / (this.y.hi - this.y.lo)) * this.plotH;
  }

  frame(xLabel: string, yLabel: string, title?: string): void {
    const c = this.canvas;
    const b = this.top + this.plotH;
    const r = this.left + this.plotW;
    c.line(this.left, this.top, this.left, b, AXIS);
    c.line(this.left, b, r, b, AXIS);
    c.line(r, this.top, r, b, AXIS);
    c.line(this.left, this.top, r, this.top, AXIS);
    for (const t of niceTicks(this.x.lo, this.x.hi)) {
      const xp = Math.round(this.px(t));
      c.line(xp, b, xp, b + 4, AXIS);
      const label = formatTick(t);
      c.text(xp - 3 * label.length, b + 8, label, TEXT);
    }
    for (const t of niceTicks(this.y.lo, this.y.hi)) {
      const yp = Math.round(this.py(t));
      c.line(this.left - 4, yp, this.left, yp, AXIS);
      const label = formatTick(t);
      c.text(this.left - 6 - 6 * label.length, yp - 3, label, TEXT);
    }
    c.text(this.left + this.plotW / 2 - 3 * xLabel.length, b + 24, xLabel, TEXT);
    c.text(4, this.top - 16, yLabel, TEXT);
    if (title) {
      c.text(this.left, 8, title, TEXT);
    }
  }

  polyline(xs: ArrayLike<number>, ys: ArrayLike<number>, color: RGB): void {
    for (let i = 1; i < xs.length; i++) {
      this.canvas.line(
        this.px(xs[i - 1]), this.py(ys[i - 1]), this.px(xs[i]), this.py(ys[i]), color,
      );
    }
  }

  scatter(xs: ArrayLike<number>, ys: ArrayLike<number>, color: RGB, r = 1): void {
    for (let i = 0; i < xs.length; i++) {
      this.canvas.dot(this.px(xs[i]), this.py(ys[i]), color, r);
    }
  }
}

export function dataRange(values: ArrayLike<number>, pad = 0.05): AxisRange {
  let lo = Infinity;
  let hi = -Infinity;
  for (let i = 0; i < values.length; i++) {
    const v = values[i];
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("no finite values to plot");
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return { lo: lo - pad * span, hi: hi + pad * span };
}
