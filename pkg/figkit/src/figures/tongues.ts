/** Tongue heatmap: rotation number over the (tau, eps) grid, locked cells
 * darkened, non-diffeomorphism cells grayed out. */

import { column, parseCsv, Table } from "../csv";
import { RGB, viridis } from "../colormap";
import { Canvas, Plot } from "../raster";
import { FigureStyle } from "../spec";

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

export function renderTongues(texts: string[], style: FigureStyle): Canvas {
  const table: Table = parseCsv(texts[0]);
  const tau = column(table, "tau");
  const eps = column(table, "eps");
  const rho = column(table, "rho");
  const q = column(table, "q");
  const taus = uniqueSorted(tau);
  const epss = uniqueSorted(eps);
  const ti = new Map(taus.map((v, i) => [v, i]));
  const ei = new Map(epss.map((v, i) => [v, i]));

  const canvas = new Canvas(style.width ?? 720, style.height ?? 480);
  const plot = new Plot(
    canvas,
    { lo: taus[0], hi: taus[taus.length - 1] },
    { lo: epss[0], hi: epss[epss.length - 1] },
  );
  const cellW = Math.max(1, Math.ceil(plot.plotW / taus.length));
  const cellH = Math.max(1, Math.ceil(plot.plotH / epss.length));

  let lo = Infinity;
  let hi = -Infinity;
  for (const r of rho) {
    if (Number.isFinite(r)) {
      lo = Math.min(lo, r);
      hi = Math.max(hi, r);
    }
  }
  const span = hi > lo ? hi - lo : 1;

  for (let k = 0; k < table.rows; k++) {
    const x = Math.round(plot.px(tau[k]) - cellW / 2);
    const y = Math.round(plot.py(eps[k]) - cellH / 2);
    let color: RGB;
    if (!Number.isFinite(rho[k]) || q[k] < 0) {
      color = [160, 160, 160];
    } else {
      color = viridis((rho[k] - lo) / span);
      if (q[k] > 0) {
        color = [
          Math.round(color[0] * 0.45),
          Math.round(color[1] * 0.45),
          Math.round(color[2] * 0.45),
        ];
      }
    }
    canvas.fillRect(x, y, cellW, cellH, color);
  }
  plot.frame(style.x_label ?? "tau", style.y_label ?? "eps",
             style.title ?? "locking tongues (dark = locked)");
  return canvas;
}
