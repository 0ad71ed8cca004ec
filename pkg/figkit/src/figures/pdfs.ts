/** Stationary-density overlays; the three-noise-level figure keeps the
 * red / blue / black key for rising sigma. */

import { colorByName } from "../colormap";
import { column, parseCsv } from "../csv";
import { Canvas, dataRange, Plot } from "../raster";
import { FigureStyle } from "../spec";

const SIGMA_KEY = ["red", "blue", "black", "green", "orange"];

export function renderPdfs(texts: string[], style: FigureStyle): Canvas {
  const tables = texts.map(parseCsv);
  const xs = tables.map((t) => column(t, "bin_center"));
  const ys = tables.map((t) => column(t, "weight"));
  const canvas = new Canvas(style.width ?? 720, style.height ?? 480);
  const allY = ([] as number[]).concat(...ys);
  const plot = new Plot(
    canvas,
    { lo: 0.0, hi: 1.0 },
    { lo: 0.0, hi: dataRange(allY, 0.05).hi },
  );
  const names = style.colors ?? SIGMA_KEY;
  tables.forEach((_, i) => {
    plot.polyline(xs[i], ys[i], colorByName(names[i % names.length]));
  });
  plot.frame(style.x_label ?? "x", style.y_label ?? "weight",
             style.title ?? "stationary density on the circle");
  return canvas;
}
