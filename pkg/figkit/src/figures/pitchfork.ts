/** Signed asymmetry vs wind stress: the two branch tables overlay into the
 * symmetry-breaking diagram. */

import { colorByName } from "../colormap";
import { column, parseCsv } from "../csv";
import { Canvas, dataRange, Plot } from "../raster";
import { FigureStyle } from "../spec";

const BRANCH_COLORS = ["red", "blue"];

export function renderPitchfork(texts: string[], style: FigureStyle): Canvas {
  const tables = texts.map(parseCsv);
  const xs = tables.map((t) => column(t, "tau_w"));
  const ys = tables.map((t) => column(t, "signed_asymmetry"));
  const canvas = new Canvas(style.width ?? 720, style.height ?? 480);
  const allX = ([] as number[]).concat(...xs);
  const allY = ([] as number[]).concat(...ys).concat([0]);
  const plot = new Plot(
    canvas,
    style.x_range ? { lo: style.x_range[0], hi: style.x_range[1] } : dataRange(allX, 0.05),
    style.y_range ? { lo: style.y_range[0], hi: style.y_range[1] } : dataRange(allY, 0.1),
  );
  const zero = plot.py(0);
  canvas.line(plot.px(plot.x.lo), zero, plot.px(plot.x.hi), zero, [200, 200, 200]);
  const names = style.colors ?? BRANCH_COLORS;
  tables.forEach((_, i) => {
    const c = colorByName(names[i % names.length]);
    plot.polyline(xs[i], ys[i], c);
    plot.scatter(xs[i], ys[i], c, 3);
  });
  plot.frame(style.x_label ?? "tau_w", style.y_label ?? "signed asymmetry",
             style.title ?? "symmetry breaking of the double gyre");
  return canvas;
}
