/** Rotation number vs tau cross-sections, one trace per input CSV. */

import { colorByName, DEFAULT_CYCLE } from "../colormap";
import { column, parseCsv } from "../csv";
import { Canvas, dataRange, Plot } from "../raster";
import { FigureStyle } from "../spec";

export function renderStaircase(texts: string[], style: FigureStyle): Canvas {
  const tables = texts.map(parseCsv);
  const xs = tables.map((t) => column(t, "tau"));
  const ys = tables.map((t) => column(t, "rho"));
  const canvas = new Canvas(style.width ?? 720, style.height ?? 480);
  const allX = ([] as number[]).concat(...xs);
  const allY = ([] as number[]).concat(...ys);
  const plot = new Plot(
    canvas,
    style.x_range ? { lo: style.x_range[0], hi: style.x_range[1] } : dataRange(allX, 0.02),
    style.y_range ? { lo: style.y_range[0], hi: style.y_range[1] } : dataRange(allY, 0.02),
  );
  const names = style.colors ?? DEFAULT_CYCLE;
  tables.forEach((_, i) => {
    plot.polyline(xs[i], ys[i], colorByName(names[i % names.length]));
  });
  plot.frame(style.x_label ?? "tau", style.y_label ?? "rho",
             style.title ?? "rotation-number staircase");
  return canvas;
}
