/** Synchronization traces: the orbits x_1..x_m against iterate count,
 * drawn as dots (circle coordinates wrap), blue / red / black first. */

import { colorByName, DEFAULT_CYCLE } from "../colormap";
import { column, columnFamily, parseCsv } from "../csv";
import { Canvas, dataRange, Plot } from "../raster";
import { FigureStyle } from "../spec";

export function renderSync(texts: string[], style: FigureStyle): Canvas {
  const table = parseCsv(texts[0]);
  const steps = column(table, "step");
  column(table, "sup_dist"); // required by the schema even though not drawn
  const traces = columnFamily(table, "x_");
  const canvas = new Canvas(style.width ?? 760, style.height ?? 440);
  const plot = new Plot(
    canvas,
    style.x_range ? { lo: style.x_range[0], hi: style.x_range[1] } : dataRange(steps, 0.02),
    { lo: 0.0, hi: 1.0 },
  );
  const names = style.colors ?? DEFAULT_CYCLE;
  traces.forEach((trace, i) => {
    plot.scatter(steps, trace, colorByName(names[i % names.length]), 1);
  });
  plot.frame(style.x_label ?? "n", style.y_label ?? "x",
             style.title ?? "orbits under one noise realization");
  return canvas;
}
