/** Figure specification: what to render, from which checksummed inputs. */

import { readFileSync } from "fs";
import { z } from "zod";

export const FIGURE_KINDS = ["tongues", "staircase", "pdfs", "sync", "pitchfork"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

const rangeSchema = z.tuple([z.number(), z.number()]);

export const figureSpecSchema = z
  .object({
    kind: z.enum(FIGURE_KINDS),
    inputs: z.array(z.string()).min(1),
    style: z
      .object({
        title: z.string().optional(),
        x_label: z.string().optional(),
        y_label: z.string().optional(),
        x_range: rangeSchema.optional(),
        y_range: rangeSchema.optional(),
        colors: z.array(z.string()).optional(),
        width: z.number().int().min(64).optional(),
        height: z.number().int().min(64).optional(),
      })
      .strict()
      .default({}),
    out: z.string(),
  })
  .strict();

export type FigureSpec = z.infer<typeof figureSpecSchema>;
export type FigureStyle = FigureSpec["style"];

export function loadSpec(file: string): FigureSpec {
  const parsed = figureSpecSchema.safeParse(JSON.parse(readFileSync(file, "utf8")));
  if (!parsed.success) {
    throw new Error(`invalid figure spec ${file}: ${parsed.error.message}`);
  }
  return parsed.data;
}
