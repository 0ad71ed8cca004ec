/**
 * Render pipeline: verify every input against its manifest, parse, draw,
 * write the PNG atomically next to a sidecar echoing the spec and the
 * verified input checksums.  Rendering never re-derives numbers.
 */

import { readFileSync, renameSync, writeFileSync } from "fs";
import * as path from "path";

import { Canvas } from "./raster";
import { FigureKind, FigureSpec, loadSpec } from "./spec";
import { verifyInput } from "./manifest";
import { renderTongues } from "./figures/tongues";
import { renderStaircase } from "./figures/staircase";
import { renderPdfs } from "./figures/pdfs";
import { renderSync } from "./figures/sync";
import { renderPitchfork } from "./figures/pitchfork";

const RENDERERS: Record<FigureKind, (texts: string[], style: FigureSpec["style"]) => Canvas> = {
  tongues: renderTongues,
  staircase: renderStaircase,
  pdfs: renderPdfs,
  sync: renderSync,
  pitchfork: renderPitchfork,
};

function writeAtomic(file: string, data: Buffer | string): void {
  const tmp = path.join(path.dirname(file), `.${path.basename(file)}.tmp`);
  writeFileSync(tmp, data);
  renameSync(tmp, file);
}

export function renderSpec(spec: FigureSpec): string {
  const checksums = spec.inputs.map(verifyInput);
  const texts = spec.inputs.map((f) => readFileSync(f, "utf8"));
  const canvas = RENDERERS[spec.kind](texts, spec.style);
  writeAtomic(spec.out, canvas.png());
  const sidecar = { spec, inputs: checksums };
  writeAtomic(spec.out + ".json", JSON.stringify(sidecar, null, 2) + "\n");
  return spec.out;
}

export function runCli(argv: string[], expectKind?: FigureKind): number {
  const idx = argv.indexOf("--spec");
  if (idx < 0 || idx + 1 >= argv.length) {
    process.stderr.write("usage: render [--spec] FILE\n");
    return 2;
  }
  try {
    const spec = loadSpec(argv[idx + 1]);
    if (expectKind && spec.kind !== expectKind) {
      throw new Error(`this script renders '${expectKind}', spec says '${spec.kind}'`);
    }
    const out = renderSpec(spec);
    process.stdout.write(out + "\n");
    return 0;
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    return 1;
  }
}
