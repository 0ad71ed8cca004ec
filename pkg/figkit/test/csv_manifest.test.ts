import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import * as path from "path";
import { describe, expect, it } from "vitest";

import { column, columnFamily, parseCsv, SchemaError } from "../src/csv";
import { ChecksumError, sha256File, verifyInput } from "../src/manifest";
import { formatTick, niceTicks } from "../src/raster";
import { colorByName, viridis } from "../src/colormap";
import { figureSpecSchema } from "../src/spec";

describe("csv", () => {
  it("parses columns with empty cells as NaN", () => {
    const t = parseCsv("tau,rho,p,q\n0.1,0.1,,\n0.2,0.5,1,2\n");
    expect(column(t, "tau")).toEqual([0.1, 0.2]);
    expect(Number.isNaN(column(t, "p")[0])).toBe(true);
    expect(column(t, "q")[1]).toBe(2);
  });

  it("names the missing column", () => {
    const t = parseCsv("a,b\n1,2\n");
    expect(() => column(t, "rho")).toThrow(/missing column: rho/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(SchemaError);
  });

  it("collects column families in index order", () => {
    const t = parseCsv("step,x_2,x_1,sup_dist\n0,0.5,0.1,0.4\n");
    const fam = columnFamily(t, "x_");
    expect(fam[0][0]).toBe(0.1);
    expect(fam[1][0]).toBe(0.5);
    expect(() => columnFamily(t, "y_")).toThrow(/missing column family/);
  });
});

function makeArtifact(valid: boolean): string {
  const dir = mkdtempSync(path.join(tmpdir(), "figkit-"));
  const csv = path.join(dir, "data.csv");
  writeFileSync(csv, "a,b\n1,2\n");
  const sha = sha256File(csv);
  writeFileSync(
    path.join(dir, "manifest.json"),
    JSON.stringify({ outputs: [{ path: "data.csv", sha256: valid ? sha : "0".repeat(64) }] }),
  );
  return csv;
}

describe("manifest verification", () => {
  it("accepts matching checksums", () => {
    const csv = makeArtifact(true);
    expect(verifyInput(csv).sha256).toHaveLength(64);
  });

  it("refuses mismatching checksums", () => {
    const csv = makeArtifact(false);
    expect(() => verifyInput(csv)).toThrow(ChecksumError);
  });

  it("refuses unlisted files", () => {
    const csv = makeArtifact(true);
    const other = path.join(path.dirname(csv), "other.csv");
    writeFileSync(other, "a\n1\n");
    expect(() => verifyInput(other)).toThrow(/not listed/);
  });

  it("refuses missing manifests", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "figkit-"));
    const csv = path.join(dir, "x.csv");
    writeFileSync(csv, "a\n1\n");
    expect(() => verifyInput(csv)).toThrow(/manifest/);
  });
});

describe("spec schema", () => {
  it("accepts a minimal spec", () => {
    const r = figureSpecSchema.safeParse({
      kind: "sync", inputs: ["a.csv"], out: "a.png",
    });
    expect(r.success).toBe(true);
  });

  it("rejects unknown kinds and stray keys", () => {
    expect(figureSpecSchema.safeParse({ kind: "pie", inputs: ["a"], out: "o" }).success)
      .toBe(false);
    expect(
      figureSpecSchema.safeParse({ kind: "sync", inputs: ["a"], out: "o", bogus: 1 }).success,
    ).toBe(false);
  });
});

describe("scales and colors", () => {
  it("nice ticks cover the range", () => {
    const t = niceTicks(0, 1);
    expect(t[0]).toBeGreaterThanOrEqual(0);
    expect(t[t.length - 1]).toBeLessThanOrEqual(1);
    expect(t.length).toBeGreaterThanOrEqual(3);
    expect(niceTicks(0.62, 0.82).length).toBeGreaterThanOrEqual(3);
  });

  it("formats ticks compactly", () => {
    expect(formatTick(0)).toBe("0");
    expect(formatTick(0.25)).toBe("0.25");
    expect(formatTick(1e-6)).toMatch(/e-/);
  });

  it("viridis clamps and interpolates", () => {
    expect(viridis(-1)).toEqual(viridis(0));
    expect(viridis(2)).toEqual(viridis(1));
    expect(viridis(0)).not.toEqual(viridis(1));
  });

  it("unknown color names are errors", () => {
    expect(() => colorByName("mauve")).toThrow(/unknown color/);
  });
});
