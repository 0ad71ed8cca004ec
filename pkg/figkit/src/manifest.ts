/**
 * Stale-data guard: every input must appear in a manifest.json in its own
 * directory and hash to the recorded sha256, otherwise rendering refuses.
 */

import { createHash } from "crypto";
import { readFileSync } from "fs";
import * as path from "path";

export class ChecksumError extends Error {}

interface ManifestEntry {
  path: string;
  sha256: string;
}

export function sha256File(file: string): string {
  return createHash("sha256").update(readFileSync(file)).digest("hex");
}

export function verifyInput(file: string): { path: string; sha256: string } {
  const dir = path.dirname(path.resolve(file));
  const manifestPath = path.join(dir, "manifest.json");
  let manifest: { outputs?: ManifestEntry[] };
  try {
    manifest = JSON.parse(readFileSync(manifestPath, "utf8"));
  } catch {
    throw new ChecksumError(`no readable manifest.json next to ${file}`);
  }
  const rel = path.basename(file);
  const entry = (manifest.outputs ?? []).find((o) => o.path === rel);
  if (!entry) {
    throw new ChecksumError(`${rel} is not listed in ${manifestPath}`);
  }
  const actual = sha256File(file);
  if (actual !== entry.sha256) {
    throw new ChecksumError(
      `checksum mismatch for ${file}: manifest ${entry.sha256}, actual ${actual}`,
    );
  }
  return { path: path.resolve(file), sha256: actual };
}
