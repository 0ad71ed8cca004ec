/** Named trace colors and a perceptual colormap for scalar fields. */

export type RGB = [number, number, number];

export const NAMED_COLORS: Record<string, RGB> = {
  black: [20, 20, 20],
  red: [200, 40, 40],
  blue: [40, 90, 200],
  green: [40, 150, 70],
  orange: [230, 140, 30],
  purple: [130, 60, 160],
  gray: [130, 130, 130],
  white: [255, 255, 255],
};

export function colorByName(name: string): RGB {
  const c = NAMED_COLORS[name];
  if (!c) {
    throw new Error(`unknown color name: ${name}`);
  }
  return c;
}

export const DEFAULT_CYCLE = ["blue", "red", "black", "green", "orange", "purple"];

// compact viridis-like ramp, linearly interpolated
const RAMP: RGB[] = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

/** Map t in [0,1] onto the ramp (clamped). */
export function viridis(t: number): RGB {
  const x = Math.min(1, Math.max(0, t)) * (RAMP.length - 1);
  const i = Math.min(RAMP.length - 2, Math.floor(x));
  const f = x - i;
  const a = RAMP[i];
  const b = RAMP[i + 1];
  return [
    Math.round(a[0] + f * (b[0] - a[0])),
    Math.round(a[1] + f * (b[1] - a[1])),
    Math.round(a[2] + f * (b[2] - a[2])),
  ];
}
