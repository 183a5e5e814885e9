export interface Overlay {
  id: string;
  label: string;
  value: (n: number) => number;
}

/** Reference bound shapes drawn next to measured data (scaled to the first
 * data point, so only the trend matters). */
export const OVERLAYS: Record<string, Overlay> = {
  scah: {
    id: "scah",
    label: "W/sqrt(n ln n)",
    value: (n) => 1 / Math.sqrt(n * Math.log(n)),
  },
  infra: {
    id: "infra",
    label: "const (BS-limited)",
    value: () => 1,
  },
};

export function getOverlay(id: string): Overlay {
  const ov = OVERLAYS[id];
  if (!ov) {
    throw new Error(`unknown overlay ${JSON.stringify(id)}; known: ${Object.keys(OVERLAYS).join(", ")}`);
  }
  return ov;
}
