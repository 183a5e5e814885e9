import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { column, parseCsv } from "./csv.js";
import { Fit, fitScaling, fitViaService } from "./fit.js";
import { getOverlay } from "./overlay.js";
import { Curve, Figure, Series, renderSvg } from "./svg.js";

export interface FigureSpec {
  input: string; // sweep CSV path
  y: string;
  x?: string; // default "n"
  groupBy?: string[];
  overlay?: string;
  outDir?: string; // default "figures"
  server?: string; // mcis service base URL; local OLS otherwise
}

export interface RenderResult {
  path: string;
  fit: Fit;
  overlaySlope?: number;
  title: string;
}

function groupKey(row: string[], idxs: number[]): string {
  return idxs.map((i) => row[i]).join("/");
}

/** Render one log-log scaling figure; returns the written path and the fit.
 * The fitted slope covers all selected points; the overlay is scaled to the
 * first data point so only trends compare. */
export async function render(spec: FigureSpec): Promise<RenderResult> {
  const xCol = spec.x ?? "n";
  const table = parseCsv(readFileSync(spec.input, "utf-8"));
  if (table.header.length === 0 || table.rows.length === 0) {
    throw new Error(`empty CSV: ${spec.input}`);
  }
  const xi = column(table, xCol);
  const yi = column(table, spec.y);
  const gi = (spec.groupBy ?? []).map((name) => column(table, name));

  const seriesMap = new Map<string, Array<[number, number]>>();
  const allPoints: Array<[number, number]> = [];
  for (const row of table.rows) {
    const x = Number(row[xi]);
    const y = Number(row[yi]);
    if (!(x > 0) || !(y > 0)) {
      continue; // log axes: nonpositive or non-numeric rows are not drawable
    }
    const key = gi.length ? groupKey(row, gi) : spec.y;
    if (!seriesMap.has(key)) {
      seriesMap.set(key, []);
    }
    seriesMap.get(key)!.push([x, y]);
    allPoints.push([x, y]);
  }
  if (allPoints.length === 0) {
    throw new Error(`empty selection: no positive (${xCol}, ${spec.y}) rows in ${spec.input}`);
  }

  const fit = spec.server ? await fitViaService(spec.server, allPoints) : fitScaling(allPoints);

  const xsSorted = [...new Set(allPoints.map(([x]) => x))].sort((a, b) => a - b);
  const curves: Curve[] = [];
  const fitCurve: Curve = {
    label: `fit slope ${fit.slope.toFixed(4)}`,
    points: xsSorted.map((x) => [x, Math.exp(fit.intercept + fit.slope * Math.log(x))]),
    dashed: false,
  };
  curves.push(fitCurve);

  let overlaySlope: number | undefined;
  let titleOverlay = "";
  if (spec.overlay) {
    const ov = getOverlay(spec.overlay);
    const [x0, y0] = allPoints[0];
    const scale = y0 / ov.value(x0);
    const pts: Array<[number, number]> = xsSorted.map((x) => [x, scale * ov.value(x)]);
    const first = pts[0];
    const last = pts[pts.length - 1];
    overlaySlope =
      (Math.log(last[1]) - Math.log(first[1])) / (Math.log(last[0]) - Math.log(first[0]));
    curves.push({ label: `${ov.label} (slope ${overlaySlope.toFixed(4)})`, points: pts, dashed: true });
    titleOverlay = `, overlay slope ${overlaySlope.toFixed(4)}`;
  }

  const series: Series[] = [...seriesMap.entries()].map(([label, points]) => ({ label, points }));
  const title = `${spec.y} vs ${xCol} (fitted slope ${fit.slope.toFixed(4)}${titleOverlay})`;
  const svg = renderSvg({ title, xLabel: xCol, yLabel: spec.y, series, curves });

  const outDir = spec.outDir ?? "figures";
  mkdirSync(outDir, { recursive: true });
  const path = join(outDir, `${spec.y}_vs_${xCol}.svg`);
  writeFileSync(path, svg, "utf-8");
  return { path, fit, overlaySlope, title };
}
