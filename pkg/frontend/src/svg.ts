export interface Series {
  label: string;
  points: Array<[number, number]>; // data coordinates (positive)
}

export interface Curve {
  label: string;
  points: Array<[number, number]>;
  dashed: boolean;
}

export interface Figure {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  curves: Curve[];
}

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 80, right: 24, top: 48, bottom: 56 };
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function fmt(v: number): string {
  // fixed-precision output keeps renders byte-stable
  return Number(v.toPrecision(8)).toString();
}

/** Deterministic log-log scatter/line SVG; no timestamps, no randomness. */
export function renderSvg(fig: Figure): string {
  const allPoints = [...fig.series.flatMap((s) => s.points), ...fig.curves.flatMap((c) => c.points)];
  if (allPoints.length === 0) {
    throw new Error("nothing to draw: empty selection");
  }
  const xs = allPoints.map(([x]) => Math.log10(x));
  const ys = allPoints.map(([, y]) => Math.log10(y));
  let x0 = Math.min(...xs);
  let x1 = Math.max(...xs);
  let y0 = Math.min(...ys);
  let y1 = Math.max(...ys);
  if (x1 - x0 < 1e-9) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 < 1e-9) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const px = (x: number) => MARGIN.left + ((Math.log10(x) - x0) / (x1 - x0)) * plotW;
  const py = (y: number) => MARGIN.top + (1 - (Math.log10(y) - y0) / (y1 - y0)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-family="monospace" font-size="14">${fig.title}</text>`,
  );

  // decade grid lines and tick labels
  for (let d = Math.ceil(x0); d <= Math.floor(x1) + 1e-9; d++) {
    const x = MARGIN.left + ((d - x0) / (x1 - x0)) * plotW;
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${fmt(x)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-family="monospace" font-size="11">1e${d}</text>`,
    );
  }
  for (let d = Math.ceil(y0); d <= Math.floor(y1) + 1e-9; d++) {
    const y = MARGIN.top + (1 - (d - y0) / (y1 - y0)) * plotH;
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + plotW}" y2="${fmt(y)}" stroke="#dddddd"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 6}" y="${fmt(y + 4)}" text-anchor="end" font-family="monospace" font-size="11">1e${d}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333333"/>`,
  );
  parts.push(
    `<text x="${WIDTH / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-family="monospace" font-size="12">${fig.xLabel} (log)</text>`,
  );
  parts.push(
    `<text x="18" y="${HEIGHT / 2}" text-anchor="middle" font-family="monospace" font-size="12" transform="rotate(-90 18 ${HEIGHT / 2})">${fig.yLabel} (log)</text>`,
  );

  fig.curves.forEach((curve, ci) => {
    const d = curve.points
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(px(x))} ${fmt(py(y))}`)
      .join(" ");
    const dash = curve.dashed ? ' stroke-dasharray="6 4"' : "";
    parts.push(`<path d="${d}" fill="none" stroke="#555555" stroke-width="1.5"${dash}/>`);
  });

  fig.series.forEach((series, si) => {
    const color = COLORS[si % COLORS.length];
    for (const [x, y] of series.points) {
      parts.push(`<circle cx="${fmt(px(x))}" cy="${fmt(py(y))}" r="4" fill="${color}"/>`);
    }
  });

  // legend: one entry per series, then curves
  const entries = [
    ...fig.series.map((s, i) => ({ label: s.label, color: COLORS[i % COLORS.length], dashed: false })),
    ...fig.curves.map((c) => ({ label: c.label, color: "#555555", dashed: c.dashed })),
  ];
  entries.forEach((entry, i) => {
    const y = MARGIN.top + 16 + 18 * i;
    const x = MARGIN.left + 12;
    if (entry.dashed) {
      parts.push(
        `<line x1="${x}" y1="${y - 4}" x2="${x + 18}" y2="${y - 4}" stroke="${entry.color}" stroke-width="1.5" stroke-dasharray="6 4"/>`,
      );
    } else {
      parts.push(`<circle cx="${x + 9}" cy="${y - 4}" r="4" fill="${entry.color}"/>`);
    }
    parts.push(
      `<text x="${x + 24}" y="${y}" font-family="monospace" font-size="11">${entry.label}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
