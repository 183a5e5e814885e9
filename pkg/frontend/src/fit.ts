export interface Fit {
  slope: number;
  intercept: number;
  r2: number;
}

/** Ordinary least squares on (ln x, ln y); the same fit the harness emits. */
export function fitScaling(points: Array<[number, number]>): Fit {
  if (points.length < 3) {
    throw new Error(`need >= 3 points to fit, got ${points.length}`);
  }
  for (const [x, y] of points) {
    if (!(x > 0) || !(y > 0)) {
      throw new Error("fit needs strictly positive coordinates");
    }
  }
  const lx = points.map(([x]) => Math.log(x));
  const ly = points.map(([, y]) => Math.log(y));
  const n = points.length;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  let ssRes = 0;
  let ssTot = 0;
  for (let i = 0; i < n; i++) {
    const resid = ly[i] - (slope * lx[i] + intercept);
    ssRes += resid * resid;
    ssTot += (ly[i] - my) * (ly[i] - my);
  }
  return { slope, intercept, r2: ssTot === 0 ? 1 : 1 - ssRes / ssTot };
}

/** Ask a running mcis service for the fit instead of computing locally. */
export async function fitViaService(server: string, points: Array<[number, number]>): Promise<Fit> {
  const resp = await fetch(`${server.replace(/\/$/, "")}/fit`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ points }),
  });
  if (!resp.ok) {
    throw new Error(`fit service returned ${resp.status}: ${await resp.text()}`);
  }
  return (await resp.json()) as Fit;
}
