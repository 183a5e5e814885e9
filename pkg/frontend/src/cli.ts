#!/usr/bin/env node
// plots <sweep.csv> --y lambda_min [--x n] [--group-by col[,col]] [--overlay scah]
//                   [--outdir figures] [--server http://host:port]
// Renders one deterministic log-log SVG per run into the output directory.

import { render } from "./render.js";

function usage(): never {
  console.error(
    "usage: plots <sweep.csv> --y COLUMN [--x COLUMN] [--group-by COLS] [--overlay ID] [--outdir DIR] [--server URL]",
  );
  process.exit(1);
}

async function main(): Promise<void> {
  const argv = process.argv.slice(2);
  if (argv.length === 0) {
    usage();
  }
  const input = argv[0];
  let y: string | undefined;
  let x: string | undefined;
  let groupBy: string[] | undefined;
  let overlay: string | undefined;
  let outDir: string | undefined;
  let server = process.env.MCIS_SERVER;
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) {
      usage();
    }
    switch (flag) {
      case "--y":
        y = value;
        break;
      case "--x":
        x = value;
        break;
      case "--group-by":
        groupBy = value.split(",").filter((s) => s.length > 0);
        break;
      case "--overlay":
        overlay = value;
        break;
      case "--outdir":
        outDir = value;
        break;
      case "--server":
        server = value;
        break;
      default:
        usage();
    }
  }
  if (!y) {
    usage();
  }
  const res = await render({ input, y, x, groupBy, overlay, outDir, server });
  console.log(`${res.path}: ${res.title}`);
}

main().catch((err) => {
  console.error(`error: ${err.message ?? err}`);
  process.exit(1);
});
