#!/usr/bin/env node
/** CLI: `pmetraj-figures --spec <path>` renders one figure from a JSON spec. */
import { readFileSync } from "node:fs";

import { render, validateSpec } from "./figures.js";

function main(argv: string[]): number {
  const args = argv.slice(2);
  const at = args.indexOf("--spec");
  if (at === -1 || at + 1 >= args.length) {
    console.error("usage: pmetraj-figures --spec <figure-spec.json>");
    return 2;
  }
  let spec;
  try {
    spec = validateSpec(JSON.parse(readFileSync(args[at + 1], "utf-8")));
  } catch (err) {
    console.error(`spec error: ${(err as Error).message}`);
    return 2;
  }
  try {
    render(spec);
    console.log(`wrote ${spec.output}`);
    return 0;
  } catch (err) {
    console.error(`render error: ${(err as Error).message}`);
    return 1;
  }
}

process.exitCode = main(process.argv);
