#!/usr/bin/env node
import { parseArgs } from "node:util";

import { FIGURE_KINDS } from "./figures.js";
import { render } from "./render.js";

const USAGE =
  "usage: fdmafl-plots render --csv <path> --kind <name> --out <path>\n" +
  `kinds: ${FIGURE_KINDS.join(", ")}\n`;

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        csv: { type: "string" },
        kind: { type: "string" },
        out: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    });
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}`);
    return 1;
  }
  if (parsed.values.help) {
    process.stdout.write(USAGE);
    return 0;
  }
  const [command] = parsed.positionals;
  if (command !== "render") {
    process.stderr.write(`error: unknown command '${command ?? ""}'\n${USAGE}`);
    return 1;
  }
  const { csv, kind, out } = parsed.values;
  if (!csv || !kind || !out) {
    process.stderr.write(`error: --csv, --kind, and --out are required\n${USAGE}`);
    return 1;
  }
  try {
    render({ csvPath: csv, kind, outPath: out });
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
