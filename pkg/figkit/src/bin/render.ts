#!/usr/bin/env node
// Generic entry point: the figure kind comes from the spec file.
import { runCli } from "../runner";

process.exit(runCli(process.argv.slice(2)));
