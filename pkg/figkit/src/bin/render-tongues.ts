#!/usr/bin/env node
import { runCli } from "../runner";

process.exit(runCli(process.argv.slice(2), "tongues"));
