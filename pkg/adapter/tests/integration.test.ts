/**
 * Acceptance: the ranking engine paired with these adapters, driven purely
 * through the engine's public CLI and the wire protocol.
 */

import { execFile } from "node:child_process";
import { promisify } from "node:util";
import { fileURLToPath } from "node:url";
import fs from "node:fs";
import os from "node:os";
import path from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

const run = promisify(execFile);

const here = path.dirname(fileURLToPath(import.meta.url));
const ECHO = path.join(here, "..", "dist", "echo.js");
const SHORT = path.join(here, "fixtures", "short_scores.js");
const PYTHON = process.env.STOPGEN_PYTHON ?? "python3";

let workDir: string;
let corpusPath: string;

beforeAll(() => {
  workDir = fs.mkdtempSync(path.join(os.tmpdir(), "stopgen-adapter-"));
  // 1000 single-token documents -> a vocabulary of exactly 1000 tokens
  const lines = ["sentence\tlabel"];
  for (let i = 0; i < 1000; i += 1) {
    lines.push(`w${String(i).padStart(4, "0")}\t${i % 2}`);
  }
  corpusPath = path.join(workDir, "corpus.tsv");
  fs.writeFileSync(corpusPath, `${lines.join("\n")}\n`);
});

afterAll(() => {
  fs.rmSync(workDir, { recursive: true, force: true });
});

describe("engine + echo adapter", () => {
  it("completes a 1000-token iterative ranking with every delta exactly 0", async () => {
    const outPath = path.join(workDir, "ranking.csv");
    await run(PYTHON, [
      "-m", "stopgen", "rank", corpusPath,
      "--scorer", "external",
      "--scorer-cmd", `node ${ECHO}`,
      "--pool-size", "2",
      "--workers", "2",
      "-o", outPath,
    ]);

    const rows = fs.readFileSync(outPath, "utf-8").trim().split("\n");
    expect(rows[0]).toBe("rank,token,delta_auc,importance");
    expect(rows).toHaveLength(1 + 1000);
    for (const row of rows.slice(1)) {
      const [, , delta, importance] = row.split(",");
      expect(delta).toBe("0.0");
      expect(importance).toBe("0.0");
    }

    const meta = JSON.parse(
      fs.readFileSync(`${outPath}.meta.json`, "utf-8"),
    );
    expect(meta.baseline_auc).toBe(0.5);
    expect(meta.scorer).toBe("external:echo");
  }, 120000);
});

const SERVE = path.join(here, "..", "dist", "serve.js");
const SST2_TEST = path.join(
  process.env.STOPGEN_SST2_DIR ?? path.join(here, "..", "..", "data", "sst2"),
  "test.tsv",
);
const REAL_MODEL = process.env.STOPGEN_REAL_MODEL === "1" && fs.existsSync(SST2_TEST);

describe.runIf(REAL_MODEL)("engine + real transformer adapter", () => {
  it("ranks 50 tokens over a 200-document SST2-test sample cleanly", async () => {
    // keep only a 50-token vocabulary so the run stays CPU-sized
    const rows = fs
      .readFileSync(SST2_TEST, "utf-8")
      .trim()
      .split("\n")
      .slice(1, 201);
    const vocabulary = new Set<string>();
    const sample = ["sentence\tlabel"];
    for (const row of rows) {
      const cut = row.lastIndexOf("\t");
      const tokens = row
        .slice(0, cut)
        .toLowerCase()
        .replace(/[!-/:-@[-`{-~]/g, "")
        .split(/\s+/)
        .filter(Boolean)
        .filter((t) => vocabulary.size < 50 ? (vocabulary.add(t), true) : vocabulary.has(t));
      sample.push(`${tokens.join(" ")}\t${row.slice(cut + 1)}`);
    }
    const samplePath = path.join(workDir, "sst2-sample.tsv");
    fs.writeFileSync(samplePath, `${sample.join("\n")}\n`);

    const outPath = path.join(workDir, "sst2-sample-ranking.csv");
    await run(PYTHON, [
      "-m", "stopgen", "rank", samplePath,
      "--scorer", "external",
      "--scorer-cmd", `node ${SERVE}`,
      "-o", outPath,
    ]);
    const written = fs.readFileSync(outPath, "utf-8").trim().split("\n");
    expect(written.length).toBeGreaterThan(1);
    expect(written.length).toBeLessThanOrEqual(1 + 50);
  }, 1_800_000);
});

describe("engine + malformed adapter", () => {
  it("exits with code 3 and reports the offending request id", async () => {
    let code = 0;
    let stderr = "";
    try {
      await run(PYTHON, [
        "-m", "stopgen", "rank", corpusPath,
        "--scorer", "external",
        "--scorer-cmd", `node ${SHORT}`,
        "-o", path.join(workDir, "never-written.csv"),
      ]);
    } catch (err: any) {
      code = err.code;
      stderr = String(err.stderr);
    }
    expect(code).toBe(3);
    expect(stderr).toContain("scorer error");
    expect(stderr).toContain("request 0");
    expect(fs.existsSync(path.join(workDir, "never-written.csv"))).toBe(false);
  }, 60000);
});
