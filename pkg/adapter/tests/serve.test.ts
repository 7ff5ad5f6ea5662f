import { spawn } from "node:child_process";
import { once } from "node:events";
import { fileURLToPath } from "node:url";
import path from "node:path";

import { describe, expect, it } from "vitest";

import { startAdapter } from "./helpers.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const SERVE = path.join(here, "..", "dist", "serve.js");

async function modelStackAvailable(): Promise<boolean> {
  try {
    await import("@xenova/transformers");
    return true;
  } catch {
    return false;
  }
}

const REAL_MODEL = process.env.STOPGEN_REAL_MODEL === "1";

describe("transformer adapter startup", () => {
  it("rejects a bad batch size before doing any work", async () => {
    const proc = spawn("node", [SERVE, "--batch-size", "0"], {
      stdio: ["pipe", "pipe", "pipe"],
    });
    let sawStdout = false;
    proc.stdout.on("data", () => {
      sawStdout = true;
    });
    const [code] = (await once(proc, "exit")) as [number | null];
    expect(code).not.toBe(0);
    expect(sawStdout).toBe(false);
  });

  it("exits nonzero before ready when the model cannot be loaded", async () => {
    if (await modelStackAvailable()) {
      // with the stack installed, point at a checkpoint that cannot exist
      const proc = spawn(
        "node",
        [SERVE, "--model", "definitely/not-a-real-checkpoint-xyz"],
        { stdio: ["pipe", "pipe", "pipe"] },
      );
      let sawStdout = false;
      proc.stdout.on("data", () => {
        sawStdout = true;
      });
      let stderr = "";
      proc.stderr.on("data", (chunk) => {
        stderr += String(chunk);
      });
      const [code] = (await once(proc, "exit")) as [number | null];
      expect(code).not.toBe(0);
      expect(sawStdout).toBe(false);
      expect(stderr).toContain("failed to load model");
    } else {
      const proc = spawn("node", [SERVE], { stdio: ["pipe", "pipe", "pipe"] });
      let sawStdout = false;
      proc.stdout.on("data", () => {
        sawStdout = true;
      });
      let stderr = "";
      proc.stderr.on("data", (chunk) => {
        stderr += String(chunk);
      });
      const [code] = (await once(proc, "exit")) as [number | null];
      expect(code).not.toBe(0);
      expect(sawStdout).toBe(false);
      expect(stderr).toContain("failed to load model");
    }
  }, 120000);
});

describe.runIf(REAL_MODEL)("directional fidelity (real checkpoint)", () => {
  it("scores a great movie above a terrible one, deterministically", async () => {
    const { client, ready } = await startAdapter("node", [SERVE]);
    expect(ready.type).toBe("ready");
    const first = await client.request(0, ["a great movie", "a terrible movie"]);
    expect(first.scores[0]).toBeGreaterThan(first.scores[1]);
    expect(first.scores.every((s: number) => s >= 0 && s <= 1)).toBe(true);
    const again = await client.request(1, ["a great movie", "a terrible movie"]);
    expect(Math.abs(again.scores[0] - first.scores[0])).toBeLessThanOrEqual(1e-6);
    expect(Math.abs(again.scores[1] - first.scores[1])).toBeLessThanOrEqual(1e-6);
    const empty = await client.request(2, [""]);
    expect(empty.scores).toHaveLength(1);
    expect(await client.close()).toBe(0);
  }, 300000);
});
