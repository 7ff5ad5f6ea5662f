/**
 * Wire protocol shared by every adapter: one JSON object per line, UTF-8,
 * over stdin/stdout.
 *
 * 1. on startup the adapter emits {"type":"ready","protocol":1,"name":...};
 * 2. the engine sends {"id":<int>,"texts":[...]};
 * 3. the adapter answers {"id":<same>,"scores":[...]} with one
 *    positive-class probability per text, or {"id":<same>,"error":"..."};
 * 4. the engine closes stdin and the adapter exits 0.
 *
 * stdout carries protocol lines only; diagnostics belong on stderr.
 */

import readline from "node:readline";

export const PROTOCOL_VERSION = 1;

export interface ScoreRequest {
  id: number;
  texts: string[];
}

export type BatchScorer = (texts: string[]) => Promise<number[]>;

export function writeLine(payload: unknown): void {
  process.stdout.write(`${JSON.stringify(payload)}\n`);
}

export function announceReady(name: string): void {
  writeLine({ type: "ready", protocol: PROTOCOL_VERSION, name });
}

export async function* readRequests(
  input: NodeJS.ReadableStream,
): AsyncIterable<ScoreRequest> {
  const lines = readline.createInterface({
    input,
    crlfDelay: Number.POSITIVE_INFINITY,
  });
  for await (const line of lines) {
    const trimmed = line.trim();
    if (!trimmed) {
      continue;
    }
    const parsed = JSON.parse(trimmed) as ScoreRequest;
    if (typeof parsed.id !== "number" || !Array.isArray(parsed.texts)) {
      throw new Error(`malformed request line: ${trimmed.slice(0, 200)}`);
    }
    yield parsed;
  }
}

/**
 * Run the request loop until stdin closes.  A scorer failure becomes an
 * error response for that request id; the process stays alive.
 */
export async function serveLoop(name: string, scoreBatch: BatchScorer): Promise<void> {
  announceReady(name);
  for await (const request of readRequests(process.stdin)) {
    try {
      const scores = await scoreBatch(request.texts);
      if (scores.length !== request.texts.length) {
        throw new Error(
          `scorer produced ${scores.length} scores for ${request.texts.length} texts`,
        );
      }
      writeLine({ id: request.id, scores });
    } catch (err) {
      writeLine({ id: request.id, error: String(err) });
    }
  }
  console.error(`${name} adapter: stdin closed, exiting`);
}
