import { once } from "node:events";
import { spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import readline from "node:readline";

export class AdapterClient {
  readonly proc: ChildProcessWithoutNullStreams;
  private readonly lines: AsyncIterator<string>;

  constructor(command: string, args: string[]) {
    this.proc = spawn(command, args, { stdio: ["pipe", "pipe", "inherit"] });
    const rl = readline.createInterface({
      input: this.proc.stdout,
      crlfDelay: Number.POSITIVE_INFINITY,
    });
    this.lines = rl[Symbol.asyncIterator]();
  }

  async readLine(): Promise<string | null> {
    const next = await this.lines.next();
    return next.done ? null : next.value;
  }

  async readMessage(): Promise<any> {
    const line = await this.readLine();
    if (line === null) {
      throw new Error("adapter closed stdout");
    }
    return JSON.parse(line);
  }

  async write(payload: unknown): Promise<void> {
    if (!this.proc.stdin.write(`${JSON.stringify(payload)}\n`)) {
      await once(this.proc.stdin, "drain");
    }
  }

  async request(id: number, texts: string[]): Promise<any> {
    await this.write({ id, texts });
    return this.readMessage();
  }

  /** Close stdin and wait for the process to exit; returns the exit code. */
  async close(): Promise<number | null> {
    this.proc.stdin.end();
    if (this.proc.exitCode !== null) {
      return this.proc.exitCode;
    }
    const [code] = (await once(this.proc, "exit")) as [number | null];
    return code;
  }
}

export async function startAdapter(
  command: string,
  args: string[],
): Promise<{ client: AdapterClient; ready: any }> {
  const client = new AdapterClient(command, args);
  const ready = await client.readMessage();
  return { client, ready };
}
