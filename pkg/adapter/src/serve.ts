/**
 * Transformer sentiment adapter: wraps a sequence-classification checkpoint
 * (DistilBERT fine-tuned on SST-2 by default) behind the wire protocol.
 *
 * The model stack (@xenova/transformers, ONNX runtime) is imported lazily;
 * if it is missing or the checkpoint cannot be loaded, the process exits
 * nonzero before emitting the ready line.  Inference runs in evaluation
 * mode on fixed weights, so identical texts yield identical scores.
 */

import { parseArgs } from "node:util";

import { serveLoop } from "./protocol.js";

const DEFAULT_MODEL = "Xenova/distilbert-base-uncased-finetuned-sst-2-english";

interface AdapterConfig {
  model: string;
  batchSize: number;
  device: string;
  positiveIndex: number | undefined;
}

function readConfig(): AdapterConfig {
  const { values } = parseArgs({
    options: {
      model: { type: "string", default: DEFAULT_MODEL },
      "batch-size": { type: "string", default: "16" },
      device: { type: "string", default: "cpu" },
      "positive-index": { type: "string" },
    },
  });
  const batchSize = Number(values["batch-size"]);
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    throw new Error(`--batch-size must be a positive integer, got ${values["batch-size"]}`);
  }
  return {
    model: values.model as string,
    batchSize,
    device: values.device as string,
    positiveIndex:
      values["positive-index"] === undefined
        ? undefined
        : Number(values["positive-index"]),
  };
}

/** Positive-class column: explicit flag, else the model's label mapping, else 1. */
function resolvePositiveIndex(config: AdapterConfig, label2id: Record<string, number> | undefined): number {
  if (config.positiveIndex !== undefined) {
    return config.positiveIndex;
  }
  for (const label of ["POSITIVE", "positive", "LABEL_1"]) {
    if (label2id && label in label2id) {
      return label2id[label];
    }
  }
  return 1;
}

function softmaxColumn(logits: Float32Array | number[], column: number): number {
  let max = -Infinity;
  for (let i = 0; i < logits.length; i += 1) {
    max = Math.max(max, Number(logits[i]));
  }
  let total = 0;
  for (let i = 0; i < logits.length; i += 1) {
    total += Math.exp(Number(logits[i]) - max);
  }
  return Math.exp(Number(logits[column]) - max) / total;
}

async function main(): Promise<void> {
  const config = readConfig();
  if (config.device !== "cpu") {
    console.error(`device ${config.device} not available; running on cpu`);
  }

  // some model-stack internals log to stdout, which would corrupt the
  // protocol stream; reroute everything to stderr
  console.log = (...args: unknown[]) => console.error(...args);

  let tokenizer: any;
  let model: any;
  try {
    const transformers: any = await import("@xenova/transformers");
    tokenizer = await transformers.AutoTokenizer.from_pretrained(config.model);
    model = await transformers.AutoModelForSequenceClassification.from_pretrained(
      config.model,
    );
  } catch (err) {
    console.error(`failed to load model ${config.model}: ${err}`);
    process.exit(1);
  }

  const positiveIndex = resolvePositiveIndex(config, model.config?.label2id);
  console.error(
    `model ${config.model} loaded (positive-class index ${positiveIndex})`,
  );

  const scoreBatch = async (texts: string[]): Promise<number[]> => {
    const scores: number[] = [];
    for (let start = 0; start < texts.length; start += config.batchSize) {
      const chunk = texts.slice(start, start + config.batchSize);
      // the adapter owns truncation to the model's maximum input length
      const inputs = await tokenizer(chunk, { padding: true, truncation: true });
      const output = await model(inputs);
      const [rows, labels] = output.logits.dims;
      const data = output.logits.data as Float32Array;
      for (let row = 0; row < rows; row += 1) {
        const logits = data.subarray(row * labels, (row + 1) * labels);
        scores.push(softmaxColumn(logits, positiveIndex));
      }
    }
    return scores;
  };

  await serveLoop(`distilbert-sst2:${config.model}`, scoreBatch);
}

main().catch((err) => {
  console.error(`adapter failed: ${err}`);
  process.exit(1);
});
