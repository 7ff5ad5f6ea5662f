/**
 * Echo adapter: answers 0.5 for every text.  A protocol-conformant test
 * double that lets the engine's external-scorer path run with no model.
 */

import { serveLoop } from "./protocol.js";

serveLoop("echo", async (texts) => texts.map(() => 0.5)).catch((err) => {
  console.error(`echo adapter failed: ${err}`);
  process.exit(1);
});
