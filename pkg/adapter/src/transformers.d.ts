// Fallback typing so the package compiles when the optional model stack is
// not installed; serve.ts imports it dynamically and degrades at runtime.
declare module "@xenova/transformers";
