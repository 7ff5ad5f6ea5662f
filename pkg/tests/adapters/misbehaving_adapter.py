#!/usr/bin/env python3
"""Adapter that violates the protocol in a selectable way (test double)."""

import json
import sys
import time


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "short-scores"

    if mode == "slow-ready":
        time.sleep(30)
        return
    if mode == "no-ready":
        for _ in sys.stdin:
            pass
        return
    if mode == "bad-ready":
        sys.stdout.write("hello world\n")
        sys.stdout.flush()
        return

    sys.stdout.write(json.dumps({"type": "ready", "protocol": 1, "name": mode}) + "\n")
    sys.stdout.flush()

    for line in sys.stdin:
        if not line.strip():
            continue
        request = json.loads(line)
        rid = request["id"]
        texts = request["texts"]
        if mode == "short-scores":
            reply = json.dumps({"id": rid, "scores": [0.5] * max(0, len(texts) - 1)})
        elif mode == "wrong-id":
            reply = json.dumps({"id": rid + 1, "scores": [0.5] * len(texts)})
        elif mode == "not-json":
            reply = "?!?! this is not json"
        elif mode == "out-of-range":
            reply = json.dumps({"id": rid, "scores": [1.5] * len(texts)})
        elif mode == "error-response":
            reply = json.dumps({"id": rid, "error": "synthetic inference failure"})
        elif mode == "crash":
            sys.exit(9)
        else:
            raise SystemExit(f"unknown mode {mode!r}")
        sys.stdout.write(reply + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
