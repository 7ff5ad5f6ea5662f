import os
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent

SST2_DIR = Path(os.environ.get("STOPGEN_SST2_DIR", REPO_ROOT / "data" / "sst2"))
SST2_FILES = {name: SST2_DIR / f"{name}.tsv" for name in ("train", "test", "validation")}

requires_sst2 = pytest.mark.skipif(
    not all(p.is_file() for p in SST2_FILES.values()),
    reason=(
        f"SST2 data not found under {SST2_DIR} "
        "(run scripts/fetch_sst2.py on a machine with network access, "
        "or point STOPGEN_SST2_DIR at the TSV files)"
    ),
)


def pytest_runtest_logreport(report):
    """Print one PASS/FAIL/SKIP line per acceptance criterion."""
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.skipped):
        word = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(
            report.outcome, report.outcome.upper()
        )
        line = f"[acceptance] {name}: {word}"
        if report.skipped and report.longrepr is not None:
            longrepr = report.longrepr
            if isinstance(longrepr, tuple):
                reason = longrepr[2]
            else:
                reason = str(longrepr)
            reason = reason.split("Skipped: ", 1)[-1].strip()
            line += f" ({reason})"
        sys.stderr.write(line + "\n")
        sys.stderr.flush()
