"""Regenerate tests/golden/: one JSON report per scenario and command."""

import sys
from pathlib import Path

from penvelope.cli import COMMANDS, run

root = Path(__file__).resolve().parents[1]
out = Path(sys.argv[1]) if len(sys.argv) > 1 else root / "tests" / "golden"
out.mkdir(parents=True, exist_ok=True)
for doc in sorted((root / "scenarios").glob("*.json")):
    for cmd in COMMANDS:
        code, text = run([cmd, str(doc), "--format", "json"])
        (out / f"{doc.stem}.{cmd}.json").write_text(text + "\n")
print(out)
