"""Run the CLI over the bundled scenarios and the 20-case random corpus.

Writes every machine-readable report into OUTDIR (one file per document and
command) plus MANIFEST, a list of sha256 digests.
"""

import hashlib
import json
import sys
import tempfile
from pathlib import Path

from penvelope.cli import COMMANDS, run
from penvelope.corpus import case_document, random_corpus

CORPUS_COMMANDS = ("validate", "units", "decide", "family-check", "norm-check")


def main(outdir: str) -> None:
    root = Path(__file__).resolve().parents[1]
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(doc, COMMANDS) for doc in sorted((root / "scenarios").glob("*.json"))]
    with tempfile.TemporaryDirectory() as tmp:
        for case in random_corpus():
            path = Path(tmp) / f"random_{case.name}.json"
            path.write_text(json.dumps(case_document(case), indent=2))
            jobs.append((path, CORPUS_COMMANDS))
        lines = []
        for doc, cmds in jobs:
            for cmd in cmds:
                _, text = run([cmd, str(doc), "--format", "json"])
                name = f"{doc.stem}.{cmd}.json"
                (out / name).write_text(text + "\n")
                lines.append(f"{hashlib.sha256(text.encode()).hexdigest()}  {name}")
    (out / "MANIFEST").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
