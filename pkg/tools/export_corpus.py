"""Write a few random corpus cases as CLI documents into scenarios/."""

import json
import sys
from pathlib import Path

from penvelope.corpus import case_document, random_corpus

out = Path(sys.argv[1] if len(sys.argv) > 1 else "scenarios")
cases = random_corpus()
for k in (0, 4, 19):
    case = cases[k]
    path = out / f"corpus_{case.name}.json"
    path.write_text(json.dumps(case_document(case), indent=2) + "\n")
    print(path)
