"""
Place and identity in one pass
==============================

Enroll a handful of scenes, train a face model and analyze a query through
the library, then do the same through the command line.
"""

import json
import tempfile
from pathlib import Path

from somiap import synthetic
from somiap.cli import main
from somiap.imagecore import write_image
from somiap.pipeline import PlaceIndex, enroll_place, match_place

index = PlaceIndex()
for i in range(5):
    index = enroll_place(index, synthetic.scene(100 + i), f"scene{i}")

query = synthetic.add_noise(synthetic.scene(103), 5, seed=1)
for m in match_place(index, query)[:3]:
    print(m)

###############################################################################
# The same flow on disk. The manifest is a JSON file written atomically.
with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    idx = tmp / "index.json"
    for i in range(5):
        write_image(tmp / f"s{i}.png", synthetic.scene(100 + i))
        main(["enroll-place", str(idx), str(tmp / f"s{i}.png"), "--id", f"scene{i}"])
    write_image(tmp / "q.png", query)
    main(["analyze", str(idx), str(tmp / "q.png"), "--no-faces", "--format", "text"])
    print(json.loads(idx.read_text())["version"])
