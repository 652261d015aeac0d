#!/usr/bin/env python3
"""Regenerate the shipped oracle benchmark suite (suites/oracle10).

Ten questions over three synthetic models: counts, radii, centers, extents,
depths and side-filtered counts, each with a golden reference program.
Expected values come from the fixture manifests, not from running the
engine.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from cadqa.fixtures import HoleSpec, make_cylinder, make_plate_with_holes  # noqa: E402

SUITE_DIR = Path(__file__).resolve().parents[1] / "suites" / "oracle10"


def main() -> None:
    models = SUITE_DIR / "models"
    programs = SUITE_DIR / "programs"
    models.mkdir(parents=True, exist_ok=True)
    programs.mkdir(parents=True, exist_ok=True)

    plate = make_plate_with_holes(
        width=100.0, depth=80.0, thickness=8.0, nx=5, ny=4,
        holes=[HoleSpec((1, 1), 5.0), HoleSpec((3, 1), 5.0),
               HoleSpec((1, 2), 8.0), HoleSpec((3, 2), 8.0)],
        segments=32)
    plate.write(models, "plate4")

    blind = make_plate_with_holes(
        width=100.0, depth=80.0, thickness=10.0, nx=5, ny=4,
        holes=[HoleSpec((1, 1), 5.0), HoleSpec((3, 1), 5.0),
               HoleSpec((2, 2), 6.0, kind="blind", depth=5.0)],
        segments=32)
    blind.write(models, "blindplate")

    pin = make_cylinder(radius=4.0, height=20.0, segments=64)
    pin.write(models, "pin")

    radii = sorted(h["radius"] for h in plate.manifest["holes"])
    center = [plate.manifest["plate"]["width"] / 2,
              plate.manifest["plate"]["depth"] / 2,
              plate.manifest["plate"]["thickness"] / 2]
    extents = [plate.manifest["plate"]["width"],
               plate.manifest["plate"]["depth"],
               plate.manifest["plate"]["thickness"]]
    blind_depth = next(h["depth"] for h in blind.manifest["holes"]
                       if h["kind"] == "blind")
    n_through_blindplate = sum(1 for h in blind.manifest["holes"]
                               if h["kind"] == "through")

    questions = [
        ("q01", "plate4", "How many holes does the part have?",
         {"type": "count", "value": len(plate.manifest["holes"])},
         'let holes = search("hole");\nsolution = count(holes);'),
        ("q02", "plate4", "What are the radii of the holes, in millimeters?",
         {"type": "list", "values": radii, "tolerance": 0.05},
         'let holes = search("hole");\nsolution = map(holes, h -> radius(h));'),
        ("q03", "plate4", "What is the diameter of the smallest hole?",
         {"type": "number", "value": 2.0 * min(radii), "tolerance": 0.1},
         'let holes = search("hole");\n'
         'solution = min(map(holes, h -> diameter(h)));'),
        ("q04", "plate4", "What is the center of the object?",
         {"type": "point", "value": center, "tolerance": 0.001},
         'solution = center(model());'),
        ("q05", "plate4", "What are the extents of the part?",
         {"type": "point", "value": extents, "tolerance": 0.001},
         'solution = extents(model());'),
        ("q06", "plate4", "How many holes are visible from the top?",
         {"type": "count", "value": len(plate.manifest["holes"])},
         'solution = count(search("hole", sides=[top]));'),
        ("q07", "plate4", "How many holes have a radius smaller than 6 mm?",
         {"type": "count", "value": sum(1 for r in radii if r < 6.0)},
         'let holes = search("hole");\n'
         'solution = count(filter(holes, h -> radius(h) < 6));'),
        ("q08", "blindplate", "How many holes are visible from the bottom?",
         {"type": "count", "value": n_through_blindplate},
         'solution = count(search("hole", sides=[bottom]));'),
        ("q09", "blindplate", "How deep is the blind hole?",
         {"type": "number", "value": blind_depth, "tolerance": 0.01},
         'let bs = search("blind hole");\n'
         'solution = min(map(bs, b -> depth(b)));'),
        ("q10", "pin", "What is the radius of the pin?",
         {"type": "number", "value": pin.manifest["radius"],
          "tolerance": 0.05},
         'let pins = search("pin");\nsolution = min(map(pins, p -> radius(p)));'),
    ]

    suite = []
    for qid, model_name, question, expected, program in questions:
        (programs / f"{qid}.cadq").write_text(program + "\n", encoding="utf-8")
        suite.append({
            "id": qid,
            "model": f"models/{model_name}.obj",
            "question": question,
            "expected": expected,
            "reference_program": f"programs/{qid}.cadq",
        })
    (SUITE_DIR / "suite.json").write_text(json.dumps(suite, indent=1),
                                          encoding="utf-8")
    print(f"wrote {len(suite)} questions to {SUITE_DIR}")
    assert math.isclose(sum(radii), 26.0), "fixture radii drifted"


if __name__ == "__main__":
    main()
