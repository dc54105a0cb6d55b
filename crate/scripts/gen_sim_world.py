#!/usr/bin/env python3
"""Write the bundled simulator world (crates/core/data/sim_world.json)."""

import json
import sys
from pathlib import Path

COCO = """person|bicycle|car|motorcycle|airplane|bus|train|truck|boat|traffic light|fire hydrant|stop sign
parking meter|bench|bird|cat|dog|horse|sheep|cow|elephant|bear|zebra|giraffe|backpack|umbrella|handbag|tie
suitcase|frisbee|skis|snowboard|sports ball|kite|baseball bat|baseball glove|skateboard|surfboard
tennis racket|bottle|wine glass|cup|fork|knife|spoon|bowl|banana|apple|sandwich|orange|broccoli|carrot
hot dog|pizza|donut|cake|chair|couch|potted plant|bed|dining table|toilet|tv|laptop|mouse|remote
keyboard|cell phone|microwave|oven|toaster|sink|refrigerator|book|clock|vase|scissors|teddy bear
hair drier|toothbrush""".replace("\n", "|").split("|")
TBP = "cat dog bird bear lion horse elephant monkey frog turtle rabbit mouse " \
      "backpack crown suitcase chair balloon bow car bowl bench clock camera umbrella".split()

STRONG = {"elephant": 3.0, "giraffe": 3.0, "bicycle": 3.0, "bus": 2.5, "train": 2.5, "truck": 2.5,
          "airplane": 2.5, "horse": 2.0, "bear": 2.0, "lion": 2.0, "person": 2.0, "car": 2.0,
          "dining table": 2.0, "bed": 2.0, "couch": 2.0, "zebra": 2.0, "cow": 1.5, "dog": 1.5}
WEAK = {"donut": 1.0, "bird": 0.8, "mouse": 0.6, "frog": 0.7, "spoon": 0.6, "fork": 0.6,
        "remote": 0.6, "toothbrush": 0.5, "crown": 0.7, "bow": 0.6, "balloon": 0.8, "clock": 0.8,
        "scissors": 0.6, "tie": 0.6, "hair drier": 0.5, "knife": 0.6, "apple": 0.9, "cup": 0.8}

COLORS = "red orange yellow green blue purple pink brown gray black white".split()
SHAPES = "two-wheeled hollow-centered ring-shaped glazed round long-eared feathered winged " \
         "long-tailed four-legged spiral domed folded striped spotted fluffy".split()

SUGGESTIONS = {
    "shape": {
        "bicycle": ["two-wheeled bicycle", "bicycle with pedals", "bicycle with chain and gears"],
        "donut": ["hollow-centered donut", "ring-shaped donut", "glazed donut"],
        "bird": ["feathered bird", "winged bird", "bird with a beak"],
        "mouse": ["long-tailed mouse", "round mouse"],
        "crown": ["round crown", "crown with spikes"],
        "clock": ["round clock", "clock with a dial"],
        "apple": ["round apple", "apple with a stem"],
        "frog": ["four-legged frog", "spotted frog"],
    },
    "color": {
        "apple": ["red apple", "green apple"],
        "donut": ["pink donut", "brown donut"],
        "bird": ["blue bird", "red bird"],
        "bicycle": ["red bicycle", "black bicycle"],
        "mouse": ["gray mouse", "white mouse"],
        "crown": ["golden crown", "silver crown"],
    },
    "llm_repair": {
        "donut": ["a bicycle parked next to a large glazed donut"],
        "bird": ["a bird perched on the back of a giraffe"],
    },
}


def main(out):
    salience = {w: 1.0 for w in COCO + TBP}
    salience.update(STRONG)
    salience.update(WEAK)
    bonus = {c: 0.3 for c in COLORS}
    bonus.update({s: 1.5 for s in SHAPES})
    bonus.update({"golden": 0.3, "silver": 0.3, "large": 0.5, "pedal": 0.5, "chain": 0.5,
                  "gear": 0.5, "beak": 0.5, "spike": 0.5, "stem": 0.3, "dial": 0.5})
    world = {
        "salience": dict(sorted(salience.items())),
        "modifier_bonus": dict(sorted(bonus.items())),
        "depth_bonus": 0.5,
        "appearance_threshold": 0.3,
        "seed": 20240,
        "drifted": ["suspension fork"],
        "suggestions": SUGGESTIONS,
    }
    Path(out).write_text(json.dumps(world, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/sim_world.json")
