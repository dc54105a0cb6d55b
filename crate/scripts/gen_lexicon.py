#!/usr/bin/env python3
"""Generate the bundled POS lexicon (lemma<TAB>pos, UTF-8).

Nouns come from the primary lemma of every synset in the miniature WordNet
outline plus the MSCOCO / TBP vocabularies; function words and adjectives are
curated below. A lemma may appear on several lines with different tags.

Usage: python3 scripts/gen_lexicon.py crates/core/data/lexicon.tsv
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
from gen_mini_wordnet import TAXONOMY, parse  # noqa: E402

DET = "a an the this that these those some each every another any my his her its our their your".split()
CONJ = "and or but nor &".split()
OTHER = (
    "with without on in of near under over next to beside behind at by from into onto "
    "is are was were be being been has have had sits sitting stands standing lies lying "
    "holding playing running chasing eating riding looking flying walking jumping "
    "together while there here very".split()
)

ADJ = """
red orange yellow green blue purple pink brown gray grey black white silver golden
big small large tiny huge little tall short long round square flat thin thick
two three four five six seven eight nine ten many several
two-wheeled hollow-centered ring-shaped glazed striped spotted fluffy furry shiny wooden
leather metallic plastic glass rectangular oval curved sturdy vintage old new young
bright dark light pale vivid colorful delicious fresh ripe sliced crispy fierce majestic
wild cute tiny fat slim heavy soft hard smooth rough wet dry hot cold warm
feathered winged long-necked long-eared short-tailed long-tailed four-legged
spiral triangular cylindrical domed folded open closed empty full
""".split()

# Nouns that also work as prenominal modifiers.
AMBIGUOUS_NOUN = "orange remote delicious gold".split()

COCO = """person|bicycle|car|motorcycle|airplane|bus|train|truck|boat|traffic light
fire hydrant|stop sign|parking meter|bench|bird|cat|dog|horse|sheep|cow|elephant|bear|zebra|giraffe
backpack|umbrella|handbag|tie|suitcase|frisbee|skis|snowboard|sports ball|kite|baseball bat
baseball glove|skateboard|surfboard|tennis racket|bottle|wine glass|cup|fork|knife|spoon|bowl
banana|apple|sandwich|orange|broccoli|carrot|hot dog|pizza|donut|cake|chair|couch|potted plant|bed
dining table|toilet|tv|laptop|mouse|remote|keyboard|cell phone|microwave|oven|toaster|sink
refrigerator|book|clock|vase|scissors|teddy bear|hair drier|toothbrush"""

EXTRA_NOUNS = """
animal object photo picture image park street table road field tree grass beach sky water
ball pedal chain gear wheel frame tire handlebar seat hole ring center shell fur mane trunk
tusk wing feather beak tail leg leaf stem peel crust icing sprinkle glaze frosting dough
strap pocket zipper handle lid rim face hand dial lens flash canopy string basket
man woman child boy girl kid people crowd room kitchen house window door wall floor
garden forest river lake mountain city grill plate glass box bag hat car bike
""".split()


def main(out):
    nodes, _ = parse(TAXONOMY)
    nouns = set(EXTRA_NOUNS)
    for _, words, _ in nodes:
        nouns.add(words[0].lower())
    for w in COCO.replace("\n", "|").split("|"):
        nouns.add(w.strip())
    entries = set()
    for w in DET:
        entries.add((w, "DET"))
    for w in CONJ:
        entries.add((w, "CONJ"))
    for w in OTHER:
        entries.add((w, "OTHER"))
    for w in ADJ:
        entries.add((w, "ADJ"))
    for w in AMBIGUOUS_NOUN:
        entries.add((w, "ADJ"))
        entries.add((w, "NOUN"))
    function_words = {w for w, _ in entries if _ != "ADJ" and _ != "NOUN"}
    for w in nouns:
        if w in function_words:
            continue
        entries.add((w, "NOUN"))
    lines = sorted(f"{w}\t{p}" for w, p in entries)
    Path(out).write_text("\n".join(lines) + "\n")
    print(f"{len(lines)} lexicon entries -> {out}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/lexicon.tsv")
