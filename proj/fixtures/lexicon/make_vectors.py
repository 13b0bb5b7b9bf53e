#!/usr/bin/env python3
"""Regenerates vectors.txt.

Each similarity group gets one orthonormal basis direction (a one-hot axis)
plus small per-word noise, so words inside a group sit near cosine 0.97 and
words from different groups stay below cosine ~0.25. That makes the matcher's
default threshold (0.55) decisive on fixture data.
"""

import random

DIM = 96

GROUPS = [
    # multi-member similarity clusters
    ["laptop", "computer", "notebook"],
    ["car", "automobile"],
    ["couch", "sofa"],
    ["cup", "mug"],
    ["child", "kid"],
    ["rock", "stone", "boulder"],
    ["television", "tv"],
    ["phone", "telephone"],
    ["bicycle", "bike"],
    ["rabbit", "bunny"],
    ["airplane", "plane", "jet"],
    ["sea", "ocean"],
    ["street", "road"],
    ["photo", "picture", "image"],
    ["cap", "beanie"],
    ["pot", "kettle"],
    # corpus pool labels: pairwise unrelated, one group each
    ["ball"], ["box"], ["tree"], ["dog"], ["cat"], ["chair"], ["table"],
    ["flower"], ["vase"], ["bird"], ["fish"], ["bottle"], ["book"], ["lamp"],
    ["hat"], ["clock"], ["drum"], ["kite"], ["bench"], ["sign"], ["shoe"],
    ["boat"],
    # words exercised by targeted tests
    ["man"], ["woman"], ["person"], ["animal"], ["beer"], ["drink"],
    ["rocket"], ["glass"], ["hoop"], ["basketball"], ["vehicle"],
    ["furniture"], ["train"], ["house"], ["door"], ["window"], ["plate"],
    ["spoon"], ["bathtub"], ["tub"],
    # filler vocabulary
    ["sun"], ["moon"], ["star"], ["cloud"], ["hill"], ["field"], ["garden"],
    ["bridge"], ["tower"],
    ["river", "stream", "creek"], ["forest", "woods"], ["beach", "shore", "coast"],
    ["market", "bazaar"], ["store", "shop"], ["school"], ["church", "chapel"],
    ["castle", "fortress"], ["farm", "ranch"], ["barn"], ["fence"], ["gate"],
    ["wall"], ["roof"], ["floor"], ["ceiling"], ["stairs", "staircase"],
    ["mirror"], ["carpet", "rug"], ["pillow", "cushion"], ["blanket", "quilt"],
    ["towel"], ["basket"], ["bag", "sack"], ["wheel"], ["engine", "motor"],
]

FILLER_MEMBERS = {
    "sun": ["sunshine", "sunlight"],
    "moon": ["moonbeam"],
    "star": ["starlight"],
    "cloud": ["mist", "fog"],
    "garden": ["yard", "lawn"],
    "bridge": ["overpass", "viaduct"],
    "tower": ["spire", "turret"],
    "hill": ["mound", "knoll"],
    "field": ["meadow", "pasture"],
    "house": ["home", "cottage"],
    "door": ["doorway"],
    "window": ["pane"],
    "plate": ["dish", "platter"],
    "spoon": ["ladle"],
    "train": ["locomotive"],
    "rocket": ["missile"],
    "glass": ["tumbler"],
    "beer": ["ale", "lager"],
    "drink": ["beverage"],
    "person": ["human"],
    "man": ["guy", "fellow"],
    "woman": ["lady"],
    "animal": ["creature"],
    "vehicle": ["transport"],
    "furniture": ["furnishing"],
    "hoop": ["ring", "loop"],
    "tub": ["basin"],
}


def main():
    rng = random.Random(20240817)
    rows = []
    for axis, group in enumerate(GROUPS):
        if axis >= DIM:
            raise SystemExit("more groups than dimensions")
        members = list(group)
        head = group[0]
        members += FILLER_MEMBERS.get(head, [])
        for word in members:
            vec = [0.0] * DIM
            vec[axis] = 1.0
            for d in range(DIM):
                vec[d] += rng.uniform(-0.12, 0.12)
            norm = sum(x * x for x in vec) ** 0.5
            rows.append((word, [x / norm for x in vec]))

    with open("vectors.txt", "w") as f:
        f.write(f"{len(rows)} {DIM}\n")
        for word, vec in rows:
            f.write(word + " " + " ".join(f"{x:.6f}" for x in vec) + "\n")
    print(f"wrote {len(rows)} vectors of dim {DIM}")


if __name__ == "__main__":
    main()
