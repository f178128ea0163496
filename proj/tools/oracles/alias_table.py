"""Builds the alias-spelling fixture for node merging and picks the merge
threshold halfway between the lowest alias-pair and the highest
non-alias-pair similarity. Writes tests/golden/alias_labels.tsv."""

import os
import random

from hashing_embedder import cosine, embed

SYLLABLES = ["ka", "lo", "ven", "mi", "ra", "tor", "zu", "bel", "dan", "ri",
             "so", "ne", "vik", "ta", "mor", "li", "gan", "es", "pa", "ul"]
SUFFIXES = [".", " inc"]


def main():
    rng = random.Random(3)
    word = lambda: "".join(rng.choice(SYLLABLES) for _ in range(3))
    names, seen = [], set()
    while len(names) < 60:
        n = word() + " " + word()
        if n not in seen:
            seen.add(n)
            names.append(n)
    labels = [(i, n + s) for i, n in enumerate(names) for s in [""] + SUFFIXES]
    vecs = [embed(l) for _, l in labels]
    alias_min, other_max = 1.0, -1.0
    for a in range(len(labels)):
        for b in range(a + 1, len(labels)):
            c = cosine(vecs[a], vecs[b])
            if labels[a][0] == labels[b][0]:
                alias_min = min(alias_min, c)
            else:
                other_max = max(other_max, c)
    print("alias min %.6f  non-alias max %.6f  threshold %.4f"
          % (alias_min, other_max, (alias_min + other_max) / 2))
    out = os.path.join(os.path.dirname(__file__), "..", "..", "tests", "golden", "alias_labels.tsv")
    with open(out, "w") as f:
        f.write("# entity\tlabel\n")
        for i, l in labels:
            f.write("%d\t%s\n" % (i, l))


if __name__ == "__main__":
    main()
