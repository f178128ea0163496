"""Independent re-implementation of the default hashing embedder.

Used to derive regression constants (similarity tables, merge and duplicate
thresholds) without going through the C++ code.
"""

import math
import unicodedata

D = 256
FNV_OFFSET = 14695981039346656037
FNV_PRIME = 1099511628211


def normalize(text):
    t = unicodedata.normalize("NFC", text).lower()
    t = unicodedata.normalize("NFC", t)
    return " ".join(t.split())


def fnv1a64(data):
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def embed(text, dim=D):
    norm = normalize(text)
    if not norm:
        raise ValueError("empty text")
    padded = " " + norm + " "
    acc = [0.0] * dim
    for i in range(len(padded) - 2):
        h = fnv1a64(padded[i:i + 3].encode("utf-8"))
        acc[h % dim] += -1.0 if (h >> 32) & 1 else 1.0
    n2 = sum(v * v for v in acc)
    if n2 == 0:
        acc[fnv1a64(norm.encode("utf-8")) % dim] = 1.0
        n2 = 1.0
    inv = 1.0 / math.sqrt(n2)
    return [v * inv for v in acc]


def cosine(a, b):
    return sum(x * y for x, y in zip(a, b))


if __name__ == "__main__":
    import sys
    a, b = sys.argv[1], sys.argv[2]
    print("%.17g" % cosine(embed(a), embed(b)))
