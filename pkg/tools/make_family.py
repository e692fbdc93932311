#!/usr/bin/env python3
"""Generate the bundled synthetic level-101 weight-2 family file.

The package does not compute newform bases (out of scope), so the demo
family ships synthetic eigenvalue data: Sato-Tate-distributed normalized
eigenvalues per form, the correct +-1 eigenvalue at the level prime, and
positive harmonic weights that sum exactly to phi(N)/N.  Everything is
deterministic (fixed seed).  Values are NOT eigenvalues of actual
newforms; the file exists to exercise ingestion, averaging, and the
Petersson consistency checks at realistic scales.
"""

import json
import math
import random
import sys

N = 101
WEIGHT = 2
P_MAX = 2000
FORMS = 8
SEED = 20240101


def primes_up_to(n):
    sieve = [True] * (n + 1)
    sieve[0] = sieve[1] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            for q in range(p * p, n + 1, p):
                sieve[q] = False
    return [p for p, ok in enumerate(sieve) if ok]


def sato_tate_eta(rng):
    while True:
        theta = rng.uniform(0.0, math.pi)
        if rng.random() <= math.sin(theta) ** 2:
            return 2.0 * math.cos(theta)


def main(out_path):
    rng = random.Random(SEED)
    primes = primes_up_to(P_MAX)
    forms = []
    raw_w = [1.0 + 0.35 * math.sin(1.7 * i + 0.4) for i in range(FORMS)]
    scale = (1 - 1 / N) / sum(raw_w)
    for i in range(FORMS):
        ap_rows = []
        for p in primes:
            if p == N:
                ap_rows.append([p, 1.0 if i % 2 == 0 else -1.0])
            else:
                eta = sato_tate_eta(rng)
                ap_rows.append([p, round(eta * math.sqrt(p), 6)])
        forms.append({
            "label": f"101.2.s{i}",
            "ap": ap_rows,
            "omega": raw_w[i] * scale,
        })
    payload = {"level": N, "weight": WEIGHT, "p_max": P_MAX, "forms": forms}
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, sort_keys=True, indent=1)
        fh.write("\n")
    print(f"wrote {out_path}: {FORMS} forms, primes to {P_MAX}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/family_101_weight2.json")
