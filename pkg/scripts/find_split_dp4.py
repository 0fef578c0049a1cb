#!/usr/bin/env python3
"""Search for a diagonal quartic del Pezzo surface with all 16 lines rational.

X = {sum x_i^2 = 0, sum lam_i x_i^2 = 0} in P^4.  Scans odd primes p and
tuples 0 = lam_0 < lam_1 = 1 < lam_2 < lam_3 < lam_4 < p (an affine change of
the pencil parameter normalizes the first two), counts lines over F_p by
exhaustive enumeration and writes the first hit as JSON.

    python scripts/find_split_dp4.py > tests/data/split_dp4.json
"""

import argparse
import json
from itertools import combinations

from pencillab.fforacle import BadReduction, census_planes, diagonal_pencil, reduce_pencil


def search(primes):
    for p in primes:
        for rest in combinations(range(2, p), 3):
            lam = (0, 1) + rest
            try:
                fp = reduce_pencil(diagonal_pencil(lam), p)
            except BadReduction:
                continue
            census = census_planes(fp, 1, keep=True)
            if census.total == 16:
                ell = census.planes[0]
                split = census_planes(fp, 1, ell)
                return {
                    "p": p,
                    "lambda": list(lam),
                    "reference_line": ell.tolist(),
                    "lines": split.total,
                    "disjoint": split.meeting(-1),
                    "meeting": split.meeting(0),
                }
    return None


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--primes", type=int, nargs="+", default=[5, 7, 11, 13, 17, 19])
    args = parser.parse_args()
    found = search(args.primes)
    if found is None:
        raise SystemExit("no split example among the given primes")
    print(json.dumps(found, indent=2))


if __name__ == "__main__":
    main()
