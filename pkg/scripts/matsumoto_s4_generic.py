"""Reduced-word independence of Y_w over S_4 at generic r.

The test suite checks this at the specializations m' = 4, 5.  Here every
reduced-word class of S_4 is compared on the matrix backend with the default
degree bound, i.e. at enough faithful nodes m' = 4, 5, ... to certify the
identity in B_4(r, q).  Expect tens of minutes.

Usage: python3 scripts/matsumoto_s4_generic.py [--n 4]
"""
import argparse
import json
import time
from itertools import permutations

from tbl import bmw


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4)
    args = ap.parse_args()
    n = args.n
    results = []
    for perm in permutations(range(1, n + 1)):
        words = bmw.reduced_words(perm)
        if len(words) < 2:
            continue
        t0 = time.perf_counter()
        cert = bmw.all_equal([bmw.yb_element(w, n) for w in words])
        row = {"permutation": list(perm), "words": len(words), "seconds": round(time.perf_counter() - t0, 1),
               **cert.to_json()}
        results.append(row)
        print(json.dumps(row, sort_keys=True), flush=True)
    ok = all(r["equal"] for r in results)
    print(f"{len(results)} classes, all equal: {ok}")
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
