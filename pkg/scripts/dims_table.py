"""Print word-span dimensions and image ranks of B_n in End(V^(x)n).

Usage: python3 scripts/dims_table.py [--max-n 4] [--ms 1 2 3]
"""
import argparse
import time

from tbl import bmw, verify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--ms", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()

    print("n  (2n-1)!!  word span")
    for n in range(1, args.max_n + 1):
        print(f"{n:<3}{bmw.bmw_dim(n):<10}{bmw.word_basis(n, n).dim}")
    print()
    print("n  m  rank  kernel  ideal  method  seconds")
    for n in range(2, args.max_n + 1):
        for m in args.ms:
            t0 = time.perf_counter()
            d = verify.rank_data(n, m)
            ker = bmw.bmw_dim(n) - d.rank
            ideal = "-" if d.ideal is None else d.ideal
            print(f"{n:<3}{m:<3}{d.rank:<6}{ker:<8}{ideal!s:<7}{d.method:<8}{time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
