"""Run the verification suite and write JSON and markdown reports.

Usage: python3 scripts/run_verify.py [--out-dir reports] [--mutate R]
"""
import argparse
import pathlib

from tbl import verify


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--mutate", choices=verify.ALL_MUTATIONS, default=None)
    ap.add_argument("--timing", action="store_true")
    args = ap.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = verify.run_suite(verify.SuiteConfig(mutate=args.mutate))
    stem = "report" if args.mutate is None else f"report_{args.mutate}"
    (out / f"{stem}.json").write_text(verify.emit_report(records, "json", timing=args.timing))
    (out / f"{stem}.md").write_text(verify.emit_report(records, "markdown"))
    s = verify.summarize(records)
    print(f"{s['pass']} pass, {s['fail']} fail -> {out}/{stem}.json")
    raise SystemExit(0 if verify.all_passed(records) else 1)


if __name__ == "__main__":
    main()
