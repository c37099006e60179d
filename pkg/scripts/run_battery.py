"""Run the theorem battery in both encodings and print one line per item."""
import argparse
import json
import time

from bellcheck.battery import BatteryConfig, run_theorem_battery


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--json", help="write the float-encoding report here")
    args = ap.parse_args()
    for encoding in ("float64", "rational"):
        t0 = time.perf_counter()
        report = run_theorem_battery(BatteryConfig(seed=args.seed, encoding=encoding))
        print(f"[{encoding}] {time.perf_counter() - t0:.1f} s, passed = {report['passed']}")
        for name, item in report["items"].items():
            print(f"  {name:<18} {item['verdict']:<4}  {item['instances']:>5} instances  "
                  f"{item['failures']} failures")
        if args.json and encoding == "float64":
            with open(args.json, "w") as fh:
                json.dump(report, fh, indent=2)


if __name__ == "__main__":
    main()
