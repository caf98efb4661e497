"""Run every bundled figure config and print a per-scale segment summary.

    python3 scripts/run_figures.py [OUT_ROOT] [--only fig3_spiral ...]
"""
import argparse
import csv
import time
from pathlib import Path

from dogillusion.cli import run_pipeline
from dogillusion.runconfig import bundled_configs, load_config


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out_root", nargs="?", default="out")
    parser.add_argument("--only", nargs="*", help="config names to run (default: all)")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    for name in args.only or sorted(bundled_configs()):
        config = load_config(name, output_dir=Path(args.out_root) / name)
        t0 = time.perf_counter()
        run_pipeline(config, jobs=args.jobs)
        print(f"== {name}: {time.perf_counter() - t0:.1f}s -> {config.output_dir}")
        with open(config.output_dir / "tilt_stats.csv", newline="") as fh:
            for row in csv.DictReader(fh):
                if row["class"] == "all":
                    print(f"   sigma_c={row['scale']:>5}  segments={row['count']:>4}  "
                          f"mean={row['mean_angle'] or '-':>8}  std={row['std_angle'] or '-':>8}")


if __name__ == "__main__":
    main()
