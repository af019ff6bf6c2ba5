"""Run a benchmark grid from a TOML config and write the report tables.

    python3 scripts/run_benchmark.py scripts/desk.toml --out runs/desk
"""

import argparse
import logging
from pathlib import Path

from tgem.bench import BenchmarkConfig, report, run_benchmark


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("config", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--jobs", type=int)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = BenchmarkConfig.from_toml(args.config)
    run_benchmark(cfg, args.out, jobs=args.jobs)
    report(args.out, args.out / "report")
    for name in ("distance", "f1", "events"):
        print((args.out / "report" / f"{name}.txt").read_text())


if __name__ == "__main__":
    main()
