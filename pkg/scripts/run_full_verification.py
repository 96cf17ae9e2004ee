#!/usr/bin/env python3
"""Run every CLI verification suite for the Funk and Bryant-Shen metrics.

Writes one report directory per (metric, command) under --out and exits
nonzero if any check failed.
"""

import argparse
import json
import sys
from pathlib import Path

from finslerhol.cli import main as cli_main

CONFIGS = {
    "funk": {"metric": "funk", "dim": 3},
    "bryant-shen": {
        "metric": "bryant-shen",
        "alpha": 0.5235987755982988,
        "dim": 3,
        "lambda_tol": 1e-5,
    },
    "euclidean": {"metric": "euclidean", "dim": 3},
}

COMMANDS = [
    "verify-metric",
    "curvature-scan",
    "transport",
    "holonomy-loop",
    "loop-curvature",
    "algebra",
]


def run(out_root: Path, names, timings: bool) -> int:
    worst = 0
    for name in names:
        overrides = CONFIGS[name]
        for command in COMMANDS:
            out_dir = out_root / name / command
            out_dir.mkdir(parents=True, exist_ok=True)
            config_path = out_dir / "config.json"
            config_path.write_text(json.dumps(overrides, indent=2))
            argv = [command, "--config", str(config_path), "--out", str(out_dir)]
            if timings:
                argv.append("--timings")
            print(f"\n=== {name} / {command} ===")
            code = cli_main(argv)
            worst = max(worst, code)
    return worst


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="out", help="output root directory")
    parser.add_argument(
        "--metrics",
        nargs="+",
        default=["funk", "bryant-shen"],
        choices=sorted(CONFIGS),
    )
    parser.add_argument("--timings", action="store_true")
    args = parser.parse_args()
    sys.exit(run(Path(args.out), args.metrics, args.timings))
