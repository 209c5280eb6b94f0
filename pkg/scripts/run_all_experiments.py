"""Run every bundled config through the CLI and write CSVs to results/.

    python scripts/run_all_experiments.py [--out-dir results]
"""

import argparse
import sys
import time
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from tfgkp.cli import main as cli_main  # noqa: E402
from tfgkp.config import EXPERIMENTS  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default=str(ROOT / "results"))
    args = ap.parse_args()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    worst = 0
    for exp in EXPERIMENTS:
        start = time.perf_counter()
        code = cli_main([exp, "--config", str(ROOT / "configs" / f"{exp}.json"), "--out", str(out_dir / f"{exp}.csv")])
        print(f"{exp:14s} exit {code}  {time.perf_counter() - start:6.2f} s  -> {out_dir / f'{exp}.csv'}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
