"""Run every scenario in scripts/configs through the CLI and tabulate exit codes.

    python scripts/run_configs.py [--out runs] [--threads 4]
"""

import argparse
import logging
import time
from pathlib import Path

from specdet import config as cfg
from specdet.cli import run
from specdet.errors import SpecDetError

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs"))
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    for path in sorted((HERE / "configs").glob("*.ini")):
        t0 = time.perf_counter()
        try:
            status, files = run(cfg.load(path), out=args.out, threads=args.threads)
        except SpecDetError as exc:
            status, files = 1, []
            logging.warning("%s: %s", path.name, exc)
        print(f"{path.name:36s} exit {status}  {time.perf_counter() - t0:6.1f}s  {len(files)} file(s)")


if __name__ == "__main__":
    main()
