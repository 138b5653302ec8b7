"""Regenerates the shipped results/ tree from the sweep configs.

Each figure directory gets summary.csv plus topology/paths dumps; the burst
figure also gets per-slot traces (trace_burst.csv). The plotting frontend
consumes these files as-is.

Usage: python3 scripts/make_results.py [--workers N] [--out DIR]
"""

import argparse
import pathlib
import sys

from iabsim.cli import main as cli_main

REPO = pathlib.Path(__file__).resolve().parent.parent

FIGS = [
    ("fig3_resilience", "sweep"),
    ("fig4_burst", "burst"),
    ("fig5_scalability", "sweep"),
    ("fig6_traffic", "sweep"),
]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out", default=str(REPO / "results"))
    args = ap.parse_args(argv)
    for name, cmd in FIGS:
        cfg = REPO / "sweeps" / f"{name}.cfg"
        out = pathlib.Path(args.out) / name
        print(f"{cmd} {cfg.name} -> {out}")
        rc = cli_main([cmd, "--config", str(cfg), "--out", str(out),
                       "--workers", str(args.workers), "--quiet"])
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
