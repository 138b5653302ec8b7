"""Times the pure-Python kernel against the compiled lane on one scenario
and asserts the two produce bit-identical results before reporting.

Usage: python3 benchmarks/bench_kernel.py [--horizon N] [--ue-count N]
       [--repeats N] [--seed N]
"""

import argparse
import dataclasses
import sys
import time

import numpy as np

from iabsim.config import ScenarioConfig
from iabsim.engine import run_simulation
from iabsim.kernel import compiled_available


def time_lane(cfg: ScenarioConfig, lane: str, repeats: int):
    best = float("inf")
    res = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        res = run_simulation(cfg, lane=lane)
        best = min(best, time.perf_counter() - t0)
    return best, res


def assert_parity(a, b) -> None:
    for name in ("age_tr", "occ_tr", "gen_tr", "arr_tr", "drop_tr", "totq_tr",
                 "ovf_tr", "act_tr", "fail_tr", "generated_distinct",
                 "delivered_distinct"):
        assert np.array_equal(getattr(a.raw, name), getattr(b.raw, name)), name
    for name in ("generated_instances", "arrived_instances", "dropped",
                 "overflow_events", "dedup_discarded", "failed_attempts",
                 "final_in_queue"):
        assert getattr(a.raw, name) == getattr(b.raw, name), name


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizon", type=int, default=10000)
    ap.add_argument("--ue-count", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    cfg = dataclasses.replace(ScenarioConfig(), horizon=args.horizon,
                              ue_count=args.ue_count, seed=args.seed)
    t_py, res_py = time_lane(cfg, "py", args.repeats)
    line = f"py lane    {t_py * 1000:10.1f} ms"
    print(f"scenario: T={cfg.horizon} ue={cfg.ue_count} seed={cfg.seed}"
          f" policy={cfg.policy} ({args.repeats} repeats, best shown)")
    print(line)
    if not compiled_available():
        print("c lane     not built (pip install -e . compiles it)")
        return 0
    t_c, res_c = time_lane(cfg, "c", args.repeats)
    assert_parity(res_py, res_c)
    print(f"c lane     {t_c * 1000:10.1f} ms")
    print(f"speedup    {t_py / t_c:10.1f} x (lanes bit-identical)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
