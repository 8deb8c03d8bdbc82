"""Detection quality and runtime on synthetic corpora over several seeds.

    python scripts/synthetic_benchmark.py --bots 200 --humans 100 --seeds 0-19
"""
import argparse
import time

import numpy as np

from sebot.config import PRESETS, resolve_config
from sebot.pipeline import run_detect
from sebot.synthetic import gen_synthetic


def seed_range(text):
    lo, _, hi = text.partition("-")
    return range(int(lo), int(hi or lo) + 1)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bots", type=int, default=200)
    ap.add_argument("--humans", type=int, default=100)
    ap.add_argument("--seeds", type=seed_range, default=seed_range("0-9"))
    ap.add_argument("--preset", choices=sorted(PRESETS), default="default")
    args = ap.parse_args()

    cfg = resolve_config(args.preset)
    rows = []
    print(f"{'seed':>4} {'comms':>5} {'acc':>6} {'prec':>6} {'rec':>6} {'f1':>6} {'auc':>6} {'sec':>6}")
    for seed in args.seeds:
        recs = gen_synthetic(args.bots, args.humans, seed)
        t0 = time.perf_counter()
        det = run_detect(recs, cfg)
        dt = time.perf_counter() - t0
        m = det.metrics
        rows.append((m.acc, m.precision, m.recall, m.f1, m.auc, dt))
        print(f"{seed:>4} {len(det.verdicts):>5} {m.acc:6.3f} {m.precision:6.3f} {m.recall:6.3f} "
              f"{m.f1:6.3f} {m.auc:6.3f} {dt:6.2f}")
    mean = np.mean(rows, axis=0)
    print(f"{'mean':>4} {'':>5} " + " ".join(f"{v:6.3f}" for v in mean[:5]) + f" {mean[5]:6.2f}")


if __name__ == "__main__":
    main()
