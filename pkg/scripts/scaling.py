"""Wall-clock time per pipeline stage as the corpus grows.

    python scripts/scaling.py --sizes 300 1000 3000
"""
import argparse
import time

from sebot.entropy import optimize_tree
from sebot.graph import build_graph
from sebot.ingest import features_for
from sebot.label import label_tree
from sebot.multirank import iterate_stationary, tensorize
from sebot.synthetic import gen_synthetic


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[300, 1000, 3000])
    ap.add_argument("--threads", type=int)
    args = ap.parse_args()
    print(f"{'users':>6} {'edges':>9} {'graph':>7} {'tree':>7} {'rank':>7} {'label':>7} {'comms':>6}")
    for n in args.sizes:
        _, feats = features_for(gen_synthetic(2 * n // 3, n - 2 * n // 3, seed=0))
        t0 = time.perf_counter()
        g = build_graph(feats, threads=args.threads)
        t1 = time.perf_counter()
        tree = optimize_tree(g)
        t2 = time.perf_counter()
        sd = iterate_stationary(tensorize(g))
        t3 = time.perf_counter()
        label_tree(tree, g, sd.x)
        t4 = time.perf_counter()
        print(f"{n:>6} {sum(g.n_edges()):>9} {t1 - t0:7.2f} {t2 - t1:7.2f} {t3 - t2:7.2f} {t4 - t3:7.2f} "
              f"{len(tree.communities):>6}")


if __name__ == "__main__":
    main()
