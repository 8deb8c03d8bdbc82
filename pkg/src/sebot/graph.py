"""Three-relation behavioural similarity graph.

Relations, in storage order (``k = 0, 1, 2``; dumped 1-based):

* U-T-U: posting-type distributions within Manhattan distance ``xi``
* U-I-U: posting influences within deviation ratio ``xi``
* U-F-U: follow-to-follower ratios within deviation ratio ``xi``, both above ``phi``
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .ingest import BehaviorFeatures

RELATIONS = ("U-T-U", "U-I-U", "U-F-U")


@dataclass(frozen=True)
class GraphConfig:
    xi: float = 0.1
    phi: float = 1.0
    omega: tuple[float, float, float] = (1.0, 1.0, 1.0)
    # per-relation override of xi, e.g. (0.1, 0.05, 0.1)
    xi_per_relation: Optional[tuple[float, float, float]] = None

    def __post_init__(self):
        for x in self.thresholds():
            if not 0 < x < 1:
                raise ValueError(f"xi must lie in (0, 1), got {x}")
        if self.phi < 0:
            raise ValueError("phi must be >= 0")
        if len(self.omega) != 3 or any(w <= 0 for w in self.omega):
            raise ValueError("omega needs three positive weights")

    def thresholds(self) -> tuple[float, float, float]:
        if self.xi_per_relation is not None:
            return tuple(float(x) for x in self.xi_per_relation)
        return (self.xi, self.xi, self.xi)


@dataclass
class MultiRelationalGraph:
    """Undirected graph with one edge list per relation.

    Each edge list is ``(src, dst, weight)`` arrays with ``src < dst``,
    sorted by ``(src, dst)``.
    """

    n: int
    edges: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    omega: np.ndarray = field(default_factory=lambda: np.ones(3))

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        if len(self.edges) != 3:
            raise ValueError("expected three relations")
        self.edges = [
            (np.asarray(s, dtype=np.int64), np.asarray(d, dtype=np.int64), np.asarray(w, dtype=float))
            for s, d, w in self.edges
        ]

    @classmethod
    def from_edge_list(cls, n: int, edges: Sequence[tuple[int, int, int, float]], omega=(1.0, 1.0, 1.0)):
        """Build from ``(i, j, k, w)`` tuples with 0-based relation ``k``."""
        per = [[] for _ in range(3)]
        seen = set()
        for i, j, k, w in edges:
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            i, j = min(i, j), max(i, j)
            if not (0 <= i and j < n):
                raise ValueError(f"edge ({i}, {j}) outside 0..{n - 1}")
            if (i, j, k) in seen:
                raise ValueError(f"duplicate edge ({i}, {j}) in relation {k}")
            if not 0 < w <= 1:
                raise ValueError(f"weight {w} outside (0, 1]")
            seen.add((i, j, k))
            per[k].append((i, j, w))
        out = []
        for lst in per:
            lst.sort()
            arr = np.array(lst, dtype=float).reshape(-1, 3)
            out.append((arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2]))
        return cls(n=n, edges=out, omega=np.asarray(omega, dtype=float))

    def n_edges(self) -> list[int]:
        return [len(w) for _, _, w in self.edges]

    def iter_edges(self):
        """Yield ``(i, j, k, w)`` in relation, then (i, j) order."""
        for k, (s, d, w) in enumerate(self.edges):
            for i, j, x in zip(s.tolist(), d.tolist(), w.tolist()):
                yield i, j, k, x

    def relation_matrix(self, k: int, weighted: bool = True) -> sp.csr_matrix:
        """Symmetric n x n sparse matrix of relation ``k``."""
        s, d, w = self.edges[k]
        vals = w if weighted else np.ones_like(w)
        m = sp.coo_matrix((np.r_[vals, vals], (np.r_[s, d], np.r_[d, s])), shape=(self.n, self.n))
        return m.tocsr()

    def aggregated_matrix(self) -> sp.csr_matrix:
        """Symmetric matrix of omega-weighted pair weights summed over relations."""
        total = sp.csr_matrix((self.n, self.n))
        for k in range(3):
            total = total + self.omega[k] * self.relation_matrix(k)
        total.sum_duplicates()
        return total.tocsr()

    def aggregated_pairs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Aggregated weight per connected pair ``i < j``, sorted by (i, j)."""
        m = sp.triu(self.aggregated_matrix(), k=1).tocoo()
        order = np.lexsort((m.col, m.row))
        return m.row[order].astype(np.int64), m.col[order].astype(np.int64), m.data[order]

    def write_tsv(self, fh: IO[str]) -> None:
        for i, j, k, w in self.iter_edges():
            fh.write(f"{i}\t{j}\t{k + 1}\t{w:.9g}\n")


def posting_type_weight(pt_i, pt_j, xi: float) -> Optional[float]:
    d = float(np.abs(np.asarray(pt_i, dtype=float) - np.asarray(pt_j, dtype=float)).sum())
    return 1.0 - d if d < xi else None


def _deviation(a, b):
    """|a - b| / max(a, b) with 0/0 taken as 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    hi = np.maximum(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        dev = np.abs(a - b) / hi
    return np.where(hi > 0, dev, 0.0)


def influence_weight(inf_i: float, inf_j: float, xi: float) -> Optional[float]:
    dev = float(_deviation(inf_i, inf_j))
    return 1.0 - dev if dev < xi else None


def ff_weight(ff_i: float, ff_j: float, xi: float, phi: float) -> Optional[float]:
    if not (ff_i > phi and ff_j > phi):
        return None
    dev = float(_deviation(ff_i, ff_j))
    return 1.0 - dev if dev < xi else None


def _row_block(rows, pt, inf, ff, xi, phi):
    n = len(inf)
    out = [([], [], []) for _ in range(3)]
    for i in rows:
        j = np.arange(i + 1, n)
        if len(j) == 0:
            continue
        d_pt = np.abs(pt[j] - pt[i]).sum(axis=1)
        d_inf = _deviation(inf[i], inf[j])
        d_ff = _deviation(ff[i], ff[j])
        masks = (
            d_pt < xi[0],
            d_inf < xi[1],
            (d_ff < xi[2]) & (ff[j] > phi) & (ff[i] > phi),
        )
        for k, (dist, mask) in enumerate(zip((d_pt, d_inf, d_ff), masks)):
            if mask.any():
                out[k][0].append(np.full(mask.sum(), i, dtype=np.int64))
                out[k][1].append(j[mask])
                out[k][2].append(1.0 - dist[mask])
    return out


def build_graph(features: Sequence[BehaviorFeatures], cfg: GraphConfig = GraphConfig(),
                threads: Optional[int] = None) -> MultiRelationalGraph:
    """Evaluate all three weight rules on every unordered pair.

    Rows are split into contiguous blocks across ``threads`` workers; blocks
    are concatenated in row order so the result does not depend on the
    worker count.
    """
    if len(features) == 0:
        raise ValueError("no users to build a graph from")
    n = len(features)
    pt = np.vstack([f.pt for f in features]).astype(float)
    inf = np.array([f.inf for f in features], dtype=float)
    ff = np.array([f.ff for f in features], dtype=float)
    xi = cfg.thresholds()

    threads = max(1, threads or os.cpu_count() or 1)
    n_blocks = min(n, threads * 4)
    blocks = [b for b in np.array_split(np.arange(n), n_blocks) if len(b)]
    if threads == 1 or len(blocks) == 1:
        parts = [_row_block(b, pt, inf, ff, xi, cfg.phi) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: _row_block(b, pt, inf, ff, xi, cfg.phi), blocks))

    edges = []
    for k in range(3):
        cols = [[], [], []]
        for part in parts:
            for c in range(3):
                cols[c].extend(part[k][c])
        if cols[0]:
            edges.append(tuple(np.concatenate(c) for c in cols))
        else:
            edges.append((np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0)))
    return MultiRelationalGraph(n=n, edges=edges, omega=np.asarray(cfg.omega, dtype=float))
