"""Co-ranking of users and relations by tensor power iteration.

The transition tensors are never materialised densely. Two fallbacks of
the normalised tensors are applied analytically instead:

* a vertex with no relation-k edge moves uniformly to all ``n`` vertices
  under relation k (``o = 1/n``);
* an ordered pair ``i != j`` with no edge in any relation splits evenly
  over the three relations (``s = 1/3``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .graph import MultiRelationalGraph


class ConvergenceError(RuntimeError):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"no convergence after {iterations} iterations (last residual {residual:.3g})")


@dataclass
class TransitionTensors:
    n: int
    adjacency: list[sp.csr_matrix]  # a(., ., k), symmetric
    o: list[sp.csr_matrix]  # row-normalised per relation; dangling rows are empty
    o_dangling: list[np.ndarray]  # boolean mask per relation
    s: list[sp.csr_matrix]  # s(., ., k) on connected pairs only
    connected: sp.csr_matrix  # 1 where some relation links i and j


@dataclass
class StationaryDistribution:
    x: np.ndarray
    y: np.ndarray
    iterations: int
    residual: float

    def to_json(self, ids: Optional[Sequence[str]] = None) -> dict:
        ids = list(ids) if ids is not None else [str(i) for i in range(len(self.x))]
        return {
            "x": [[uid, float(v)] for uid, v in zip(ids, self.x)],
            "y": [float(v) for v in self.y],
            "iterations": self.iterations,
            "residual": self.residual,
        }

    def write_json(self, fh: IO[str], ids=None) -> None:
        json.dump(self.to_json(ids), fh, indent=1)
        fh.write("\n")


def tensorize(g: MultiRelationalGraph, weighted: bool = False) -> TransitionTensors:
    """Build the normalised tensors. ``weighted=True`` uses edge weights instead of 0/1."""
    n = g.n
    adjacency = [g.relation_matrix(k, weighted=weighted) for k in range(3)]
    o, dangling = [], []
    for a in adjacency:
        rowsum = np.asarray(a.sum(axis=1)).ravel()
        dangling.append(rowsum == 0)
        inv = np.divide(1.0, rowsum, out=np.zeros(n), where=rowsum > 0)
        o.append(sp.diags(inv) @ a)
    total = adjacency[0] + adjacency[1] + adjacency[2]
    total.sum_duplicates()
    total = total.tocsr()
    inv_total = total.copy()
    inv_total.data = 1.0 / inv_total.data
    s = [a.multiply(inv_total).tocsr() for a in adjacency]
    connected = total.copy()
    connected.data = np.ones_like(connected.data)
    return TransitionTensors(n=n, adjacency=adjacency, o=[m.tocsr() for m in o],
                             o_dangling=dangling, s=s, connected=connected)


def step(t: TransitionTensors, x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One coupled update of (x, y), renormalised to sum 1 each."""
    n = t.n
    x_new = np.zeros(n)
    for k in range(3):
        x_new += y[k] * (t.o[k].T @ x)
        x_new += y[k] * x[t.o_dangling[k]].sum() / n

    y_new = np.empty(3)
    for k in range(3):
        y_new[k] = x @ (t.s[k] @ x)
    linked = x @ (t.connected @ x)
    unlinked = x.sum() ** 2 - (x * x).sum() - linked
    y_new += max(unlinked, 0.0) / 3.0

    x_new /= x_new.sum()
    ysum = y_new.sum()
    # a single vertex has no ordered pairs, so relation mass is undefined
    y_new = y_new / ysum if ysum > 0 else y.copy()
    return x_new, y_new


def iterate_stationary(t: TransitionTensors, rho: float = 0.004, max_iter: int = 10_000,
                       x0: Optional[np.ndarray] = None, y0: Optional[np.ndarray] = None) -> StationaryDistribution:
    if rho <= 0:
        raise ValueError("rho must be positive")
    if t.n < 1:
        raise ValueError("need at least one vertex")
    x = np.full(t.n, 1.0 / t.n) if x0 is None else np.asarray(x0, float) / np.sum(x0)
    y = np.full(3, 1.0 / 3) if y0 is None else np.asarray(y0, float) / np.sum(y0)
    if (x <= 0).any() or (y <= 0).any():
        raise ValueError("initial distributions must be strictly positive")
    residual = np.inf
    for it in range(1, max_iter + 1):
        x_new, y_new = step(t, x, y)
        residual = float(np.abs(x_new - x).sum() + np.abs(y_new - y).sum())
        x, y = x_new, y_new
        if residual < rho:
            return StationaryDistribution(x=x, y=y, iterations=it, residual=residual)
    raise ConvergenceError(max_iter, residual)
