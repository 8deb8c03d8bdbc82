"""Two-level structural entropy on the aggregated multi-relational graph.

All quantities use the omega-weighted aggregate: a vertex degree is
``sum_k omega_k * (relation-k weight incident to it)``, and community volume
and cut weight are built from those degrees.

A community's contribution to the entropy is closed-form in three cached
numbers, which is what makes merge evaluation O(1)::

    H(a) = -(cut/V) log2(vol/V) + (vol log2 vol - sum_i d_i log2 d_i) / V

with ``V`` the graph volume.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence

import numpy as np

from .graph import MultiRelationalGraph

# reductions at or below this are treated as zero (round-off on tied merges)
REDUCTION_TOL = 1e-12


class EntropyError(ValueError):
    pass


def aggregated_degrees(g: MultiRelationalGraph) -> np.ndarray:
    d = np.zeros(g.n)
    for k, (s, t, w) in enumerate(g.edges):
        d += g.omega[k] * (np.bincount(s, weights=w, minlength=g.n) + np.bincount(t, weights=w, minlength=g.n))
    return d


def _xlog2x(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out


def one_dim_entropy(g: MultiRelationalGraph) -> float:
    d = aggregated_degrees(g)
    vol = d.sum()
    if vol <= 0:
        raise EntropyError("empty graph")
    p = d / vol
    return float(-_xlog2x(p).sum())


@dataclass
class CommunityNode:
    id: int
    members: tuple[int, ...]
    vol: float
    cut: float
    sum_dlogd: float


@dataclass
class EncodingTree:
    """Root -> communities -> leaves. ``leaf_of[v]`` indexes ``communities``."""

    n: int
    communities: list[CommunityNode]
    leaf_of: np.ndarray
    vol: float = 0.0
    # (number of communities, entropy) after initialisation and every round
    history: list[tuple[int, float]] = field(default_factory=list)

    @classmethod
    def from_partition(cls, labels: Sequence[int], g: MultiRelationalGraph) -> "EncodingTree":
        """Tree for an arbitrary vertex labelling, stats computed from scratch."""
        labels = np.asarray(labels)
        if labels.shape != (g.n,):
            raise EntropyError(f"partition covers {labels.shape[0]} vertices, graph has {g.n}")
        _, dense = np.unique(labels, return_inverse=True)
        # number communities by smallest member
        first = {}
        for v, c in enumerate(dense.tolist()):
            first.setdefault(c, len(first))
        leaf_of = np.array([first[c] for c in dense.tolist()], dtype=np.int64)
        vol, cut, sdl = community_stats(leaf_of, g)
        members = [[] for _ in range(len(first))]
        for v, c in enumerate(leaf_of.tolist()):
            members[c].append(v)
        comms = [CommunityNode(c, tuple(m), float(vol[c]), float(cut[c]), float(sdl[c]))
                 for c, m in enumerate(members)]
        return cls(n=g.n, communities=comms, leaf_of=leaf_of, vol=float(vol.sum()))

    def labels(self) -> np.ndarray:
        return self.leaf_of.copy()

    def partition(self) -> list[tuple[int, ...]]:
        return [c.members for c in self.communities]

    def to_json(self) -> dict:
        out = {"n": self.n, "vol": self.vol, "entropy": tree_entropy(self), "communities": []}
        for c in self.communities:
            out["communities"].append({
                "id": c.id,
                "members": list(c.members),
                "vol": c.vol,
                "cut": c.cut,
                "entropy": node_entropy(c.vol, c.cut, c.sum_dlogd, self.vol) if self.vol > 0 else 0.0,
            })
        return out

    def write_json(self, fh: IO[str]) -> None:
        json.dump(self.to_json(), fh, indent=1)
        fh.write("\n")

    @classmethod
    def from_json(cls, obj: dict, g: MultiRelationalGraph) -> "EncodingTree":
        labels = np.full(obj["n"], -1, dtype=np.int64)
        for c in obj["communities"]:
            labels[np.asarray(c["members"], dtype=np.int64)] = c["id"]
        if (labels < 0).any():
            raise EntropyError("tree does not cover every vertex")
        return cls.from_partition(labels, g)


def community_stats(labels: np.ndarray, g: MultiRelationalGraph):
    """Volume, cut weight and sum of d log2 d per community, from scratch."""
    labels = np.asarray(labels, dtype=np.int64)
    m = int(labels.max()) + 1 if len(labels) else 0
    d = aggregated_degrees(g)
    vol = np.bincount(labels, weights=d, minlength=m)
    sdl = np.bincount(labels, weights=_xlog2x(d), minlength=m)
    cut = np.zeros(m)
    for k, (s, t, w) in enumerate(g.edges):
        crossing = labels[s] != labels[t]
        ww = g.omega[k] * w[crossing]
        cut += np.bincount(labels[s[crossing]], weights=ww, minlength=m)
        cut += np.bincount(labels[t[crossing]], weights=ww, minlength=m)
    return vol, cut, sdl


def node_entropy(vol, cut, sum_dlogd, vol_g):
    """Entropy carried by one community node and its leaves.

    Works elementwise on arrays; zero-volume communities give 0.
    """
    vol = np.asarray(vol, dtype=float)
    safe = np.where(vol > 0, vol, 1.0)
    h = (-np.asarray(cut) * np.log2(safe / vol_g) + safe * np.log2(safe) - np.asarray(sum_dlogd)) / vol_g
    h = np.where(vol > 0, h, 0.0)
    return float(h) if h.ndim == 0 else h


def tree_entropy(t: EncodingTree) -> float:
    if t.vol <= 0:
        return 0.0
    return float(sum(node_entropy(c.vol, c.cut, c.sum_dlogd, t.vol) for c in t.communities))


def structural_entropy(t: EncodingTree, g: MultiRelationalGraph) -> float:
    """Entropy of ``g`` under ``t``, recomputing every statistic from the graph."""
    if t.n != g.n or len(t.leaf_of) != g.n:
        raise EntropyError(f"tree has {t.n} leaves, graph has {g.n} vertices")
    vol, cut, sdl = community_stats(t.leaf_of, g)
    vol_g = vol.sum()
    if vol_g <= 0:
        return 0.0
    return float(np.sum(node_entropy(vol, cut, sdl, vol_g)))


def _merge_delta_vec(vol_a, vol_b, cut_a, cut_b, sdl_a, sdl_b, cross, vol_g):
    before = node_entropy(vol_a, cut_a, sdl_a, vol_g) + node_entropy(vol_b, cut_b, sdl_b, vol_g)
    after = node_entropy(vol_a + vol_b, np.maximum(cut_a + cut_b - 2 * cross, 0.0), sdl_a + sdl_b, vol_g)
    return after - before


def merge_delta(a: CommunityNode, b: CommunityNode, cross: float, vol_g: float) -> float:
    """Entropy after merging ``a`` and ``b`` minus entropy before.

    Negative values are improvements. ``cross`` is the aggregated weight of
    edges between the two communities.
    """
    if vol_g <= 0:
        raise EntropyError("graph volume must be positive")
    if cross < 0:
        raise EntropyError(f"negative cross weight {cross}")
    slack = 1e-9 * max(1.0, vol_g)
    if cross > min(a.cut, b.cut) + slack or a.cut > a.vol + slack or b.cut > b.vol + slack:
        raise EntropyError("inconsistent community statistics")
    return float(_merge_delta_vec(a.vol, b.vol, a.cut, b.cut, a.sum_dlogd, b.sum_dlogd, cross, vol_g))


def _select(a, b, reduction, current_num: int, p: float) -> np.ndarray:
    pos = reduction > REDUCTION_TOL
    if not pos.any():
        return np.empty(0, dtype=np.int64)
    if pos.sum() == 1:
        keep = pos
    else:
        med = np.median(reduction[pos])
        keep = pos & (reduction > med)
        if not keep.any():
            keep = pos & (reduction >= med)
    idx = np.flatnonzero(keep)
    cap = math.ceil((current_num - 1) * p)
    if cap < len(idx):
        # everything at or above the cap-th largest value, so ties at the
        # boundary are still resolved by (a, b) below
        kth = np.partition(reduction[idx], len(idx) - cap)[len(idx) - cap]
        idx = idx[reduction[idx] >= kth]
    idx = idx[np.lexsort((b[idx], a[idx], -reduction[idx]))]
    idx = idx[:cap]

    used = set()
    chosen = []
    for i, x, y in zip(idx.tolist(), a[idx].tolist(), b[idx].tolist()):
        if x in used or y in used:
            continue
        used.update((x, y))
        chosen.append(i)
    return np.array(chosen, dtype=np.int64)


def select_merges(a, b, reduction, current_num: int, p: float) -> list[tuple[int, int]]:
    """Pick the disjoint community pairs to merge this round.

    Keeps positive reductions above their median (all of the top-tied ones
    when nothing is strictly above), caps the count at
    ``ceil((current_num - 1) * p)``, then drops pairs that touch a community
    already chosen. Ties go to the smaller ``(a, b)``.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    idx = _select(a, b, np.asarray(reduction, dtype=float), current_num, p)
    return list(zip(a[idx].tolist(), b[idx].tolist()))


def optimize_tree(g: MultiRelationalGraph, p: float = 0.15, max_rounds: Optional[int] = None) -> EncodingTree:
    """Greedy parallel merging from the all-singletons partition.

    Community ids are the smallest member vertex; inter-community weights are
    kept as ``(a, b, weight)`` arrays; after a round only pairs touching a
    merged community are re-aggregated and re-scored.
    """
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    n = g.n
    d = aggregated_degrees(g)
    vol_g = float(d.sum())
    vol = d.copy()
    cut = d.copy()
    sdl = _xlog2x(d)
    owner = np.arange(n)
    alive = np.ones(n, dtype=bool)
    pa, pb, pc = g.aggregated_pairs()

    def current_entropy():
        return float(np.sum(node_entropy(vol[alive], cut[alive], sdl[alive], vol_g))) if vol_g > 0 else 0.0

    n_comms = n
    history = [(n_comms, current_entropy())]
    rounds = 0
    red = -_merge_delta_vec(vol[pa], vol[pb], cut[pa], cut[pb], sdl[pa], sdl[pb], pc, vol_g)
    while len(pa) and (max_rounds is None or rounds < max_rounds):
        idx = _select(pa, pb, red, n_comms, p)
        if len(idx) == 0:
            break
        xs, ys, cross = pa[idx], pb[idx], pc[idx]
        vol[xs] += vol[ys]
        cut[xs] = np.maximum(cut[xs] + cut[ys] - 2 * cross, 0.0)
        sdl[xs] += sdl[ys]
        alive[ys] = False
        n_comms -= len(idx)

        remap = np.arange(n)
        remap[ys] = xs
        owner = remap[owner]
        # only pairs with a merged endpoint change; the rest keep their
        # weight and reduction, and cannot collide with the rewritten ones
        merged = np.zeros(n, dtype=bool)
        merged[xs] = merged[ys] = True
        touched = merged[pa] | merged[pb]
        a2, b2, c2 = remap[pa[touched]], remap[pb[touched]], pc[touched]
        outside = a2 != b2
        lo = np.minimum(a2, b2)[outside]
        hi = np.maximum(a2, b2)[outside]
        keys, inv = np.unique(lo * n + hi, return_inverse=True)
        na, nb = keys // n, keys % n
        nc = np.bincount(inv, weights=c2[outside], minlength=len(keys))
        nred = -_merge_delta_vec(vol[na], vol[nb], cut[na], cut[nb], sdl[na], sdl[nb], nc, vol_g)
        keep = ~touched
        pa = np.concatenate((pa[keep], na))
        pb = np.concatenate((pb[keep], nb))
        pc = np.concatenate((pc[keep], nc))
        red = np.concatenate((red[keep], nred))
        rounds += 1
        history.append((n_comms, current_entropy()))

    ids = np.flatnonzero(alive)
    new_id = np.full(n, -1, dtype=np.int64)
    new_id[ids] = np.arange(len(ids))
    leaf_of = new_id[owner]
    members = [[] for _ in ids]
    for v, c in enumerate(leaf_of.tolist()):
        members[c].append(v)
    comms = [CommunityNode(i, tuple(m), float(vol[old]), float(cut[old]), float(sdl[old]))
             for i, (old, m) in enumerate(zip(ids.tolist(), members))]
    return EncodingTree(n=n, communities=comms, leaf_of=leaf_of, vol=vol_g, history=history)
