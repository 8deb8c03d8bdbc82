"""Community scoring: influence share blended with cohesion share."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Mapping, Optional

import numpy as np

from .entropy import EncodingTree, aggregated_degrees, community_stats
from .graph import MultiRelationalGraph

RESIDUAL = -1  # id of the community holding all degree-0 users


@dataclass
class CommunityVerdict:
    id: int
    influence: float
    cohesion: float
    ev: float
    label: str
    root_influence: float = 0.0
    cohesion_total: float = 0.0

    def to_json(self) -> dict:
        return asdict(self)


def community_influence(t: EncodingTree, x) -> dict[int, float]:
    x = np.asarray(x, dtype=float)
    if len(x) != t.n:
        raise ValueError(f"x has {len(x)} entries, tree has {t.n} leaves")
    return {c.id: float(x[list(c.members)].mean()) for c in t.communities}


def community_cohesion(t: EncodingTree, g: MultiRelationalGraph) -> dict[int, float]:
    vol, cut, _ = community_stats(t.leaf_of, g)
    vol_g = vol.sum()
    out = {}
    for c in t.communities:
        v, g_c = vol[c.id], cut[c.id]
        if vol_g <= 0 or v <= 0 or g_c <= 0:
            out[c.id] = 0.0
        else:
            out[c.id] = float(-(g_c / vol_g) * np.log2(v / vol_g))
    return out


def score_and_label(influences: Mapping[int, float], cohesions: Mapping[int, float],
                    pi: float = 0.4, theta: float = 1.0,
                    root_influence: Optional[float] = None) -> list[CommunityVerdict]:
    """Ev = (1 - pi) * influence / root + pi * cohesion / sum(cohesion); bot iff Ev > theta.

    ``root_influence`` defaults to the size-unweighted mean of ``influences``
    only when not given; callers with the per-user vector should pass
    ``mean(x)``.
    """
    if not 0 <= pi <= 1:
        raise ValueError("pi must lie in [0, 1]")
    if root_influence is None:
        root_influence = float(np.mean(list(influences.values())))
    total = float(sum(cohesions.values()))
    verdicts = []
    for cid, inf in influences.items():
        share = inf / root_influence if root_influence > 0 else 0.0
        coh = cohesions.get(cid, 0.0)
        coh_share = coh / total if total > 0 else 0.0
        ev = (1 - pi) * share + pi * coh_share
        verdicts.append(CommunityVerdict(cid, inf, coh, ev, "bot" if ev > theta else "human",
                                         root_influence=root_influence, cohesion_total=total))
    return verdicts


def label_tree(t: EncodingTree, g: MultiRelationalGraph, x, pi: float = 0.4,
               theta: float = 1.0) -> tuple[list[CommunityVerdict], np.ndarray]:
    """Score every community of ``t`` and return (verdicts, per-user community id).

    Degree-0 users are pulled out into one residual community that is always
    labelled human.
    """
    x = np.asarray(x, dtype=float)
    isolated = aggregated_degrees(g) <= 0
    labels = t.leaf_of.copy()
    if isolated.any():
        labels[isolated] = RESIDUAL
    influences = {}
    cohesions = community_cohesion(t, g)
    for c in t.communities:
        members = [v for v in c.members if not isolated[v]]
        if members:
            influences[c.id] = float(x[members].mean())
    if isolated.any():
        influences[RESIDUAL] = float(x[isolated].mean())
        cohesions[RESIDUAL] = 0.0
    cohesions = {cid: cohesions.get(cid, 0.0) for cid in influences}
    verdicts = score_and_label(influences, cohesions, pi, theta, root_influence=float(x.mean()))
    for v in verdicts:
        if v.id == RESIDUAL:
            v.label = "human"
    return verdicts, labels


def user_scores(verdicts, labels) -> tuple[np.ndarray, list[str]]:
    """Every user inherits the Ev and label of its community."""
    by_id = {v.id: v for v in verdicts}
    ev = np.array([by_id[c].ev for c in labels.tolist()])
    lab = [by_id[c].label for c in labels.tolist()]
    return ev, lab
