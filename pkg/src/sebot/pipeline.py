"""End-to-end detection: records -> graph -> communities -> co-ranking -> labels."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import PipelineConfig
from .entropy import EncodingTree, optimize_tree
from .evaluation import Metrics, confusion_metrics, roc_points
from .graph import MultiRelationalGraph, build_graph
from .ingest import UserRecord, features_for
from .label import CommunityVerdict, label_tree, user_scores
from .multirank import StationaryDistribution, iterate_stationary, tensorize

logger = logging.getLogger(__name__)


class NoUsersError(ValueError):
    pass


@dataclass
class Detection:
    records: list[UserRecord]
    graph: MultiRelationalGraph
    tree: EncodingTree
    stationary: StationaryDistribution
    verdicts: list[CommunityVerdict]
    community_of: np.ndarray
    ev: np.ndarray
    labels: list[str]
    config: PipelineConfig
    metrics: Optional[Metrics] = None
    roc: Optional[list[tuple[float, float]]] = None
    n_dropped: int = 0

    def to_json(self) -> dict:
        sizes = {}
        for c in self.community_of.tolist():
            sizes[c] = sizes.get(c, 0) + 1
        users = []
        for r, c, ev, lab in zip(self.records, self.community_of.tolist(), self.ev.tolist(), self.labels):
            u = {"id": r.id, "community": c, "ev": ev, "label": lab}
            if r.truth_label is not None:
                u["truth_label"] = r.truth_label
            users.append(u)
        out = {
            "config": self.config.to_json(),
            "summary": {
                "users": len(self.records),
                "dropped": self.n_dropped,
                "edges": self.graph.n_edges(),
                "communities": len(self.verdicts),
                "entropy": self.tree.history[-1][1] if self.tree.history else None,
                "merge_rounds": max(len(self.tree.history) - 1, 0),
                "multirank_iterations": self.stationary.iterations,
                "y": self.stationary.y.tolist(),
            },
            "communities": [
                {"id": v.id, "size": sizes[v.id], "influence": v.influence, "cohesion": v.cohesion,
                 "ev": v.ev, "label": v.label}
                for v in sorted(self.verdicts, key=lambda v: v.id)
            ],
            "users": users,
        }
        if self.metrics is not None:
            out["metrics"] = self.metrics.to_json()
        return out


def run_detect(records: Sequence[UserRecord], cfg: PipelineConfig = PipelineConfig(),
               threads: Optional[int] = None) -> Detection:
    kept, feats = features_for(records)
    if not kept:
        raise NoUsersError("no valid users")
    g = build_graph(feats, cfg.graph_config(), threads=threads)
    logger.info("graph: %d users, edges per relation %s", g.n, g.n_edges())
    tree = optimize_tree(g, cfg.p)
    logger.info("encoding tree: %d communities after %d rounds", len(tree.communities), len(tree.history) - 1)
    stationary = iterate_stationary(tensorize(g, weighted=cfg.weighted_tensor), cfg.rho,
                                    max_iter=cfg.max_iter)
    verdicts, community_of = label_tree(tree, g, stationary.x, cfg.pi, cfg.theta)
    ev, labels = user_scores(verdicts, community_of)

    det = Detection(kept, g, tree, stationary, verdicts, community_of, ev, labels, cfg,
                    n_dropped=len(records) - len(kept))
    truth_idx = [i for i, r in enumerate(kept) if r.truth_label is not None]
    if truth_idx:
        truth = [kept[i].truth_label for i in truth_idx]
        m = confusion_metrics([labels[i] for i in truth_idx], truth)
        if len(set(truth)) == 2:
            det.roc, m.auc = roc_points(ev[truth_idx], truth)
        det.metrics = m
    return det
