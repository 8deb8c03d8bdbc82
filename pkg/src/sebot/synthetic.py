"""Synthetic labelled corpora for desk-scale runs.

Bots are drawn from a handful of tight archetypes: one dominant post type,
low received engagement, and many more followings than followers. Humans get
broad, independent draws for every feature.
"""
from __future__ import annotations

from dataclasses import replace

import numpy as np

from .ingest import UserRecord

# (post-type mix, engagement per original tweet, following, followers);
# bot types share the same low engagement level and differ elsewhere
ARCHETYPES = (
    ((0.04, 0.92, 0.04), 0.8, 1800, 70),   # retweet amplifier
    ((0.88, 0.06, 0.06), 0.8, 900, 20),    # original-post spammer
    ((0.10, 0.15, 0.75), 0.8, 2500, 200),  # reply bot
)
JITTER = 0.015


def _split_engagement(rng, total):
    share = rng.dirichlet((2.0, 4.0, 2.0))
    return [round(float(v), 4) for v in total * share]


def _bot(rng, uid, archetype):
    mix, engagement, following, followers = archetype
    n_posts = int(rng.integers(800, 3000))
    mix = np.asarray(mix) * (1 + rng.uniform(-JITTER, JITTER, 3))
    counts = np.round(mix / mix.sum() * n_posts).astype(int)
    comments, likes, retweets = _split_engagement(rng, engagement * (1 + rng.uniform(-JITTER, JITTER)))
    return UserRecord(
        id=uid,
        n_original=int(counts[0]), n_retweet=int(counts[1]), n_comment=int(counts[2]),
        avg_comments_recv=comments, avg_likes_recv=likes, avg_retweets_recv=retweets,
        n_following=int(round(following * (1 + rng.uniform(-JITTER, JITTER)))),
        n_followers=int(round(followers * (1 + rng.uniform(-JITTER, JITTER)))),
        truth_label="bot",
    )


def _human(rng, uid):
    n_posts = int(rng.integers(20, 3000))
    counts = rng.multinomial(n_posts, rng.dirichlet((1.0, 1.0, 1.0)))
    if counts.sum() == 0:
        counts[0] = 1
    comments, likes, retweets = _split_engagement(rng, float(rng.lognormal(2.5, 1.5)))
    followers = int(rng.lognormal(5.0, 1.5))
    following = int(followers * rng.lognormal(-0.3, 0.8))
    return UserRecord(
        id=uid,
        n_original=int(counts[0]), n_retweet=int(counts[1]), n_comment=int(counts[2]),
        avg_comments_recv=comments, avg_likes_recv=likes, avg_retweets_recv=retweets,
        n_following=following, n_followers=followers,
        truth_label="human",
    )


def gen_synthetic(n_bots: int, n_humans: int, seed: int = 0, n_archetypes: int = 2) -> list[UserRecord]:
    if n_bots < 0 or n_humans < 0 or n_bots + n_humans < 2:
        raise ValueError("need at least two users")
    if not 1 <= n_archetypes <= len(ARCHETYPES):
        raise ValueError(f"n_archetypes must be in 1..{len(ARCHETYPES)}")
    rng = np.random.default_rng(seed)
    users = [_bot(rng, "", ARCHETYPES[i % n_archetypes]) for i in range(n_bots)]
    users += [_human(rng, "") for _ in range(n_humans)]
    order = rng.permutation(len(users))
    # ids are assigned after shuffling so they carry no label information
    return [replace(users[i], id=f"u{pos:05d}") for pos, i in enumerate(order)]
