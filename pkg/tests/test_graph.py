import io
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sebot.graph import (GraphConfig, MultiRelationalGraph, build_graph, ff_weight, influence_weight,
                         posting_type_weight)
from sebot.ingest import BehaviorFeatures


def feat(pt=(1, 0, 0), inf=1.0, ff=2.0):
    return BehaviorFeatures(np.asarray(pt, dtype=float), inf, ff)


def test_posting_type_weight():
    assert posting_type_weight([1, 0, 0], [1, 0, 0], 0.1) == 1
    assert posting_type_weight([0.5, 0.3, 0.2], [0.46, 0.34, 0.2], 0.1) == pytest.approx(0.92, abs=1e-12)
    assert posting_type_weight([1, 0, 0], [0, 1, 0], 0.1) is None


def test_influence_weight():
    assert influence_weight(10, 10, 0.1) == 1
    assert influence_weight(10, 9.5, 0.1) == pytest.approx(0.95, abs=1e-12)
    assert influence_weight(0, 0, 0.1) == 1
    assert influence_weight(0, 3, 0.1) is None


def test_ff_weight():
    assert ff_weight(5, 5, 0.1, 1.0) == 1
    assert ff_weight(5, 4.8, 0.1, 1.0) == pytest.approx(0.96, abs=1e-12)
    assert ff_weight(0.5, 0.5, 0.1, 1.0) is None
    # both must clear the floor strictly
    assert ff_weight(1.0, 1.0, 0.1, 1.0) is None


def test_threshold_is_strict():
    assert influence_weight(10, 9, 0.1) is None  # deviation exactly 0.1


pts = st.lists(st.floats(0, 1), min_size=3, max_size=3).filter(lambda v: sum(v) > 0).map(
    lambda v: np.asarray(v) / sum(v))
pos = st.floats(0, 1e6)
xis = st.floats(0.001, 0.999)


@given(pts, pts, pos, pos, st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), xis, st.floats(0, 5))
def test_symmetry_and_threshold_coherence(p1, p2, i1, i2, f1, f2, xi, phi):
    pairs = [
        (posting_type_weight(p1, p2, xi), posting_type_weight(p2, p1, xi)),
        (influence_weight(i1, i2, xi), influence_weight(i2, i1, xi)),
        (ff_weight(f1, f2, xi, phi), ff_weight(f2, f1, xi, phi)),
    ]
    for a, b in pairs:
        assert a == b
        if a is not None:
            assert 1 - xi < a <= 1


def test_identical_users_complete_graph():
    g = build_graph([feat()] * 3, GraphConfig())
    assert g.n_edges() == [3, 3, 3]
    for _, _, w in g.edges:
        assert (w == 1).all()


def test_pt_only_difference():
    g = build_graph([feat(pt=(1, 0, 0)), feat(pt=(0.75, 0.25, 0))], GraphConfig(xi=0.1))
    assert g.n_edges() == [0, 1, 1]


def test_single_user():
    g = build_graph([feat()])
    assert g.n == 1 and g.n_edges() == [0, 0, 0]


def test_empty_rejected():
    with pytest.raises(ValueError):
        build_graph([])


def test_config_defaults_and_validation():
    cfg = GraphConfig()
    assert (cfg.xi, cfg.phi, cfg.omega) == (0.1, 1.0, (1.0, 1.0, 1.0))
    assert GraphConfig(xi_per_relation=(0.1, 0.2, 0.3)).thresholds() == (0.1, 0.2, 0.3)
    for bad in (dict(xi=0), dict(xi=1), dict(phi=-1), dict(omega=(1, 0, 1))):
        with pytest.raises(ValueError):
            GraphConfig(**bad)


def random_features(rng, n):
    out = []
    for _ in range(n):
        out.append(feat(rng.dirichlet((1, 1, 1)) if rng.random() < 0.7 else (1, 0, 0),
                        float(rng.choice([0.0, 1.0, rng.uniform(0, 3)])),
                        float(rng.choice([2.0, rng.uniform(0.2, 4)]))))
    return out


@pytest.mark.parametrize("seed", range(10))
def test_build_matches_pairwise_scan(seed):
    rng = np.random.default_rng(seed)
    feats = random_features(rng, 25)
    cfg = GraphConfig(xi=0.3, phi=0.8)
    g = build_graph(feats, cfg, threads=3)
    expected = []
    pairs = 0
    for i, j in itertools.combinations(range(len(feats)), 2):
        pairs += 1
        fi, fj = feats[i], feats[j]
        for k, w in enumerate((posting_type_weight(fi.pt, fj.pt, cfg.xi),
                               influence_weight(fi.inf, fj.inf, cfg.xi),
                               ff_weight(fi.ff, fj.ff, cfg.xi, cfg.phi))):
            if w is not None:
                expected.append((k, i, j, w))
    assert pairs == 25 * 24 // 2
    got = sorted((k, i, j, w) for i, j, k, w in g.iter_edges())
    assert [e[:3] for e in got] == [e[:3] for e in sorted(expected)]
    np.testing.assert_allclose([e[3] for e in got], [e[3] for e in sorted(expected)], rtol=0, atol=1e-12)
    for s, d, w in g.edges:
        assert (s < d).all() and ((w > 0) & (w <= 1)).all()
        assert len(set(zip(s.tolist(), d.tolist()))) == len(s)


def test_thread_count_does_not_change_graph():
    feats = random_features(np.random.default_rng(3), 60)
    a = build_graph(feats, GraphConfig(xi=0.3), threads=1)
    b = build_graph(feats, GraphConfig(xi=0.3), threads=7)
    for (s1, d1, w1), (s2, d2, w2) in zip(a.edges, b.edges):
        assert np.array_equal(s1, s2) and np.array_equal(d1, d2) and np.array_equal(w1, w2)


def test_tsv_dump():
    g = MultiRelationalGraph.from_edge_list(3, [(0, 1, 0, 0.123456789123), (1, 2, 2, 1.0)])
    buf = io.StringIO()
    g.write_tsv(buf)
    assert buf.getvalue() == "0\t1\t1\t0.123456789\n1\t2\t3\t1\n"


@pytest.mark.parametrize("edges", [[(0, 0, 0, 1.0)], [(0, 1, 0, 0.0)], [(0, 1, 0, 1.5)],
                                   [(0, 1, 0, 1.0), (1, 0, 0, 0.5)]])
def test_edge_list_invariants_enforced(edges):
    with pytest.raises(ValueError):
        MultiRelationalGraph.from_edge_list(2, edges)
