import json

import numpy as np
import pytest

from oracles import dense_step, dense_tensors, random_graph
from sebot.graph import MultiRelationalGraph
from sebot.multirank import ConvergenceError, iterate_stationary, step, tensorize

G = MultiRelationalGraph.from_edge_list


def dense_o(t, k):
    return t.o[k].toarray()


def test_tensorize_two_vertices():
    t = tensorize(G(2, [(0, 1, 0, 0.3)]))
    np.testing.assert_array_equal(dense_o(t, 0), [[0, 1], [1, 0]])
    assert not t.o_dangling[0].any()
    assert t.o_dangling[1].all() and t.o_dangling[2].all()
    assert t.s[0][0, 1] == 1 and t.s[0][1, 0] == 1
    assert t.s[1][0, 1] == 0 and t.s[2][0, 1] == 0


def test_tensorize_uniform_split_and_isolated():
    t = tensorize(G(4, [(0, 1, 0, 1.0), (0, 2, 0, 0.2), (1, 2, 1, 1.0)]))
    assert t.o[0][0, 1] == 0.5 and t.o[0][0, 2] == 0.5
    assert all(t.o_dangling[k][3] for k in range(3))


def test_tensor_normalisation():
    rng = np.random.default_rng(1)
    g = random_graph(rng, 15, density=0.3)
    t = tensorize(g)
    for k in range(3):
        rows = np.asarray(t.o[k].sum(axis=1)).ravel()
        np.testing.assert_allclose(rows[~t.o_dangling[k]], 1, atol=1e-9)
        assert (rows[t.o_dangling[k]] == 0).all()
    s_tot = (t.s[0] + t.s[1] + t.s[2]).toarray()
    conn = t.connected.toarray() > 0
    np.testing.assert_allclose(s_tot[conn], 1, atol=1e-9)
    assert (np.diag(conn) == 0).all()


def test_edge_weights_ignored_by_default():
    a = tensorize(G(3, [(0, 1, 0, 0.2), (0, 2, 0, 0.9)]))
    b = tensorize(G(3, [(0, 1, 0, 0.9), (0, 2, 0, 0.2)]))
    assert (a.o[0] != b.o[0]).nnz == 0
    w = tensorize(G(3, [(0, 1, 0, 0.2), (0, 2, 0, 0.6)]), weighted=True)
    assert w.o[0][0, 1] == pytest.approx(0.25)


def test_two_vertex_stationary():
    sd = iterate_stationary(tensorize(G(2, [(0, 1, 0, 1.0)])))
    np.testing.assert_allclose(sd.x, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(sd.y, [1, 0, 0], atol=1e-12)
    assert sd.residual < 0.004


def test_dense_reference_on_two_vertices():
    o, s = dense_tensors(G(2, [(0, 1, 0, 1.0)]))
    x, y = np.full(2, 0.5), np.full(3, 1 / 3)
    for _ in range(3):
        x, y = dense_step(o, s, x, y)
    np.testing.assert_allclose(y, [1, 0, 0], atol=1e-15)


@pytest.mark.parametrize("seed", range(25))
@pytest.mark.parametrize("weighted", [False, True])
def test_sparse_matches_dense_every_iteration(seed, weighted):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 21))
    g = random_graph(rng, n, n_relations=int(rng.integers(1, 4)), density=rng.uniform(0.0, 0.6))
    t = tensorize(g, weighted=weighted)
    o, s = dense_tensors(g, weighted=weighted)
    x = rng.uniform(0.1, 1, n)
    x /= x.sum()
    y = np.full(3, 1 / 3)
    xd, yd = x.copy(), y.copy()
    for _ in range(30):
        x, y = step(t, x, y)
        xd, yd = dense_step(o, s, xd, yd)
        np.testing.assert_allclose(x, xd, rtol=0, atol=1e-8)
        np.testing.assert_allclose(y, yd, rtol=0, atol=1e-8)
        assert (x >= 0).all() and (y >= 0).all()


@pytest.mark.parametrize("seed", range(10))
def test_stationary_postconditions_and_equivariance(seed):
    rng = np.random.default_rng(100 + seed)
    n = 18
    g = random_graph(rng, n, density=0.25)
    sd = iterate_stationary(tensorize(g))
    assert abs(sd.x.sum() - 1) <= 1e-9 and abs(sd.y.sum() - 1) <= 1e-9
    assert (sd.x >= 0).all() and (sd.y >= 0).all()
    assert sd.residual < 0.004

    perm = rng.permutation(n)
    edges = [(int(perm[i]), int(perm[j]), k, w) for i, j, k, w in g.iter_edges()]
    gp = G(n, edges, omega=g.omega)
    sdp = iterate_stationary(tensorize(gp))
    np.testing.assert_allclose(sdp.x[perm], sd.x, atol=1e-12)
    np.testing.assert_allclose(sdp.y, sd.y, atol=1e-12)


def test_single_vertex():
    sd = iterate_stationary(tensorize(G(1, [])))
    assert sd.x.tolist() == [1.0]
    np.testing.assert_allclose(sd.y, 1 / 3)


def test_iteration_cap():
    g = random_graph(np.random.default_rng(0), 10, density=0.3)
    with pytest.raises(ConvergenceError) as err:
        iterate_stationary(tensorize(g), rho=1e-300, max_iter=5)
    assert err.value.iterations == 5 and err.value.residual > 0


def test_bad_arguments():
    t = tensorize(G(2, [(0, 1, 0, 1.0)]))
    with pytest.raises(ValueError):
        iterate_stationary(t, rho=0)
    with pytest.raises(ValueError):
        iterate_stationary(t, x0=[1.0, 0.0])


def test_positive_start_accepted():
    g = random_graph(np.random.default_rng(4), 12, density=0.4)
    a = iterate_stationary(tensorize(g), rho=1e-12)
    b = iterate_stationary(tensorize(g), rho=1e-12, x0=np.arange(1, 13), y0=[1, 2, 3])
    np.testing.assert_allclose(a.x, b.x, atol=1e-9)


def test_json_dump():
    sd = iterate_stationary(tensorize(G(2, [(0, 1, 0, 1.0)])))
    obj = json.loads(json.dumps(sd.to_json(["a", "b"])))
    assert obj["x"] == [["a", 0.5], ["b", 0.5]]
    assert len(obj["y"]) == 3
