import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from logembed.graph import load_edge_list
from logembed.model import (EmbeddingModel, final_representation,
                            final_representation_matrix, global_list_loss, init_model,
                            list_loss_given_status, load_embeddings, load_status_params,
                            local_term, log_sigmoid, pair_order_prob, save_embeddings,
                            save_status_params, sigmoid, softmax_local_objective,
                            status_value_gine, status_value_log)
from support import finite_difference, rel_err

import io

finite = st.floats(-50, 50, allow_nan=False)


def test_sigmoid_values():
    assert sigmoid(0.0) == 0.5
    assert abs(sigmoid(math.log(3)) - 0.75) < 1e-15
    assert sigmoid(1000.0) == 1.0
    assert sigmoid(-1000.0) == 0.0  # underflows cleanly, no warning/overflow


@given(finite)
def test_sigmoid_symmetry(x):
    assert abs(sigmoid(-x) - (1.0 - sigmoid(x))) < 1e-15


def test_log_sigmoid_matches_naive_and_is_stable():
    xs = np.array([-700.0, -5.0, 0.0, 5.0, 700.0])
    out = log_sigmoid(xs)
    assert np.isfinite(out).all()
    naive = np.log(1.0 / (1.0 + np.exp(-xs[1:4])))
    assert np.allclose(out[1:4], naive, atol=1e-12)


def test_status_values():
    m = EmbeddingModel(np.array([[0.3, 0.4]]), np.array([[0.1, 0.2]]),
                       np.zeros(2), np.zeros(2))
    assert status_value_gine(m, 0) == 0.0
    m.w_source = np.array([1.0, 0.0])
    assert status_value_gine(m, 0) == pytest.approx(0.3)
    m.w_source *= 5.0
    assert status_value_gine(m, 0) == pytest.approx(1.5)
    # log mapping reduces to gine when the target part is zero
    assert status_value_log(m, 0) == status_value_gine(m, 0)
    m.w_target = np.array([0.0, 1.0])
    assert status_value_log(m, 0) == pytest.approx(1.5 + 0.2)


def test_pair_order_prob():
    assert pair_order_prob(1.3, 1.3) == 0.5
    assert abs(pair_order_prob(math.log(3), 0.0) - 0.75) < 1e-12


@given(finite, finite)
def test_pair_order_prob_antisymmetry(fi, fj):
    assert abs(pair_order_prob(fi, fj) + pair_order_prob(fj, fi) - 1.0) < 1e-12


def test_list_loss_analytic_values():
    loss, _ = list_loss_given_status(np.array([0.7, 0.7]))
    assert loss == pytest.approx(math.log(2), abs=1e-12)
    loss3, _ = list_loss_given_status(np.zeros(3))
    assert loss3 == pytest.approx(3 * math.log(2), abs=1e-12)


def test_list_loss_translation_invariant():
    f = np.random.default_rng(0).normal(size=6)
    a, _ = list_loss_given_status(f)
    b, _ = list_loss_given_status(f + 123.456)
    assert a == pytest.approx(b, rel=1e-12)


def test_list_loss_nonnegative(rng):
    for _ in range(20):
        loss, _ = list_loss_given_status(rng.normal(size=5))
        assert loss >= 0.0


def test_degenerate_list_rejected(rng):
    m = init_model(4, 3, rng)
    with pytest.raises(ValueError):
        global_list_loss(m, [2], "gine")


def test_global_list_gradients_match_fd(rng):
    for mapping in ("gine", "log"):
        m = init_model(10, 4, rng)
        nodes = np.array([7, 2, 9, 4])
        _, grad = global_list_loss(m, nodes, mapping)

        def loss():
            return global_list_loss(m, nodes, mapping)[0]

        for k, v in enumerate(nodes):
            fd = finite_difference(loss, m.source[v])
            assert rel_err(grad.wrt_source[k], fd) < 1e-4
        assert rel_err(grad.wrt_w_source, finite_difference(loss, m.w_source)) < 1e-4
        if mapping == "log":
            for k, v in enumerate(nodes):
                fd = finite_difference(loss, m.target[v])
                assert rel_err(grad.wrt_target[k], fd) < 1e-4
            assert rel_err(grad.wrt_w_target, finite_difference(loss, m.w_target)) < 1e-4


def test_local_term_values(rng):
    m = init_model(4, 3, rng)
    m.source[0] = 0.0  # all dot products zero
    loss, _ = local_term(m, 0, 1, [2])
    assert loss == pytest.approx(2 * math.log(2), abs=1e-12)
    # strong positive pair with no negatives: loss -> 0
    m.source[0] = np.array([50.0, 0.0, 0.0])
    m.target[1] = np.array([1.0, 0.0, 0.0])
    loss, _ = local_term(m, 0, 1, [])
    assert loss < 1e-20


def test_local_term_gradients_match_fd(rng):
    m = init_model(8, 5, rng)
    negs = [3, 6, 6]  # duplicate negative on purpose

    def loss():
        return local_term(m, 1, 4, negs)[0]

    _, grad = local_term(m, 1, 4, negs)
    assert rel_err(grad.wrt_center, finite_difference(loss, m.source[1])) < 1e-4
    for row, r in enumerate(grad.target_rows):
        fd = finite_difference(loss, m.target[r])
        assert rel_err(grad.wrt_targets[row], fd) < 1e-4


def test_softmax_objective_uniform_case():
    g = load_edge_list(io.BytesIO(b"a b\n"))
    m = EmbeddingModel(np.zeros((2, 3)), np.zeros((2, 3)), np.zeros(3), np.zeros(3))
    assert softmax_local_objective(m, g) == pytest.approx(-2 * math.log(0.5), abs=1e-12)


def test_softmax_objective_relabel_invariant(rng):
    from support import random_simple_graph
    from logembed.graph import from_edges

    g = random_simple_graph(rng, 12, 14)
    m = init_model(12, 4, np.random.default_rng(0))
    perm = np.random.default_rng(1).permutation(12)
    labels2 = [""] * 12
    for old, new in enumerate(perm):
        labels2[new] = g.labels[old]
    g2 = from_edges(labels2, perm[g.edges.astype(np.int64)].astype(np.int32))
    m2 = EmbeddingModel(np.empty_like(m.source), np.empty_like(m.target),
                        m.w_source, m.w_target)
    m2.source[perm] = m.source
    m2.target[perm] = m.target
    assert softmax_local_objective(m, g) == pytest.approx(
        softmax_local_objective(m2, g2), rel=1e-12)


def test_final_representation():
    m = EmbeddingModel(np.array([[1.0, 2.0]]), np.array([[3.0, 4.0]]),
                       np.zeros(2), np.zeros(2))
    assert final_representation(m, 0, "log").tolist() == [1.0, 2.0, 3.0, 4.0]
    assert final_representation(m, 0, "gine").tolist() == [1.0, 2.0]
    assert final_representation(m, 0, "gine").shape == (2,)
    assert final_representation(m, 0, "log").shape == (4,)
    assert np.array_equal(final_representation_matrix(m, "gine"), m.source)
    with pytest.raises(ValueError):
        final_representation(m, 0, "both")


def test_init_bounds_and_determinism():
    a = init_model(20, 8, np.random.default_rng(4))
    b = init_model(20, 8, np.random.default_rng(4))
    for name in ("source", "target", "w_source", "w_target"):
        arr = getattr(a, name)
        assert np.abs(arr).max() <= 0.5 / 8
        assert np.array_equal(arr, getattr(b, name))


def test_embedding_file_round_trip(tmp_path, rng):
    labels = ["n%d" % i for i in range(7)]
    reps = rng.normal(size=(7, 5))
    path = tmp_path / "model.emb"
    save_embeddings(path, labels, reps)
    got_labels, got = load_embeddings(path)
    assert got_labels == labels
    assert np.array_equal(got, reps)  # repr() round-trips float64 exactly
    first = path.read_text().splitlines()[0]
    assert first == "7 5"


def test_status_params_round_trip(tmp_path, rng):
    w, wp = rng.normal(size=4), rng.normal(size=4)
    path = tmp_path / "model.params"
    save_status_params(path, w, wp)
    got_w, got_wp = load_status_params(path)
    assert np.array_equal(got_w, w)
    assert np.array_equal(got_wp, wp)
