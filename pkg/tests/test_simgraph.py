import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from citescope.environment import CITED, CITING, Environment, NodeGeometry, build_environment, cn_values
from citescope.ingest import CitationMatrix
from citescope.simgraph import (
    ZERO_DIAGONAL,
    build_graph,
    cosine,
    distribution_vectors,
    similarity_matrix,
)

from helpers import naive_cosine, random_matrix


def test_cosine_examples():
    assert cosine([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0, abs=1e-15)
    assert cosine([1, 0], [0, 1]) == 0.0
    # 4 / (sqrt 5 * sqrt 5)
    assert cosine([1, 2], [2, 1]) == pytest.approx(0.8, abs=1e-15)
    assert cosine([0, 0], [1, 2]) == 0.0


def test_cosine_length_mismatch():
    with pytest.raises(ValueError):
        cosine([1, 2], [1, 2, 3])


def env_over(counts, direction=CITED, seed=0):
    labels = tuple(f"J{i}" for i in range(len(counts)))
    m = CitationMatrix(labels, labels, np.array(counts))
    return Environment(labels[seed], direction, labels, m, 0.0)


def test_proportional_columns_have_unit_cosine():
    env = env_over([[1, 2, 5], [3, 6, 1], [0, 0, 2]])
    sim = similarity_matrix(env)
    assert sim[0, 1] == pytest.approx(1.0, abs=1e-15)


def test_zero_diagonal_isolates_pure_self_citer():
    env = env_over([[4, 1, 0], [2, 3, 0], [0, 0, 9]])
    sim = similarity_matrix(env, ZERO_DIAGONAL)
    assert sim[2].tolist() == [0.0, 0.0, 0.0]
    assert sim[:, 2].tolist() == [0.0, 0.0, 0.0]


def test_citing_direction_uses_rows():
    env = env_over([[1, 2, 0], [2, 4, 0], [0, 0, 1]], CITING)
    assert np.array_equal(distribution_vectors(env), env.sub_matrix.counts)
    assert similarity_matrix(env)[0, 1] == pytest.approx(1.0)


def naive_similarity(env, zero_diag=False):
    c = env.sub_matrix.counts.tolist()
    n = len(c)
    if zero_diag:
        for i in range(n):
            c[i][i] = 0
    vec = [[c[i][j] for i in range(n)] for j in range(n)] if env.direction == CITED else c
    out = [[naive_cosine(vec[a], vec[b]) for b in range(n)] for a in range(n)]
    for a in range(n):
        out[a][a] = 1.0 if any(vec[a]) else 0.0
    return np.array(out)


def test_similarity_matches_naive_double_loop(rng):
    for _ in range(100):
        m = random_matrix(rng, int(rng.integers(2, 7)))
        env = Environment(m.citing_labels[0], rng.choice([CITED, CITING]), m.citing_labels, m, 0.0)
        for zero_diag in (False, True):
            sim = similarity_matrix(env, ZERO_DIAGONAL if zero_diag else "include-self-cites")
            assert np.max(np.abs(sim - naive_similarity(env, zero_diag))) <= 1e-12
            assert np.array_equal(sim, sim.T)


def graph_for(sim_values):
    labels = ("A", "B", "C")
    m = CitationMatrix(labels, labels, np.ones((3, 3), int))
    env = Environment("A", CITED, labels, m, 0.0)
    sim = np.eye(3)
    sim[0, 1] = sim[1, 0] = sim_values[0]
    sim[0, 2] = sim[2, 0] = sim_values[1]
    sim[1, 2] = sim[2, 1] = sim_values[2]
    return env, sim, cn_values(env)


def test_suppression_boundary():
    env, sim, geo = graph_for((0.19, 0.20, 0.5))
    g = build_graph(env, sim, geo, 0.2)
    pairs = {(e.a, e.b) for e in g.edges}
    assert ("A", "B") not in pairs
    assert ("A", "C") in pairs


def test_three_journal_hand_case():
    env, sim, geo = graph_for((0.9, 0.25, 0.1))
    g = build_graph(env, sim, geo, 0.2)
    assert [(e.a, e.b, e.cosine) for e in g.edges] == [("A", "B", 0.9), ("A", "C", 0.25)]


def test_threshold_zero_drops_only_zero_pairs():
    env, sim, geo = graph_for((0.0, 0.05, 0.3))
    g = build_graph(env, sim, geo, 0.0)
    assert [(e.a, e.b) for e in g.edges] == [("A", "C"), ("B", "C")]


def test_isolated_node_kept_and_geometry_required():
    env, sim, geo = graph_for((0.0, 0.0, 0.5))
    g = build_graph(env, sim, geo, 0.2)
    assert g.labels == ("A", "B", "C")
    assert g.degree("A") == 0
    assert g.nodes[0] == ("A", geo[0])
    with pytest.raises(ValueError, match="geometry"):
        build_graph(env, sim, geo[:2], 0.2)


def test_build_graph_rejects_wrong_shape():
    env, sim, geo = graph_for((0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        build_graph(env, sim[:2, :2], geo)


vectors = st.integers(1, 8).flatmap(
    lambda n: st.tuples(
        arrays(np.int64, n, elements=st.integers(0, 1000)),
        arrays(np.int64, n, elements=st.integers(0, 1000)),
    )
)


@settings(max_examples=300, deadline=None)
@given(vectors, st.floats(1e-3, 1e3))
def test_cosine_properties(uv, alpha):
    u, v = uv
    c = cosine(u, v)
    assert 0.0 <= c <= 1.0
    assert cosine(v, u) == c
    assert cosine(alpha * u, v) == pytest.approx(c, abs=1e-12)
    if u.any():
        assert cosine(u, u) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 7).flatmap(lambda n: arrays(np.int64, (n, n), elements=st.integers(0, 40))))
def test_edge_monotonicity(counts):
    labels = tuple(f"J{i}" for i in range(counts.shape[0]))
    m = CitationMatrix(labels, labels, counts)
    if counts[:, 0].sum() == 0:
        return
    env = build_environment(m, "J0", CITED, 0.0)
    if sum(env.sub_matrix.counts.sum(axis=0)) == 0:
        return
    sim = similarity_matrix(env)
    geo = cn_values(env)
    previous = None
    for t in (0.0, 0.1, 0.2, 0.4, 0.8, 0.99):
        edges = {(e.a, e.b) for e in build_graph(env, sim, geo, t).edges}
        if previous is not None:
            assert edges <= previous
        previous = edges
