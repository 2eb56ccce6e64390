import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from citescope.environment import (
    CITED,
    CITING,
    Environment,
    build_environment,
    cn_values,
    grand_total,
    pearson_r,
    self_cite_rate,
)
from citescope.errors import EmptyEnvironmentError, LabelNotFoundError, ZeroVarianceError
from citescope.ingest import CitationMatrix

from conftest import SEED

TABLE1_TOTAL_CITES = [144430, 52131, 20458, 28524, 15391]
TABLE1_CN = [40.866908, 16.450265, 11.37804, 8.08881, 7.431376]


def four_journal_matrix():
    # integer version of "A 50, B 30, C 0.5 of 100.5": all counts doubled
    labels = ("S", "A", "B", "C")
    counts = np.array(
        [
            [10, 0, 0, 0],
            [100, 5, 0, 0],
            [60, 0, 7, 0],
            [1, 0, 0, 9],
        ]
    )
    return CitationMatrix(labels, labels, counts)


def members_by_definition(m, seed, direction, t):
    """Membership straight from the rule, one journal at a time."""
    out = set()
    if direction == CITED:
        j = m.cited_labels.index(seed)
        total = sum(int(m.counts[i, j]) for i in range(m.shape[0]))
        for i, label in enumerate(m.citing_labels):
            if m.counts[i, j] > 0 and m.counts[i, j] >= t * total:
                out.add(label)
    else:
        i = m.citing_labels.index(seed)
        total = sum(int(m.counts[i, j]) for j in range(m.shape[1]))
        for j, label in enumerate(m.cited_labels):
            if m.counts[i, j] > 0 and m.counts[i, j] >= t * total:
                out.add(label)
    return out | {seed}


def test_threshold_excludes_small_contributor():
    m = four_journal_matrix()
    env = build_environment(m, "S", CITED, 0.01)
    # total received by S = 10 + 100 + 60 + 1 = 171; 1% = 1.71 > 1
    assert set(env.members) == {"S", "A", "B"}
    assert env.members == ("S", "A", "B")
    assert env.sub_matrix.citing_labels == env.members == env.sub_matrix.cited_labels


def test_threshold_zero_keeps_every_nonzero_flow():
    env = build_environment(four_journal_matrix(), "S", CITED, 0.0)
    assert env.members == ("S", "A", "B", "C")


def test_threshold_boundary_is_inclusive():
    labels = ("S", "A", "B")
    # A gives exactly 1% of the 100 citations S receives
    m = CitationMatrix(labels, labels, np.array([[0, 0, 0], [1, 0, 0], [99, 0, 0]]))
    assert "A" in build_environment(m, "S", CITED, 0.01).members


def test_table3_citing_environment(table3):
    env = build_environment(table3, SEED, CITING, 0.01)
    assert env.size == 17
    assert env.members == table3.citing_labels


def test_seed_missing_names_axis():
    m = CitationMatrix(("A",), ("B",), np.array([[3]]))
    with pytest.raises(LabelNotFoundError, match="cited axis"):
        build_environment(m, "A", CITED)
    with pytest.raises(LabelNotFoundError, match="citing axis"):
        build_environment(m, "B", CITING)


def test_empty_environment():
    m = CitationMatrix(("A", "B"), ("A", "B"), np.array([[0, 0], [0, 1]]))
    with pytest.raises(EmptyEnvironmentError, match="empty environment"):
        build_environment(m, "A", CITING)


def test_threshold_range_checked():
    with pytest.raises(ValueError):
        build_environment(four_journal_matrix(), "S", CITED, 1.0)


def test_rectangular_matrix_gets_zero_rows():
    m = CitationMatrix(("A", "B"), ("S", "A"), np.array([[4, 1], [6, 0]]))
    env = build_environment(m, "S", CITED, 0.0)
    assert env.members == ("S", "A", "B")
    # S is not on the citing axis: its row is all zeros
    assert env.sub_matrix.counts[0].tolist() == [0, 0, 0]
    assert env.sub_matrix.counts[:, 0].tolist() == [0, 4, 6]


def test_cn_two_journal_shares():
    m = CitationMatrix(("A", "B"), ("A", "B"), np.array([[50, 10], [25, 15]]))
    env = build_environment(m, "A", CITED, 0.0)
    geo = {g.journal: g for g in cn_values(env)}
    assert geo["A"].cn_percent == pytest.approx(75.0, abs=1e-12)
    assert geo["B"].cn_percent == pytest.approx(25.0, abs=1e-12)
    assert grand_total(env) == 100


def test_cn_all_self_citations():
    labels = ("S", "X")
    m = CitationMatrix(labels, labels, np.array([[0, 0], [90, 10]]))
    env = build_environment(m, "S", CITED, 0.0)
    geo = {g.journal: g for g in cn_values(env)}
    assert geo["X"].share_total == pytest.approx(0.10)
    assert geo["X"].share_excl_self == 0.0


def test_cn_citing_direction_uses_outdegree():
    labels = ("S", "A")
    m = CitationMatrix(labels, labels, np.array([[6, 2], [1, 1]]))
    env = build_environment(m, "S", CITING, 0.0)
    geo = {g.journal: g for g in cn_values(env)}
    assert geo["S"].share_total == pytest.approx(0.8)
    assert geo["S"].share_excl_self == pytest.approx(0.2)
    assert geo["A"].share_excl_self == pytest.approx(0.1)


def test_cn_degenerate_environment():
    labels = ("S", "A")
    env = Environment("S", CITED, labels, CitationMatrix(labels, labels, np.zeros((2, 2), int)), 0.0)
    with pytest.raises(EmptyEnvironmentError, match="degenerate"):
        cn_values(env)


def test_self_cite_rate():
    labels = ("P", "Q")
    assert self_cite_rate(CitationMatrix(labels, labels, np.array([[99, 0], [1, 0]])), "P") == pytest.approx(0.99)
    assert self_cite_rate(CitationMatrix(labels, labels, np.array([[0, 0], [5, 0]])), "P") == 0.0
    assert self_cite_rate(CitationMatrix(labels, labels, np.zeros((2, 2), int)), "P") == 0.0
    with pytest.raises(LabelNotFoundError):
        self_cite_rate(CitationMatrix(("P",), ("Q",), np.array([[1]])), "P")


def test_pearson_trivial():
    assert pearson_r([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0, abs=1e-15)
    assert pearson_r([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)


def test_pearson_table1_matches_exact_rational_oracle():
    from fractions import Fraction

    x = [Fraction(v) for v in TABLE1_TOTAL_CITES]
    y = [Fraction(str(v)) for v in TABLE1_CN]
    mx, my = sum(x) / 5, sum(y) / 5
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    oracle = float(sxy) / math.sqrt(float(sxx) * float(syy))
    assert oracle == pytest.approx(0.9904906159239396, abs=1e-15)
    assert pearson_r(TABLE1_TOTAL_CITES, TABLE1_CN) == pytest.approx(oracle, abs=1e-14)


def test_pearson_errors():
    with pytest.raises(ZeroVarianceError, match="zero variance"):
        pearson_r([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError, match="length mismatch"):
        pearson_r([1, 2], [1, 2, 3])


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.tuples(finite, finite), min_size=3, max_size=20),
    st.floats(0.01, 100),
    st.floats(-100, 100),
)
def test_pearson_symmetry_and_affine_invariance(pairs, slope, shift):
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    # well-conditioned spread only; cancellation otherwise swamps 1e-12
    assume(np.ptp(x) > 1e-2 * max(1.0, np.abs(x).max()))
    assume(np.ptp(y) > 1e-2 * max(1.0, np.abs(y).max()))
    r = pearson_r(x, y)
    assert pearson_r(y, x) == r
    assert -1.0 <= r <= 1.0
    assert pearson_r(slope * x + shift, y) == pytest.approx(r, abs=1e-12)
    assert pearson_r(x, slope * y + shift) == pytest.approx(r, abs=1e-12)


square_counts = st.integers(2, 7).flatmap(
    lambda n: arrays(np.int64, (n, n), elements=st.integers(0, 30))
)


def _matrix(counts):
    labels = tuple(f"J{i}" for i in range(counts.shape[0]))
    return CitationMatrix(labels, labels, counts)


@settings(max_examples=150, deadline=None)
@given(square_counts, st.data())
def test_environment_properties(counts, data):
    m = _matrix(counts)
    direction = data.draw(st.sampled_from([CITED, CITING]))
    seed = data.draw(st.sampled_from(m.citing_labels))
    flows = counts[:, m.col_of(seed)] if direction == CITED else counts[m.row_of(seed)]
    assume(flows.sum() > 0)

    previous = None
    for t in (0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 0.9, 0.99):
        env = build_environment(m, seed, direction, t)
        assert seed in env.members
        assert set(env.members) == members_by_definition(m, seed, direction, t)
        if previous is not None:
            assert set(env.members) <= previous
        previous = set(env.members)

        twin = build_environment(m.transpose(), seed, CITING if direction == CITED else CITED, t)
        assert twin.members == env.members

        if grand_total(env):
            geo = cn_values(env)
            assert math.fsum(g.share_total for g in geo) == pytest.approx(1.0, abs=1e-9)
            for g in geo:
                assert 0.0 <= g.share_excl_self <= g.share_total <= 1.0
