import numpy as np
import pytest

from oracles import rand_index_by_pairs
from tsnetclust import (
    Algorithm,
    Dataset,
    DistanceMatrix,
    DistanceMeasure,
    InvalidInputError,
    Partition,
    TimeSeries,
    derive_seed,
    rand_index,
    summarize,
    sweep_eps,
    sweep_k,
    truth_partition,
)
from tsnetclust.evaluation import SummaryRow, baseline_best_ri, eps_grid
from tsnetclust.network import component_labels, eps_graph, knn_graph


def part(labels):
    return Partition(np.asarray(labels, dtype=np.int64))


def matrix(values):
    return DistanceMatrix(np.asarray(values, dtype=float), DistanceMeasure.from_name("ed"))


def random_matrix(rng, n):
    v = rng.random((n, n))
    v = np.triu(v, 1)
    return matrix(v + v.T)


# ---------------------------------------------------------------------------
# rand index


def test_rand_index_identical_partitions():
    p = part([0, 1, 1, 2])
    assert rand_index(p, p) == 1.0


def test_rand_index_hand_example():
    # {{a,b},{c}} vs {{a},{b,c}}: only the (a,c) pair is decided the same way
    assert rand_index(part([0, 0, 1]), part([0, 1, 1])) == pytest.approx(1.0 / 3.0)


def test_rand_index_two_points_fully_wrong():
    assert rand_index(part([0, 1]), part([0, 0])) == 0.0


def test_rand_index_symmetric_and_relabel_invariant(rng):
    for _ in range(50):
        n = int(rng.integers(2, 10))
        a = part(rng.integers(0, 4, size=n))
        b = part(rng.integers(0, 4, size=n))
        assert rand_index(a, b) == rand_index(b, a)
        shuffled = part((a.labels + 5) % a.n_communities) if a.n_communities > 1 else a
        assert rand_index(shuffled, b) == rand_index(a, b)


def test_rand_index_matches_pair_enumeration(rng):
    for _ in range(200):
        n = int(rng.integers(2, 8))
        a = rng.integers(0, 4, size=n)
        b = rng.integers(0, 4, size=n)
        assert rand_index(part(a), part(b)) == pytest.approx(
            rand_index_by_pairs(a.tolist(), b.tolist()), abs=1e-12
        )


def test_rand_index_size_mismatch():
    with pytest.raises(InvalidInputError):
        rand_index(part([0, 1]), part([0, 1, 2]))


def test_truth_partition_requires_labels():
    ds = Dataset((TimeSeries([1.0, 2.0]), TimeSeries([2.0, 1.0])))
    with pytest.raises(InvalidInputError):
        truth_partition(ds)


# ---------------------------------------------------------------------------
# seeds


def test_derive_seed_stable_and_sensitive():
    a = derive_seed(7, "coffee", "dtw", "eps", 3)
    assert a == derive_seed(7, "coffee", "dtw", "eps", 3)
    assert a != derive_seed(7, "coffee", "dtw", "eps", 4)
    assert a != derive_seed(8, "coffee", "dtw", "eps", 3)
    assert 0 <= a < 2**64


# ---------------------------------------------------------------------------
# sweeps


def test_sweep_k_record_count(rng):
    D = random_matrix(rng, 3)
    truth = part([0, 0, 1])
    res = sweep_k(D, Algorithm.FAST_GREEDY, 0, truth)
    assert len(res.records) == 2
    assert [r.param for r in res.records] == [1.0, 2.0]


def test_sweep_eps_record_count(rng):
    D = random_matrix(rng, 5)
    truth = part([0, 0, 1, 1, 1])
    res = sweep_eps(D, Algorithm.MULTILEVEL, 0, truth)
    assert len(res.records) == 101
    off = D.off_diagonal()
    assert res.records[0].param == pytest.approx(float(off.min()))
    assert res.records[-1].param == float(off.max())


def test_sweep_eps_degenerate_range():
    D = matrix(np.ones((3, 3)) - np.eye(3))
    res = sweep_eps(D, Algorithm.FAST_GREEDY, 0, part([0, 1, 2]))
    assert len(res.records) == 1


def test_eps_grid_endpoints_exclude_diagonal(rng):
    D = random_matrix(rng, 6)
    grid = eps_grid(D)
    assert grid[0] > 0.0  # the zero diagonal is not a grid point
    assert len(grid) == 101


def test_sweep_eps_last_point_single_community(rng):
    D = random_matrix(rng, 6)
    truth = part([0, 0, 0, 1, 1, 1])
    res = sweep_eps(D, Algorithm.MULTILEVEL, 0, truth)
    last = res.records[-1]
    assert last.n_communities == 1
    assert last.rand_index == rand_index(Partition.single_community(6), truth)


def test_best_marks_max_ri_smallest_param(rng):
    D = random_matrix(rng, 6)
    truth = part([0, 0, 0, 1, 1, 1])
    res = sweep_k(D, Algorithm.FAST_GREEDY, 0, truth)
    ris = [r.rand_index for r in res.records]
    assert res.best_record.rand_index == max(ris)
    assert res.best == ris.index(max(ris))  # first occurrence = smallest param
    assert res.best_record.rand_index >= res.records[-1].rand_index


def test_component_count_nonincreasing_in_parameter(rng):
    D = random_matrix(rng, 8)
    comp_counts = []
    for eps in eps_grid(D):
        labels = component_labels(eps_graph(D, float(eps)))
        comp_counts.append(int(labels.max()) + 1)
    assert all(a >= b for a, b in zip(comp_counts, comp_counts[1:]))
    comp_counts = []
    for k in range(1, 8):
        labels = component_labels(knn_graph(D, k))
        comp_counts.append(int(labels.max()) + 1)
    assert all(a >= b for a, b in zip(comp_counts, comp_counts[1:]))


def test_baseline_best_ri_sweeps_full_k_grid(rng):
    D = random_matrix(rng, 6)
    truth = part([0, 0, 0, 1, 1, 1])
    res = baseline_best_ri(D, "single", truth)
    assert len(res.records) == 6
    res_pam = baseline_best_ri(D, "pam", truth)
    assert len(res_pam.records) == 6
    assert res_pam.records[-1].n_communities == 6


# ---------------------------------------------------------------------------
# summaries


def test_summarize_hand_example():
    rows = summarize({("dtw", "epsnn", "ml"): [0.8, 1.0]})
    row = rows[0]
    assert row.median == pytest.approx(0.9)
    assert row.mean == pytest.approx(0.9)
    assert row.std == pytest.approx(0.14142135, abs=1e-6)
    assert not row.degenerate


def test_summarize_single_element_group():
    row = summarize({"solo": [0.7]})[0]
    assert row.degenerate
    assert row.std == 0.0
    assert row.median == 0.7


def test_summarize_empty_group_warns():
    with pytest.warns(UserWarning):
        rows = summarize({"empty": [], "ok": [0.5, 0.6]})
    assert len(rows) == 1


def test_summary_row_even_median():
    row = SummaryRow.from_values(("a",), [0.1, 0.2, 0.6, 1.0])
    assert row.median == pytest.approx(0.4)  # midpoint convention
