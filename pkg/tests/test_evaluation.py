import numpy as np
import pytest
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial.distance import squareform

from otw.distance import DistanceMatrix, Metric, pairwise_matrix
from otw.errors import LengthMismatchError, OtwError
from otw.evaluation import (
    HyperGrid,
    LabeledDataset,
    agglomerative_cluster,
    one_nn_classify,
    rand_index,
    select_params,
    validation_split,
)


def ds(X, y):
    return LabeledDataset(np.asarray(X, float), y)


class TestOneNN:
    def test_identical_point(self, rng):
        X = rng.normal(size=(5, 8))
        tr = ds(X, [0, 1, 2, 3, 4])
        pred, err = one_nn_classify(tr, ds(X[[3]], [3]), Metric())
        assert pred.tolist() == [3] and err == 0.0

    def test_hand_example(self):
        tr = ds([[0, 0], [1, 1]], [0, 1])
        pred, err = one_nn_classify(tr, ds([[0.9, 1.1]], [1]), Metric("l1"))
        assert pred.tolist() == [1] and err == 0.0

    def test_single_training_item(self):
        tr = ds([[0, 0]], [7])
        pred, err = one_nn_classify(tr, ds([[1, 1], [2, 2], [3, 3]], [7, 1, 1]), Metric("l2"))
        assert pred.tolist() == [7, 7, 7] and err == pytest.approx(2 / 3)

    def test_ties_go_to_lowest_index(self):
        tr = ds([[1, 0], [-1, 0]], [5, 6])
        pred, _ = one_nn_classify(tr, ds([[0, 0]], [5]), Metric("l1"))
        assert pred.tolist() == [5]

    def test_train_as_test_is_perfect(self, rng):
        X = rng.normal(size=(20, 10))
        tr = ds(X, rng.integers(0, 3, 20))
        for metric in (Metric(), Metric("dtw"), Metric("l2")):
            assert one_nn_classify(tr, tr, metric)[1] == 0.0

    def test_errors(self):
        with pytest.raises(LengthMismatchError):
            one_nn_classify(ds([[1, 2]], [0]), ds([[1, 2, 3]], [0]), Metric())
        with pytest.raises(OtwError):
            LabeledDataset(np.zeros((0, 3)), [])


class TestSelectParams:
    def separable(self, rng, n_items=40):
        y = np.arange(n_items) % 2
        X = rng.normal(0, 0.1, size=(n_items, 16)) + 3.0 * y[:, None]
        return ds(X, y)

    def test_single_cell(self, rng):
        m = Metric("l1")
        assert select_params(self.separable(rng), HyperGrid.single(m)) is m

    def test_l1_cell_reaches_full_accuracy(self, rng):
        data = self.separable(rng)
        grid = HyperGrid.otw(16, ms=(1.0,), signs=("direct",))
        best, scores = select_params(data, grid, seed=3, return_scores=True)
        assert scores[0] == 1.0  # s = 1 is the l1 distance
        assert max(scores) == 1.0 and best is grid.cells[0]

    def test_deterministic(self, rng):
        data = ds(rng.normal(size=(30, 12)), rng.integers(0, 3, 30))
        grid = HyperGrid.otw(12)
        a = select_params(data, grid, seed=9, return_scores=True)
        b = select_params(data, grid, seed=9, return_scores=True)
        assert a[0] == b[0] and a[1] == b[1]

    def test_split_sizes(self):
        fit, val = validation_split(50, seed=1)
        assert len(val) == 10 and len(fit) == 40
        assert set(fit) | set(val) == set(range(50))

    def test_too_few(self):
        with pytest.raises(OtwError):
            select_params(ds(np.zeros((4, 3)), [0, 1, 0, 1]), HyperGrid.single(Metric()))

    def test_default_grids(self):
        g = HyperGrid.otw(64)
        assert len(g) == 3 * 5 * 2
        assert {c.otw.s for c in g} == {1, 8, 16, 32, 64}
        assert {c.dtw.window for c in HyperGrid.dtw(100)} == {0, 5, 10, 20, 99}
        with pytest.raises(OtwError):
            HyperGrid([])


class TestClustering:
    def test_trivial_k(self, rng):
        X = rng.normal(size=(6, 5))
        D = pairwise_matrix(X)
        assert sorted(agglomerative_cluster(D, 6)) == list(range(6))
        assert set(agglomerative_cluster(D, 1)) == {0}

    def test_two_groups(self):
        E = np.array([[0, 1, 10, 10], [1, 0, 10, 10], [10, 10, 0, 1], [10, 10, 1, 0.0]])
        for link in ("average", "single", "complete"):
            assert agglomerative_cluster(E, 2, link).tolist() == [0, 0, 1, 1]

    @pytest.mark.parametrize("link", ["average", "single", "complete"])
    def test_matches_scipy(self, rng, link):
        for _ in range(20):
            X = rng.normal(size=(25, 2))
            E = np.sqrt(((X[:, None] - X[None]) ** 2).sum(-1))
            k = int(rng.integers(1, 7))
            ref = fcluster(linkage(squareform(E, checks=False), link), k, "maxclust")
            assert rand_index(agglomerative_cluster(E, k, link), ref) == 1.0

    def test_scale_invariance(self, rng):
        X = rng.normal(size=(30, 20))
        D = pairwise_matrix(X)
        scaled = DistanceMatrix(D.entries * 7.5, D.metric_tag)
        np.testing.assert_array_equal(agglomerative_cluster(D, 4), agglomerative_cluster(scaled, 4))

    def test_invalid_k(self):
        with pytest.raises(OtwError):
            agglomerative_cluster(np.zeros((3, 3)), 0)
        with pytest.raises(OtwError):
            agglomerative_cluster(np.zeros((3, 3)), 4)


class TestRandIndex:
    def test_examples(self):
        assert rand_index([0, 1, 1, 2], [5, 3, 3, 9]) == 1.0
        assert rand_index([0, 0, 1], [0, 1, 1]) == pytest.approx(1 / 3)
        assert rand_index([0, 0, 0], [0, 1, 2]) == 0.0

    def test_symmetric_and_rename_invariant(self, rng):
        for _ in range(30):
            t, p = rng.integers(0, 4, 25), rng.integers(0, 3, 25)
            assert rand_index(t, p) == rand_index(p, t)
            assert rand_index(t, p) == rand_index(t, 10 - 3 * p)

    def test_errors(self):
        with pytest.raises(LengthMismatchError):
            rand_index([0, 1], [0, 1, 2])
        with pytest.raises(OtwError):
            rand_index([0], [0])
