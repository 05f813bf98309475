import numpy as np
import pytest

import recluster as rc
from recluster.errors import DataError

from oracles import brute_pair_counts, silhouette_by_loops, three_mode_weighted_sample


def part(labels):
    labels = np.asarray(labels)
    return rc.Partition(labels=labels, n_clusters=int(labels.max()) + 1)


class TestPairCounts:
    def test_identical_partitions(self):
        p = part([0, 0, 1, 1])
        pc = rc.pair_counts(p, p)
        assert (pc.n11, pc.n10, pc.n01, pc.n00) == (2, 0, 0, 4)

    def test_hand_enumerated_pair(self):
        pc = rc.pair_counts(part([0, 0, 1]), part([0, 1, 1]))
        assert (pc.n11, pc.n10, pc.n01, pc.n00) == brute_pair_counts([0, 0, 1], [0, 1, 1])
        assert (pc.n11, pc.n10, pc.n01, pc.n00) == (0, 1, 1, 1)

    def test_singletons_have_no_together_pairs(self):
        singles = part(list(range(6)))
        other = part([0, 0, 0, 1, 1, 1])
        pc = rc.pair_counts(singles, other)
        assert pc.n11 == 0 and pc.n10 == 0

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            rc.pair_counts(part([0, 1]), part([0, 1, 2]))

    def test_matches_brute_force_on_random_pairs(self):
        rng = np.random.default_rng(13)
        for _ in range(60):
            n = int(rng.integers(2, 40))
            a = rng.integers(0, int(rng.integers(1, 6)) + 1, n)
            b = rng.integers(0, int(rng.integers(1, 6)) + 1, n)
            pc = rc.pair_counts(part(a), part(b))
            assert (pc.n11, pc.n10, pc.n01, pc.n00) == brute_pair_counts(a, b)
            assert pc.total == n * (n - 1) // 2


class TestSimilarityReport:
    def test_identity_row(self):
        p = part([0, 0, 1, 1, 2])
        report = rc.similarity_report(p, p)
        assert report.as_row() == (1.0, 1.0, 1.0, 1.0, 0.0, 1.0)

    def test_hand_pair(self):
        report = rc.similarity_report(part([0, 0, 1]), part([0, 1, 1]))
        assert np.isclose(report.rand, 1.0 / 3.0)
        assert report.jaccard == 0.0
        assert report.fowlkes_mallows == 0.0

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_identities_and_permutation_invariance(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            n = int(rng.integers(2, 60))
            a = rng.integers(0, 4, n)
            b = rng.integers(0, 4, n)
            r = rc.similarity_report(part(a), part(b))
            assert abs(r.hubert - (2 * r.rand - 1)) < 1e-12
            assert abs(r.arabie_boorman - (1 - r.rand)) < 1e-12
            assert 0.0 <= r.rand <= 1.0
            assert 0.0 <= r.fowlkes_mallows <= 1.0
            assert 0.0 <= r.jaccard <= 1.0
            assert r.adjusted_rand <= 1.0
            # relabeling clusters changes nothing
            perm = rng.permutation(4)
            r2 = rc.similarity_report(part(perm[a]), part(b))
            assert r.as_row() == r2.as_row()

    def test_self_adjusted_rand_is_one(self):
        rng = np.random.default_rng(19)
        for _ in range(20):
            a = rng.integers(0, 5, int(rng.integers(2, 50)))
            p = part(a)
            assert rc.similarity_report(p, p).adjusted_rand == 1.0

    def test_all_singletons_warns_and_reports_zero(self):
        singles = part(list(range(5)))
        blob = part([0] * 5)
        with pytest.warns(RuntimeWarning, match="Fowlkes-Mallows"):
            report = rc.similarity_report(singles, blob)
        assert report.fowlkes_mallows == 0.0

    def test_needs_two_points(self):
        with pytest.raises(DataError):
            rc.similarity_report(part([0]), part([0]))


class TestElbow:
    def test_k_equals_n_gives_zero(self):
        sample = rc.sample_from_values([1.0, 2.0, 4.0, 8.0])
        curve = rc.elbow_curve(sample, 4, 4, n_iter=3, master_seed=2)
        assert curve[0][0] == 4
        assert np.isclose(curve[0][1], 0.0)

    def test_k_one_is_population_variance(self):
        values = np.array([1.0, 3.0, 7.0, 9.0])
        curve = rc.elbow_curve(rc.sample_from_values(values), 1, 1, master_seed=0)
        assert np.isclose(curve[0][1], values.var() * values.size)

    def test_three_mode_curve_shape(self):
        sample = three_mode_weighted_sample()
        curve = rc.elbow_curve(sample, 1, 6, master_seed=9)
        inertias = [v for _, v in curve]
        assert all(b <= a + 1e-9 for a, b in zip(inertias, inertias[1:]))
        second = {
            curve[i][0]: inertias[i - 1] + inertias[i + 1] - 2 * inertias[i]
            for i in range(1, len(curve) - 1)
        }
        assert max(second, key=second.get) == 3

    def test_k_beyond_sample_rejected(self):
        with pytest.raises(DataError):
            rc.elbow_curve(rc.sample_from_values([1.0, 2.0]), 1, 3)


class TestSilhouette:
    def test_two_tight_far_clusters(self):
        values = np.array([0.0, 0.01, 0.02, 100.0, 100.01, 100.02])
        sample = rc.sample_from_values(values)
        partition = rc.assign_labels(sample, [50.0])
        mean, scores = rc.silhouette(sample, partition)
        assert mean > 0.99
        oracle_mean, oracle_scores = silhouette_by_loops(values, partition.labels)
        assert np.isclose(mean, oracle_mean)
        assert np.allclose(scores, oracle_scores)

    def test_singleton_cluster_scores_zero(self):
        sample = rc.sample_from_values([0.0, 1.0, 10.0])
        partition = rc.Partition(labels=np.array([0, 0, 1]), n_clusters=2)
        _, scores = rc.silhouette(sample, partition)
        assert scores[2] == 0.0

    def test_interleaved_identical_clusters(self):
        sample = rc.sample_from_values([5.0, 5.0, 5.0, 5.0])
        partition = rc.Partition(labels=np.array([0, 1, 0, 1]), n_clusters=2)
        mean, _ = rc.silhouette(sample, partition)
        assert mean <= 0.0

    def test_single_cluster_rejected(self):
        sample = rc.sample_from_values([1.0, 2.0, 3.0])
        partition = rc.Partition(labels=np.zeros(3, dtype=int), n_clusters=1)
        with pytest.raises(DataError, match="one cluster"):
            rc.silhouette(sample, partition)

    def test_matches_loop_oracle_on_random_data(self):
        rng = np.random.default_rng(23)
        for _ in range(15):
            n = int(rng.integers(6, 40))
            values = np.sort(rng.normal(size=n) * 10)
            labels = rng.integers(0, 3, n)
            if len(set(labels.tolist())) < 2:
                continue
            sample = rc.sample_from_values(values)
            partition = rc.Partition(labels=labels, n_clusters=3)
            mean, scores = rc.silhouette(sample, partition)
            oracle_mean, oracle_scores = silhouette_by_loops(values, labels)
            assert np.allclose(scores, oracle_scores, atol=1e-9)
            assert -1.0 <= mean <= 1.0

    def test_affine_invariance_with_positive_scale(self):
        rng = np.random.default_rng(29)
        values = np.sort(rng.normal(size=30))
        labels = rng.integers(0, 2, 30)
        sample_a = rc.sample_from_values(values)
        sample_b = rc.sample_from_values(3.5 * values + 11.0)
        partition = rc.Partition(labels=labels, n_clusters=2)
        mean_a, _ = rc.silhouette(sample_a, partition)
        mean_b, _ = rc.silhouette(sample_b, partition)
        assert np.isclose(mean_a, mean_b)
