import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmsair.errors import ContractError
from mmsair.metrics import accuracy, per_class_metrics, task_metrics, weighted_f1


def brute_force_weighted_f1(preds, golds, num_classes):
    """Independent recomputation with explicit counting loops."""
    n = len(golds)
    total = 0.0
    for c in range(num_classes):
        tp = sum(1 for p, g in zip(preds, golds) if p == c and g == c)
        fp = sum(1 for p, g in zip(preds, golds) if p == c and g != c)
        fn = sum(1 for p, g in zip(preds, golds) if p != c and g == c)
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        total += support / n * f1
    return total


class TestAccuracy:
    def test_perfect(self):
        assert accuracy([0, 1, 2], [0, 1, 2]) == 1.0

    def test_single_class_on_balanced_set(self):
        assert accuracy([0] * 9, [0, 1, 2] * 3) == pytest.approx(1 / 3)

    def test_length_mismatch(self):
        with pytest.raises(ContractError):
            accuracy([0], [0, 1])

    def test_empty_rejected(self):
        with pytest.raises(ContractError):
            accuracy([], [])


class TestWeightedF1:
    def test_perfect_is_one(self):
        assert weighted_f1([0, 1, 2, 1], [0, 1, 2, 1], 3) == 1.0

    def test_hand_computed_example(self):
        # golds [0,0,1], preds [0,0,0]: class0 F1 = 4/5, class1 F1 = 0
        assert weighted_f1([0, 0, 0], [0, 0, 1], 2) == pytest.approx(8 / 15)

    @given(st.integers(0, 2**32 - 1), st.permutations(list(range(3))))
    @settings(max_examples=40)
    def test_relabeling_invariance(self, seed, perm):
        rng = np.random.default_rng(seed)
        golds = rng.integers(0, 3, 30)
        preds = rng.integers(0, 3, 30)
        remap = np.array(perm)
        assert weighted_f1(preds, golds, 3) == pytest.approx(
            weighted_f1(remap[preds], remap[golds], 3), abs=1e-12
        )

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=100)
    def test_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n_classes = int(rng.choice([3, 20]))
        n = int(rng.integers(1, 60))
        golds = rng.integers(0, n_classes, n).tolist()
        preds = rng.integers(0, n_classes, n).tolist()
        assert weighted_f1(preds, golds, n_classes) == pytest.approx(
            brute_force_weighted_f1(preds, golds, n_classes), abs=1e-12
        )


class TestPerClass:
    def test_supports_sum_to_sample_count(self):
        rng = np.random.default_rng(0)
        golds = rng.integers(0, 5, 40)
        preds = rng.integers(0, 5, 40)
        rows = per_class_metrics(preds, golds, 5)
        assert sum(r["support"] for r in rows) == 40

    def test_task_metrics_in_range(self):
        rng = np.random.default_rng(1)
        golds = rng.integers(0, 3, 25)
        preds = rng.integers(0, 3, 25)
        tm = task_metrics(preds, golds, 3)
        assert 0.0 <= tm.accuracy <= 1.0
        assert 0.0 <= tm.weighted_f1 <= 1.0
