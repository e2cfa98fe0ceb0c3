import math

import numpy as np
import pytest

from mmsair import prediction as pred
from mmsair.errors import ContractError, DimensionError
from mmsair.prediction import LossWeights, cross_entropy, joint_loss, predict
from mmsair.tensor import Tensor


def zero_heads(d_comb=4):
    return pred.HeadParams(
        w_s=Tensor(np.zeros((3, d_comb))),
        b_s=Tensor(np.zeros(3)),
        w_i=Tensor(np.zeros((20, d_comb))),
        b_i=Tensor(np.zeros(20)),
    )


class TestPredict:
    def test_zero_params_give_uniform(self):
        p_s, p_i = predict(Tensor(np.random.default_rng(0).normal(size=(2, 4))), zero_heads())
        assert np.allclose(p_s.data, 1 / 3, atol=1e-15)
        assert np.allclose(p_i.data, 1 / 20, atol=1e-15)

    def test_logit_shift_invariance(self):
        rng = np.random.default_rng(1)
        heads = pred.init_head_params(rng, 4)
        x = Tensor(rng.normal(size=(2, 4)))
        p_s, p_i = predict(x, heads)
        heads.b_s.data += 5.0
        heads.b_i.data -= 3.0
        p_s2, p_i2 = predict(x, heads)
        assert np.allclose(p_s.data, p_s2.data, atol=1e-12)
        assert np.allclose(p_i.data, p_i2.data, atol=1e-12)

    def test_brute_force_oracle_d2(self):
        heads = pred.HeadParams(
            w_s=Tensor([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
            b_s=Tensor([0.1, -0.2, 0.0]),
            w_i=Tensor(np.zeros((20, 2))),
            b_i=Tensor(np.zeros(20)),
        )
        x = np.array([[0.5, -1.5]])
        logits = x @ heads.w_s.data.T + heads.b_s.data
        expected = np.exp(logits) / np.exp(logits).sum()
        p_s, _ = predict(Tensor(x), heads)
        assert np.allclose(p_s.data, expected, atol=1e-15)

    def test_distributions_sum_to_one(self):
        rng = np.random.default_rng(2)
        heads = pred.init_head_params(rng, 6)
        p_s, p_i = predict(Tensor(rng.normal(size=(5, 6))), heads)
        assert np.allclose(p_s.data.sum(axis=1), 1.0, atol=1e-12)
        assert np.allclose(p_i.data.sum(axis=1), 1.0, atol=1e-12)

    def test_width_mismatch(self):
        with pytest.raises(DimensionError):
            predict(Tensor(np.zeros((1, 5))), zero_heads(d_comb=4))


class TestCrossEntropy:
    def test_perfect_prediction_zero_loss(self):
        p = Tensor([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        assert cross_entropy(p, [0, 1]).item() == 0.0

    def test_uniform_three_class_is_ln3(self):
        p = Tensor(np.full((4, 3), 1 / 3))
        assert abs(cross_entropy(p, [0, 1, 2, 0]).item() - math.log(3)) < 1e-12

    def test_hand_computed_batch(self):
        p = Tensor([[0.5, 0.5], [0.25, 0.75]])
        expected = (math.log(2) + math.log(4)) / 2
        assert abs(cross_entropy(p, [0, 0]).item() - expected) < 1e-12

    def test_zero_probability_clamped_with_warning(self):
        pred.reset_clamp_warning_count()
        p = Tensor([[1.0, 0.0]])
        loss = cross_entropy(p, [1])
        assert np.isfinite(loss.item())
        assert pred.clamp_warning_count() == 1

    def test_nonnegative(self):
        rng = np.random.default_rng(3)
        raw = rng.uniform(0.01, 1, (6, 3))
        p = Tensor(raw / raw.sum(axis=1, keepdims=True))
        assert cross_entropy(p, rng.integers(0, 3, 6)).item() >= 0.0

    def test_batch_mismatch(self):
        with pytest.raises(DimensionError):
            cross_entropy(Tensor(np.full((2, 3), 1 / 3)), [0])


class TestJointLoss:
    def test_unit_weights_sum(self):
        l1, l2 = Tensor(0.7), Tensor(1.3)
        assert joint_loss(l1, l2, LossWeights(1.0, 1.0)).item() == 2.0

    def test_single_task_modes(self):
        l1, l2 = Tensor(0.7), Tensor(1.3)
        assert joint_loss(l1, l2, LossWeights(2.0, 0.0)).item() == pytest.approx(1.4)
        assert joint_loss(l1, l2, LossWeights(0.0, 3.0)).item() == pytest.approx(3.9)

    def test_weight_scaling_scales_loss_only(self):
        rng = np.random.default_rng(4)
        heads = pred.init_head_params(rng, 4)
        x = Tensor(rng.normal(size=(3, 4)))
        p_s, p_i = predict(x, heads)
        l1 = cross_entropy(p_s, [0, 1, 2])
        l2 = cross_entropy(p_i, [3, 4, 5])
        base = joint_loss(l1, l2, LossWeights(1.0, 1.0)).item()
        scaled = joint_loss(l1, l2, LossWeights(2.5, 2.5)).item()
        assert scaled == pytest.approx(2.5 * base, rel=1e-15)
        # probabilities are independent of the loss weights by construction
        assert np.array_equal(np.argmax(p_s.data, axis=1), np.argmax(p_s.data, axis=1))

    def test_both_zero_weights_rejected(self):
        with pytest.raises(ContractError):
            joint_loss(Tensor(1.0), Tensor(1.0), LossWeights(0.0, 0.0))

    def test_head_gradients_pass_fd_check(self):
        from mmsair.tensor import finite_difference_check

        rng = np.random.default_rng(5)
        heads = pred.init_head_params(rng, 4)
        x = Tensor(rng.uniform(-1, 1, (3, 4)))

        def f():
            p_s, p_i = predict(x, heads)
            return joint_loss(
                cross_entropy(p_s, [0, 2, 1]),
                cross_entropy(p_i, [5, 0, 19]),
                LossWeights(1.0, 1.0),
            )

        result = finite_difference_check(f, heads.named())
        assert result.ok
        assert result.max_rel_err < 1e-4
