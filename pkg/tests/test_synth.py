"""Tests for the Gaussian-mixture generator and its exact posteriors."""

import math

import mpmath
import numpy as np
import pytest

from uncproxy.errors import InvalidInputError
from uncproxy.synth import SynthConfig, generate, grid_means, true_posterior

mpmath.mp.dps = 50


def _config(**overrides):
    base = dict(
        n_samples=200,
        n_classes=4,
        feature_dim=2,
        component_means=grid_means(4, 2, 1.3),
        component_scale=1.0,
        annotators_k=10,
        seed=5,
    )
    base.update(overrides)
    return SynthConfig(**base)


class TestTruePosterior:
    def test_equidistant_point_is_uniform(self):
        cfg = _config()
        post = true_posterior(np.zeros(2), cfg)
        np.testing.assert_array_equal(post, [0.25] * 4)

    def test_component_mean_dominates_when_separated(self):
        cfg = _config(component_means=grid_means(4, 2, 10.0))
        post = true_posterior(cfg.component_means[2], cfg)
        assert post[2] >= 1.0 - 1e-6

    def test_matches_bayes_rule_oracle(self):
        cfg = _config(n_classes=3, component_means=np.array([[0.0, 0.0], [2.0, 1.0], [-1.0, 3.0]]),
                      component_scale=1.7)
        g = np.random.default_rng(2)
        for _ in range(10):
            x = g.normal(size=2) * 3
            post = true_posterior(x, cfg)
            weights = []
            for mean in cfg.component_means:
                d2 = mpmath.fsum(
                    (mpmath.mpf(repr(float(a))) - mpmath.mpf(repr(float(b)))) ** 2
                    for a, b in zip(x, mean)
                )
                weights.append(mpmath.exp(-d2 / (2 * mpmath.mpf(repr(cfg.component_scale)) ** 2)))
            total = mpmath.fsum(weights)
            for c in range(3):
                assert post[c] == pytest.approx(float(weights[c] / total), abs=1e-10)


class TestGenerate:
    def test_same_seed_is_bitwise_identical(self):
        a = generate(_config())
        b = generate(_config())
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.true_posteriors, b.true_posteriors)
        np.testing.assert_array_equal(a.annotation_counts, b.annotation_counts)
        np.testing.assert_array_equal(a.is_ood, b.is_ood)
        assert a.sample_ids == b.sample_ids

    def test_counts_sum_to_annotator_count(self):
        ds = generate(_config(annotators_k=7))
        assert np.all(ds.annotation_counts.sum(axis=1) == 7)

    def test_ood_flag_frequency_is_rounded_fraction(self):
        ds = generate(_config(n_samples=200, ood_fraction=0.1, ood_shift=np.array([5.0, 0.0])))
        assert int(ds.is_ood.sum()) == 20
        ds = generate(_config(n_samples=207, ood_fraction=0.2, ood_shift=np.array([5.0, 0.0])))
        assert int(ds.is_ood.sum()) == 41  # 41.4 rounds down

    def test_ood_shift_applied_after_annotation(self):
        shift = np.array([50.0, 0.0])
        plain = generate(_config(seed=33))
        shifted = generate(_config(seed=33, ood_fraction=0.2, ood_shift=shift))
        moved = shifted.is_ood
        # same pre-shift randomness: annotations and posteriors agree
        np.testing.assert_array_equal(plain.annotation_counts, shifted.annotation_counts)
        np.testing.assert_array_equal(plain.true_posteriors, shifted.true_posteriors)
        np.testing.assert_allclose(
            shifted.features[moved] - plain.features[moved],
            np.tile(shift, (int(moved.sum()), 1)),
            atol=0,
        )
        np.testing.assert_array_equal(shifted.features[~moved], plain.features[~moved])

    def test_mean_disagreement_matches_monte_carlo_expectation(self):
        k = 10
        cfg = _config(n_samples=5000, annotators_k=k, seed=80)
        ds = generate(cfg)
        soft = ds.annotation_counts / k
        observed = float(np.mean(1.0 - np.sum(soft**2, axis=1)))

        # independent estimate: E[1 - sum((counts/K)^2)] = d_true (1 - 1/K)
        # averaged over the feature distribution, by plain monte carlo
        g = np.random.RandomState(1234)
        draws = 10**5
        classes = g.randint(0, cfg.n_classes, size=draws)
        x = cfg.component_means[classes] + cfg.component_scale * g.randn(draws, cfg.feature_dim)
        diffs = x[:, None, :] - cfg.component_means[None, :, :]
        logits = -np.sum(diffs**2, axis=2) / (2 * cfg.component_scale**2)
        logits -= logits.max(axis=1, keepdims=True)
        post = np.exp(logits)
        post /= post.sum(axis=1, keepdims=True)
        d_true = 1.0 - np.sum(post**2, axis=1)
        expected = float(np.mean(d_true) * (1.0 - 1.0 / k))
        assert abs(observed - expected) <= 0.05

    def test_tiny_scale_gives_unanimous_annotations(self):
        ds = generate(_config(n_samples=1000, component_scale=0.05,
                              component_means=grid_means(4, 2, 1.3), seed=3))
        unanimous = np.mean(ds.annotation_counts.max(axis=1) == 10)
        assert unanimous >= 0.99

    def test_many_annotators_converge_to_posterior(self):
        ds = generate(_config(n_samples=300, annotators_k=1000, seed=9))
        soft = ds.annotation_counts / 1000.0
        l1 = np.abs(soft - ds.true_posteriors).sum(axis=1)
        assert float(l1.mean()) <= 0.05


class TestConfigValidation:
    def test_mean_shape_checked(self):
        with pytest.raises(InvalidInputError):
            _config(component_means=np.zeros((3, 2)))

    def test_fraction_requires_valid_range(self):
        with pytest.raises(InvalidInputError):
            _config(ood_fraction=1.0)

    def test_shift_shape_checked(self):
        with pytest.raises(InvalidInputError):
            _config(ood_shift=np.array([1.0, 2.0, 3.0]))
