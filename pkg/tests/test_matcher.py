import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmatch.embedding import Vocabulary
from qmatch.errors import ConfigError, DegenerateInputError, ShapeError
from qmatch.matcher import (
    apply_dropout,
    forward_sentence,
    represent,
    represent_dense,
    score,
    triplet_loss,
)
from qmatch.model import TrainerConfig, init_parameters

RNG = np.random.default_rng(20260814)

VOCAB = Vocabulary.from_tokens([f"w{i}" for i in range(24)])


def small_config(**overrides):
    base = dict(
        embedding_dim=6,
        num_measurements=5,
        window_sizes=(1, 2, 3),
        dropout_rate=0.0,
        max_sentence_len=40,
        seed=7,
    )
    base.update(overrides)
    return TrainerConfig(**base)


def make_params(config, scramble=True):
    params = init_parameters(VOCAB, config)
    if scramble:
        # move the measurements off their one-hot start so tests exercise
        # genuinely complex vectors
        rng = np.random.default_rng(123)
        raw = rng.normal(size=params.measurements.shape) + 1j * rng.normal(
            size=params.measurements.shape
        )
        params.measurements = raw / np.linalg.norm(raw, axis=1)[:, None]
    return params


def random_ids(length, rng=RNG):
    return rng.integers(2, len(VOCAB), size=length)


# ------------------------------------------------------------------ dropout


def test_apply_dropout_eval_mode_is_identity():
    x = RNG.normal(size=(4, 5))
    out, mask = apply_dropout(x, 0.5, None, train=False)
    assert mask is None
    assert out is x


def test_apply_dropout_zero_rate_is_identity():
    x = RNG.normal(size=10)
    out, mask = apply_dropout(x, 0.0, np.random.default_rng(0), train=True)
    assert mask is None
    assert np.array_equal(out, x)


def test_apply_dropout_scales_survivors():
    x = np.ones(100_000)
    out, mask = apply_dropout(x, 0.9, np.random.default_rng(11), train=True)
    survivors = out[out != 0.0]
    # inverted dropout: survivors are scaled by 1/keep = 10
    np.testing.assert_allclose(survivors, 10.0)
    assert abs(survivors.size / x.size - 0.1) < 0.01
    np.testing.assert_allclose(out, x * mask)


def test_apply_dropout_survivor_fraction_matches_rate():
    x = np.ones(100_000)
    out, _ = apply_dropout(x, 0.1, np.random.default_rng(3), train=True)
    kept = np.count_nonzero(out) / x.size
    assert abs(kept - 0.9) < 0.01
    # unbiased in expectation
    assert abs(out.mean() - 1.0) < 0.02


def test_apply_dropout_keep_prob_reading():
    x = np.ones(100_000)
    out, _ = apply_dropout(
        x, 0.9, np.random.default_rng(5), train=True, is_keep_prob=True
    )
    kept = np.count_nonzero(out) / x.size
    assert abs(kept - 0.9) < 0.01


def test_apply_dropout_complex_mask_is_real_per_element():
    x = np.full(1000, 1.0 + 1.0j)
    out, mask = apply_dropout(x, 0.5, np.random.default_rng(8), train=True)
    # real and imaginary parts live or die together
    assert np.array_equal(out.real == 0.0, out.imag == 0.0)
    assert mask.dtype == np.float64


def test_apply_dropout_rejects_bad_rates():
    rng = np.random.default_rng(0)
    with pytest.raises(ConfigError):
        apply_dropout(np.ones(3), 1.0, rng, train=True)
    with pytest.raises(ConfigError):
        apply_dropout(np.ones(3), -0.1, rng, train=True)
    with pytest.raises(ConfigError):
        apply_dropout(np.ones(3), 0.0, rng, train=True, is_keep_prob=True)


def test_apply_dropout_needs_rng_in_train_mode():
    with pytest.raises(ConfigError):
        apply_dropout(np.ones(3), 0.5, None, train=True)


# ------------------------------------------------- forward representation


def test_forward_matches_dense_reference_local():
    config = small_config()
    params = make_params(config)
    for length in (1, 2, 5, 9):
        ids = random_ids(length)
        fast = represent(ids, params, config)
        dense = represent_dense(ids, params, config)
        np.testing.assert_allclose(fast, dense, atol=1e-10)


def test_forward_matches_dense_reference_global():
    config = small_config(mixture="global", window_sizes=(1,))
    params = make_params(config)
    for length in (1, 3, 8):
        ids = random_ids(length)
        np.testing.assert_allclose(
            represent(ids, params, config),
            represent_dense(ids, params, config),
            atol=1e-10,
        )


def test_forward_matches_dense_on_real_only_model():
    config = small_config(complex_valued=False)
    params = make_params(config, scramble=False)
    assert np.all(params.phase == 0.0)
    ids = random_ids(6)
    np.testing.assert_allclose(
        represent(ids, params, config),
        represent_dense(ids, params, config),
        atol=1e-10,
    )


def test_representation_shape_local_vs_global():
    local = small_config()
    glob = small_config(mixture="global")
    params = make_params(local)
    ids = random_ids(4)
    assert represent(ids, params, local).shape == (
        local.num_measurements * len(local.window_sizes),
    )
    assert represent(ids, params, glob).shape == (glob.num_measurements,)
    assert local.representation_len == 15
    assert glob.representation_len == 5


def test_representation_entries_are_probabilities():
    config = small_config()
    params = make_params(config)
    rep = represent(random_ids(7), params, config)
    assert np.all(rep >= 0.0)
    assert np.all(rep <= 1.0)


def test_forward_truncates_long_sentences():
    config = small_config(max_sentence_len=5)
    params = make_params(config)
    ids = random_ids(12)
    np.testing.assert_allclose(
        represent(ids, params, config),
        represent(ids[:5], params, config),
        atol=0,
    )


def test_forward_rejects_empty_sentence():
    config = small_config()
    params = make_params(config)
    with pytest.raises(DegenerateInputError):
        represent(np.array([], dtype=np.int64), params, config)


def test_forward_handles_padding_rows():
    # the padding row has a degenerate amplitude norm: representation must
    # stay finite and agree with the dense path
    config = small_config()
    params = make_params(config)
    ids = np.array([0, 3, 0, 5], dtype=np.int64)
    rep = represent(ids, params, config)
    assert np.all(np.isfinite(rep))
    np.testing.assert_allclose(rep, represent_dense(ids, params, config), atol=1e-10)


def test_forward_deterministic_in_eval_mode():
    config = small_config()
    params = make_params(config)
    ids = random_ids(6)
    a = represent(ids, params, config)
    b = represent(ids, params, config)
    assert np.array_equal(a, b)


def test_forward_train_mode_dropout_changes_output():
    config = small_config(dropout_rate=0.5)
    params = make_params(config)
    ids = random_ids(8)
    rep_eval = represent(ids, params, config)
    rep_train, _ = forward_sentence(
        ids, params, config, train=True, rng=np.random.default_rng(21)
    )
    assert not np.allclose(rep_eval, rep_train)


def test_forward_train_mode_without_dropout_matches_eval():
    config = small_config(dropout_rate=0.0)
    params = make_params(config)
    ids = random_ids(8)
    rep_train, tape = forward_sentence(
        ids, params, config, train=True, rng=np.random.default_rng(2)
    )
    np.testing.assert_allclose(rep_train, represent(ids, params, config), atol=0)
    assert tape.emb_mask is None
    assert tape.pooled_mask is None


@settings(max_examples=60, deadline=None)
@given(
    length=st.integers(min_value=1, max_value=12),
    seed=st.integers(min_value=0, max_value=2**31 - 1),
)
def test_forward_dense_agreement_property(length, seed):
    config = small_config()
    params = make_params(config)
    rng = np.random.default_rng(seed)
    ids = rng.integers(0, len(VOCAB), size=length)
    np.testing.assert_allclose(
        represent(ids, params, config),
        represent_dense(ids, params, config),
        atol=1e-9,
    )


# -------------------------------------------------------------------- score


def test_score_of_identical_vectors():
    u = RNG.uniform(size=10)
    assert abs(score(u, u) - 1.0) < 1e-12


def test_score_hand_oracle():
    u = np.array([1.0, 0.0, 1.0])
    v = np.array([1.0, 1.0, 0.0])
    assert abs(score(u, v) - 0.5) < 1e-12


def test_score_zero_vector_scores_zero():
    assert score(np.zeros(4), np.ones(4)) == 0.0
    assert score(np.ones(4), np.zeros(4)) == 0.0


def test_score_shape_mismatch():
    with pytest.raises(ShapeError):
        score(np.ones(3), np.ones(4))


def test_score_scale_invariance():
    u = RNG.uniform(size=8)
    v = RNG.uniform(size=8)
    assert abs(score(u, v) - score(3.7 * u, 0.002 * v)) < 1e-12


# ------------------------------------------------------------- triplet loss


def test_triplet_loss_hinge_values():
    assert triplet_loss(0.9, 0.2, margin=0.1) == 0.0
    assert abs(triplet_loss(0.5, 0.6, margin=0.1) - 0.2) < 1e-15
    assert abs(triplet_loss(0.5, 0.45, margin=0.1) - 0.05) < 1e-15


def test_triplet_loss_kink_is_zero():
    # exactly at the margin the hinge closes
    assert triplet_loss(0.6, 0.5, margin=0.1) == 0.0


def test_triplet_loss_nonnegative_property():
    for _ in range(100):
        s_pos, s_neg = RNG.uniform(-1, 1, size=2)
        assert triplet_loss(s_pos, s_neg, margin=0.1) >= 0.0
