"""Model introspection: word importance, window-pair match maps, and
nearest words to each measurement vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embedding import PAD_TOKEN, UNK_TOKEN, Vocabulary, normalize_word, tokenize
from .errors import DegenerateInputError
from .matcher import score
from .mixture import slide_windows, softmax_weights
from .model import GLOBAL_MIXTURE, ParameterSet, TrainerConfig


@dataclass
class WordImportance:
    token: str
    norm: float


def word_importance(
    params: ParameterSet, vocab: Vocabulary, top_n: int | None = None
) -> list[WordImportance]:
    """Words ranked by the L2 norm of their learned amplitude rows.

    Descending by norm; ties broken alphabetically so the ranking is
    reproducible.  A zeroed row always lands at the bottom.
    """
    norms = np.linalg.norm(params.amplitude, axis=1)
    order = sorted(range(len(vocab)), key=lambda i: (-norms[i], vocab.tokens[i]))
    if top_n is not None:
        order = order[:top_n]
    return [WordImportance(token=vocab.tokens[i], norm=float(norms[i])) for i in order]


@dataclass
class WindowWeights:
    start: int
    tokens: list[str]
    weights: np.ndarray     # softmax over the window's word norms, sums to 1


@dataclass
class MatchWeightMap:
    window_size: int
    question_window: WindowWeights
    answer_window: WindowWeights
    similarity: float       # cosine between the two windows' feature columns


def _window_features(
    token_ids: np.ndarray, params: ParameterSet, width: int
) -> tuple[np.ndarray, np.ndarray, list[list[int]]]:
    """Per-window measurement-probability columns plus word weights.

    Returns (probs of shape (num_windows, k), weight rows padded with 0,
    window index lists).
    """
    amp = params.amplitude[token_ids]
    pi = np.linalg.norm(amp, axis=1)
    states = np.stack(
        [
            normalize_word(a * np.exp(1j * p)).state
            for a, p in zip(amp, params.phase[token_ids])
        ]
    )
    inner = states @ params.measurements.conj().T
    inner_sq = inner.real**2 + inner.imag**2
    windows = slide_windows(list(range(len(token_ids))), width)
    probs = np.zeros((len(windows), params.k))
    weights = np.zeros((len(windows), width))
    for j, win in enumerate(windows):
        w = softmax_weights(pi[win])
        probs[j] = w @ inner_sq[win]
        weights[j, : len(win)] = w
    return probs, weights, windows


def match_weight_map(
    params: ParameterSet,
    config: TrainerConfig,
    vocab: Vocabulary,
    question: str,
    answer: str,
) -> MatchWeightMap:
    """Best-matching window pair between a question and an answer.

    Scores every window pair per window size by the cosine of its
    measurement-probability columns and keeps the argmax; ties resolve
    to the smallest (size, question start, answer start).  The returned
    word weights are the same softmax weights the mixture uses, so each
    window's weights sum to one.
    """
    q_tokens, a_tokens = tokenize(question), tokenize(answer)
    if not q_tokens or not a_tokens:
        raise DegenerateInputError("question and answer must both contain tokens")
    q_ids, a_ids = vocab.encode(q_tokens), vocab.encode(a_tokens)
    if config.mixture == GLOBAL_MIXTURE:
        # no sliding: one window spanning each full sentence
        pairs = [
            (
                max(len(q_ids), len(a_ids)),
                tuple(x[:1] for x in _window_features(q_ids, params, len(q_ids))),
                tuple(x[:1] for x in _window_features(a_ids, params, len(a_ids))),
            )
        ]
    else:
        pairs = [
            (
                width,
                _window_features(q_ids, params, width),
                _window_features(a_ids, params, width),
            )
            for width in config.window_sizes
        ]

    best: MatchWeightMap | None = None
    for width, q_feat, a_feat in pairs:
        q_probs, q_weights, q_windows = q_feat
        a_probs, a_weights, a_windows = a_feat
        for jq in range(len(q_windows)):
            for ja in range(len(a_windows)):
                sim = score(q_probs[jq], a_probs[ja])
                if best is None or sim > best.similarity + 1e-15:
                    q_win, a_win = q_windows[jq], a_windows[ja]
                    best = MatchWeightMap(
                        window_size=width,
                        question_window=WindowWeights(
                            start=jq,
                            tokens=[q_tokens[i] for i in q_win],
                            weights=q_weights[jq, : len(q_win)].copy(),
                        ),
                        answer_window=WindowWeights(
                            start=ja,
                            tokens=[a_tokens[i] for i in a_win],
                            weights=a_weights[ja, : len(a_win)].copy(),
                        ),
                        similarity=sim,
                    )
    assert best is not None
    return best


@dataclass
class MeasurementNeighbors:
    measurement: int
    tokens: list[str]
    similarities: list[float]


def measurement_neighbors(
    params: ParameterSet, vocab: Vocabulary, top_n: int = 10
) -> list[MeasurementNeighbors]:
    """The most similar vocabulary words to each measurement vector.

    Similarity is the modulus of the Hermitian inner product between the
    measurement and the word's unit state (phase-invariant).  Padding
    and unknown-word rows are excluded.
    """
    skip = {vocab.index[PAD_TOKEN], vocab.index[UNK_TOKEN]}
    word_ids = [i for i in range(len(vocab)) if i not in skip]
    states = np.stack(
        [
            normalize_word(
                params.amplitude[i] * np.exp(1j * params.phase[i])
            ).state
            for i in word_ids
        ]
    )
    sims = np.abs(params.measurements @ states.conj().T)  # (k, |words|)
    out = []
    for m in range(params.k):
        order = sorted(
            range(len(word_ids)),
            key=lambda j: (-sims[m, j], vocab.tokens[word_ids[j]]),
        )[:top_n]
        out.append(
            MeasurementNeighbors(
                measurement=m,
                tokens=[vocab.tokens[word_ids[j]] for j in order],
                similarities=[float(sims[m, j]) for j in order],
            )
        )
    return out
