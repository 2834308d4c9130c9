"""Words as complex superposition states.

Each vocabulary entry owns two real lookup rows: amplitudes r and phases
phi, combined as r * exp(i*phi) per coordinate.  The L2 norm of a row is
kept as a word-importance weight and the direction as a unit state.
Signed amplitudes are allowed (a sign flip is a phase shift by pi), which
lets pretrained real vectors seed the amplitude table directly.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ShapeError

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"

# Norm given to structurally-empty states (padding row, all-zero vectors).
DEGENERATE_WEIGHT = 1e-8

_STRIP_CHARS = string.punctuation + string.whitespace


def tokenize(text: str) -> list[str]:
    """Lowercase whitespace tokenizer that strips surrounding punctuation.

    Interior punctuation (hyphens, apostrophes) is preserved; tokens that
    are nothing but punctuation disappear.  No stemming.
    """
    out = []
    for piece in text.lower().split():
        token = piece.strip(_STRIP_CHARS)
        if token:
            out.append(token)
    return out


@dataclass
class Vocabulary:
    """Token/index bijection with reserved padding and unknown entries.

    Index 0 is the padding token, index 1 the unknown token; real tokens
    start at index 2.  Encoding never fails: unseen tokens map to UNK.
    """

    tokens: list[str]
    index: dict[str, int] = field(repr=False)

    @classmethod
    def from_tokens(cls, ordered_tokens: list[str]) -> "Vocabulary":
        tokens = [PAD_TOKEN, UNK_TOKEN, *ordered_tokens]
        index = {t: i for i, t in enumerate(tokens)}
        if len(index) != len(tokens):
            raise ValueError("duplicate tokens in vocabulary")
        return cls(tokens=tokens, index=index)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def encode(self, words: list[str]) -> np.ndarray:
        unk = self.index[UNK_TOKEN]
        return np.array([self.index.get(w, unk) for w in words], dtype=np.int64)

    def decode(self, ids) -> list[str]:
        return [self.tokens[int(i)] for i in ids]


@dataclass
class WordState:
    """Unit-norm complex state plus the norm it was stripped of."""

    state: np.ndarray
    weight: float


def assemble_word_vector(amplitudes: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Combine one amplitude row and one phase row into a complex vector."""
    amplitudes = np.asarray(amplitudes, dtype=np.float64)
    phases = np.asarray(phases, dtype=np.float64)
    if amplitudes.shape != phases.shape or amplitudes.ndim != 1:
        raise ShapeError(
            f"amplitude/phase rows must be matching vectors, "
            f"got {amplitudes.shape} and {phases.shape}"
        )
    return amplitudes * np.exp(1j * phases)


def uniform_state(dim: int) -> np.ndarray:
    """Zero-phase state with equal mass on every coordinate."""
    return np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128)


def normalize_word(vector: np.ndarray) -> WordState:
    """Split a raw word vector into a unit state and its norm.

    A numerically zero vector (padding, or fully dropped out) has no
    direction; it becomes the uniform state with weight DEGENERATE_WEIGHT
    so downstream softmax weighting treats it as negligible.
    """
    vector = np.asarray(vector, dtype=np.complex128)
    if vector.ndim != 1 or vector.size == 0:
        raise ShapeError(f"expected a non-empty vector, got shape {vector.shape}")
    weight = float(np.linalg.norm(vector))
    if weight < 1e-300:
        return WordState(state=uniform_state(vector.size), weight=DEGENERATE_WEIGHT)
    return WordState(state=vector / weight, weight=weight)


def init_phases(vocab_size: int, dim: int, seed: int) -> np.ndarray:
    """Phase table drawn uniformly from [-pi, pi), deterministic per seed."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-math.pi, math.pi, size=(vocab_size, dim))


def _pad_row(dim: int) -> np.ndarray:
    return np.full(dim, DEGENERATE_WEIGHT / math.sqrt(dim), dtype=np.float64)


def read_glove_vectors(path: str, dim: int) -> dict[str, np.ndarray]:
    """Parse a whitespace-separated embedding text file.

    Each line holds a token followed by ``dim`` floats.  Malformed lines
    raise ParseError naming the file and 1-based line number.
    """
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            token, values = parts[0], parts[1:]
            if len(values) != dim:
                raise ParseError(
                    f"{path}:{lineno}: expected {dim} values for "
                    f"{token!r}, found {len(values)}"
                )
            try:
                vectors[token] = np.array([float(x) for x in values], dtype=np.float64)
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: non-numeric value ({exc})") from None
    return vectors


def init_amplitudes_from_glove(
    vocab: Vocabulary,
    dim: int,
    seed: int,
    glove_path: str | None = None,
) -> np.ndarray:
    """Amplitude table seeded from pretrained vectors where available.

    Tokens found in the embedding file copy their vector; everything else
    (including the unknown token, and every token when ``glove_path`` is
    None) draws i.i.d. uniform(-0.25, 0.25) coordinates.  The padding row
    is fixed at norm DEGENERATE_WEIGHT.
    """
    rng = np.random.default_rng(seed)
    pretrained = read_glove_vectors(glove_path, dim) if glove_path else {}
    table = np.empty((len(vocab), dim), dtype=np.float64)
    for i, token in enumerate(vocab.tokens):
        if i == 0:
            table[0] = _pad_row(dim)
        elif token in pretrained:
            table[i] = pretrained[token]
        else:
            table[i] = rng.uniform(-0.25, 0.25, size=dim)
    return table
