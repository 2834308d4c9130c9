"""Deterministic on-disk checkpoints.

Layout: a UTF-8 text header (one ``key: value`` per line, terminated by a
blank line), then the vocabulary as one JSON line, then the raw parameter
blocks as little-endian float64 in C order:

    amplitude (V, n) | phase (V, n) | measurements real (k, n) | imag (k, n)

Writing the same parameters twice produces byte-identical files — there
are no timestamps or compression headers.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .embedding import Vocabulary
from .errors import ConfigError, ParseError
from .model import ParameterSet, TrainerConfig

MAGIC = "qmatch-checkpoint"
FORMAT_VERSION = 1


def _blocks(params: ParameterSet) -> list[np.ndarray]:
    return [
        params.amplitude,
        params.phase,
        params.measurements.real,
        params.measurements.imag,
    ]


def save_checkpoint(
    path: str | Path,
    params: ParameterSet,
    config: TrainerConfig,
    vocab: Vocabulary,
) -> None:
    if len(vocab) != params.vocab_size:
        raise ConfigError(
            f"vocabulary has {len(vocab)} tokens but parameters cover "
            f"{params.vocab_size}"
        )
    vocab_line = json.dumps(list(vocab.tokens), ensure_ascii=False)
    header = (
        f"{MAGIC} v{FORMAT_VERSION}\n"
        f"vocab_size: {params.vocab_size}\n"
        f"dim: {params.dim}\n"
        f"measurements: {params.k}\n"
        f"config: {json.dumps(config.to_dict(), sort_keys=True)}\n"
        "\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8"))
        fh.write(vocab_line.encode("utf-8"))
        fh.write(b"\n")
        for block in _blocks(params):
            fh.write(np.ascontiguousarray(block, dtype="<f8").tobytes())


def load_checkpoint(
    path: str | Path,
) -> tuple[ParameterSet, TrainerConfig, Vocabulary]:
    path = Path(path)
    raw = path.read_bytes()
    head, sep, rest = raw.partition(b"\n\n")
    if not sep:
        raise ParseError(f"{path}: missing checkpoint header terminator")
    lines = head.decode("utf-8").splitlines()
    if not lines or not lines[0].startswith(MAGIC):
        raise ParseError(f"{path}: not a checkpoint file")
    version = lines[0][len(MAGIC):].strip()
    if version != f"v{FORMAT_VERSION}":
        raise ParseError(
            f"{path}: unsupported checkpoint version {version!r}"
        )
    fields: dict[str, str] = {}
    for line in lines[1:]:
        key, _, value = line.partition(":")
        fields[key.strip()] = value.strip()
    try:
        vocab_size = int(fields["vocab_size"])
        dim = int(fields["dim"])
        k = int(fields["measurements"])
        config = TrainerConfig.from_dict(json.loads(fields["config"]))
    except KeyError as exc:
        raise ParseError(f"{path}: missing checkpoint field {exc}") from exc
    except ValueError as exc:
        raise ParseError(f"{path}: bad checkpoint field ({exc})") from exc

    vocab_line, sep, payload = rest.partition(b"\n")
    if not sep:
        raise ParseError(f"{path}: truncated vocabulary record")
    tokens = json.loads(vocab_line.decode("utf-8"))
    if len(tokens) != vocab_size:
        raise ParseError(
            f"{path}: header claims {vocab_size} tokens, found {len(tokens)}"
        )
    # PAD/UNK are already part of the stored token list.
    vocab = Vocabulary(
        tokens=list(tokens), index={t: i for i, t in enumerate(tokens)}
    )

    shapes = [(vocab_size, dim), (vocab_size, dim), (k, dim), (k, dim)]
    expected = sum(r * c for r, c in shapes) * 8
    if len(payload) != expected:
        raise ParseError(
            f"{path}: parameter payload is {len(payload)} bytes, "
            f"expected {expected}"
        )
    blocks = []
    offset = 0
    for shape in shapes:
        count = shape[0] * shape[1]
        blocks.append(
            np.frombuffer(payload, dtype="<f8", count=count, offset=offset)
            .astype(np.float64)
            .reshape(shape)
        )
        offset += count * 8
    amplitude, phase, meas_re, meas_im = blocks
    params = ParameterSet(
        amplitude=amplitude.copy(),
        phase=phase.copy(),
        measurements=(meas_re + 1j * meas_im).astype(np.complex128),
    )
    if config.embedding_dim != dim or config.num_measurements != k:
        raise ParseError(
            f"{path}: header dimensions disagree with stored config"
        )
    return params, config, vocab
