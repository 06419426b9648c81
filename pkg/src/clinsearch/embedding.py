"""Skip-gram token embeddings with negative sampling, trained in numpy.

Each document's concatenated title+abstract TID stream is one context
unit: windows span the whole stream but never cross documents. Training
is single-threaded and fully deterministic for a fixed seed. Document
and query vectors are idf-weighted sums of token vectors, compared by
cosine similarity.
"""

from __future__ import annotations

import math
import struct
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .textpipe import Lexicon

_MAGIC = b"EMBV"
_VERSION = 1
_LR_FLOOR = 1e-4
_NOISE_POWER = 0.75


@dataclass(frozen=True)
class TrainingConfig:
    dim: int = 100
    window: int = 100
    epochs: int = 10
    negative_samples: int = 5
    initial_learning_rate: float = 0.025
    min_token_count: int = 1
    rng_seed: int = 1

    def __post_init__(self):
        if self.dim <= 0 or self.window <= 0 or self.epochs <= 0:
            raise ValueError("dim, window, and epochs must be positive")
        if self.negative_samples < 1:
            raise ValueError("negative_samples must be >= 1")
        if self.initial_learning_rate <= 0:
            raise ValueError("initial_learning_rate must be positive")


@dataclass
class EmbeddingMatrix:
    """Dense vector per TID (input-side vectors of the trained model)."""

    dim: int
    vectors: dict[int, np.ndarray]
    epoch_losses: list[float] = field(default_factory=list)

    def __contains__(self, tid: int) -> bool:
        return tid in self.vectors

    def __getitem__(self, tid: int) -> np.ndarray:
        return self.vectors[tid]

    def __len__(self) -> int:
        return len(self.vectors)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -500.0, 500.0)))


def pair_loss(center: np.ndarray, context: np.ndarray, negatives: np.ndarray) -> float:
    """Negative-sampling objective for one (center, context, negatives) step.

    loss = -log sigma(center.context) - sum_j log sigma(-center.neg_j)
    """
    pos = float(center @ context)
    negs = negatives @ center
    return float(np.logaddexp(0.0, -pos) + np.logaddexp(0.0, negs).sum())


def pair_gradients(
    center: np.ndarray, context: np.ndarray, negatives: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of pair_loss w.r.t. center, context, and each negative."""
    pos_err = _sigmoid(np.array([center @ context]))[0] - 1.0
    neg_err = _sigmoid(negatives @ center)
    g_center = pos_err * context + neg_err @ negatives
    g_context = pos_err * center
    g_negatives = neg_err[:, None] * center[None, :]
    return g_center, g_context, g_negatives


def _count_pairs(stream_len: int, window: int) -> int:
    return sum(
        min(stream_len, i + window + 1) - max(0, i - window) - 1
        for i in range(stream_len)
    )


def train_skipgram(
    token_streams: Sequence[Sequence[int]], config: TrainingConfig
) -> EmbeddingMatrix:
    """Train skip-gram with negative sampling over the document streams.

    TIDs appearing in fewer than ``min_token_count`` documents are
    excluded from training and from the returned matrix. The learning
    rate decays linearly over all epochs; the per-epoch mean pair loss
    is recorded on the result.
    """
    doc_freq: Counter[int] = Counter()
    raw_count: Counter[int] = Counter()
    for stream in token_streams:
        raw_count.update(stream)
        doc_freq.update(set(stream))
    vocab = sorted(t for t, df in doc_freq.items() if df >= config.min_token_count)
    if not vocab:
        raise ValueError("empty corpus: no tokens meet min_token_count")
    row_of = {tid: row for row, tid in enumerate(vocab)}
    streams = [
        [row_of[t] for t in stream if t in row_of] for stream in token_streams
    ]
    streams = [s for s in streams if len(s) >= 2]
    if not streams:
        raise ValueError("empty corpus: no stream has two or more trainable tokens")

    vocab_size = len(vocab)
    dim = config.dim
    rng = np.random.default_rng(config.rng_seed)
    syn0 = (rng.random((vocab_size, dim)) - 0.5) / dim
    syn1 = np.zeros((vocab_size, dim))

    noise = np.array(
        [raw_count[t] for t in vocab], dtype=np.float64
    ) ** _NOISE_POWER
    noise_cdf = np.cumsum(noise)
    noise_cdf /= noise_cdf[-1]

    k = config.negative_samples if vocab_size > 1 else 0
    labels = np.zeros(1 + k)
    labels[0] = 1.0

    pairs_per_epoch = sum(_count_pairs(len(s), config.window) for s in streams)
    total_pairs = config.epochs * pairs_per_epoch
    lr_start = config.initial_learning_rate
    lr_end = min(_LR_FLOOR, lr_start)

    epoch_losses: list[float] = []
    done = 0
    for _ in range(config.epochs):
        epoch_loss = 0.0
        for stream in streams:
            n = len(stream)
            for i, center_row in enumerate(stream):
                lo = max(0, i - config.window)
                hi = min(n, i + config.window + 1)
                for j in range(lo, hi):
                    if j == i:
                        continue
                    target = stream[j]
                    idx = np.empty(1 + k, dtype=np.intp)
                    idx[0] = target
                    if k:
                        negs = np.searchsorted(noise_cdf, rng.random(k))
                        while True:
                            collide = negs == target
                            if not collide.any():
                                break
                            negs[collide] = np.searchsorted(
                                noise_cdf, rng.random(int(collide.sum()))
                            )
                        idx[1:] = negs
                    alpha = lr_start + (lr_end - lr_start) * (done / total_pairs)
                    v = syn0[center_row]
                    rows = syn1[idx]
                    scores = rows @ v
                    epoch_loss += float(
                        np.logaddexp(0.0, -scores[0])
                        + np.logaddexp(0.0, scores[1:]).sum()
                    )
                    g = (labels - _sigmoid(scores)) * alpha
                    np.add.at(syn1, idx, g[:, None] * v[None, :])
                    syn0[center_row] = v + g @ rows
                    done += 1
        epoch_losses.append(epoch_loss / pairs_per_epoch)

    vectors = {tid: syn0[row_of[tid]].copy() for tid in vocab}
    return EmbeddingMatrix(dim=dim, vectors=vectors, epoch_losses=epoch_losses)


def idf_weight(tid: int, lexicon: Lexicon) -> float:
    """ln(corpus size / document frequency) for one token."""
    df = lexicon.doc_freq.get(tid)
    if df is None:
        raise KeyError(f"TID {tid} not in lexicon")
    return math.log(lexicon.corpus_size / df)


def embed_weighted(
    tids: Iterable[int], matrix: EmbeddingMatrix, lexicon: Lexicon
) -> np.ndarray:
    """Idf-weighted sum of token vectors; unknown TIDs contribute nothing."""
    out = np.zeros(matrix.dim)
    for tid in tids:
        vec = matrix.vectors.get(tid)
        if vec is not None:
            out += idf_weight(tid, lexicon) * vec
    return out


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; zero if either vector has zero norm."""
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return max(-1.0, min(1.0, float(u @ v) / (nu * nv)))


class MatrixFormatError(ValueError):
    """Embedding matrix file is corrupt or has the wrong format."""


def save_matrix(
    matrix: EmbeddingMatrix, path: str, lexicon: Lexicon | None = None
) -> None:
    """Write the binary matrix file plus, when a lexicon is given, a
    plain-text TID -> token sidecar for debugging."""
    tids = sorted(matrix.vectors)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<III", _VERSION, matrix.dim, len(tids)))
        for tid in tids:
            if not 0 <= tid <= 0xFFFFFFFF:
                raise ValueError(f"TID {tid} does not fit in 32 bits")
            fh.write(struct.pack("<I", tid))
            fh.write(np.asarray(matrix.vectors[tid], dtype="<f4").tobytes())
    if lexicon is not None:
        with open(f"{path}.tokens.tsv", "w", encoding="utf-8") as fh:
            for tid in tids:
                fh.write(f"{tid}\t{lexicon.tid_to_token.get(tid, '?')}\n")


def load_matrix(path: str) -> EmbeddingMatrix:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _MAGIC:
        raise MatrixFormatError(f"{path}: bad magic bytes")
    version, dim, vocab = struct.unpack_from("<III", data, 4)
    if version != _VERSION:
        raise MatrixFormatError(f"{path}: unsupported version {version}")
    record = 4 + 4 * dim
    expected = 16 + vocab * record
    if len(data) != expected:
        raise MatrixFormatError(
            f"{path}: expected {expected} bytes for {vocab} records, got {len(data)}"
        )
    vectors: dict[int, np.ndarray] = {}
    offset = 16
    for _ in range(vocab):
        (tid,) = struct.unpack_from("<I", data, offset)
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset + 4)
        vectors[tid] = vec.astype(np.float64)
        offset += record
    return EmbeddingMatrix(dim=dim, vectors=vectors)
