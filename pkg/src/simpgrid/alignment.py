"""Tiered sentence-alignment engine.

Builds the base similarity matrix through a three-level fallback cascade
(semantic embeddings -> hybrid TF-IDF -> positional zero matrix), applies a
positional penalty controlled by the linearity bias, and assigns each
simplified sentence to one original sentence (many-to-one).

Scoring and assignment are written in plain float arithmetic, in a fixed
order of operations, so the browser client can reproduce server links
bit-for-bit from the same stored matrix (see fixtures/alignment_parity.json).
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter

import httpx
import numpy as np

from .model import (
    AlignmentLink,
    SentenceRecord,
    SimilarityMatrix,
    SimilarityTier,
    check_lambda,
)
from .textstats import _word_tokens


class EmbeddingUnavailable(Exception):
    """Tier-1 embeddings cannot be used; the cascade falls through."""


class DimensionMismatch(ValueError):
    pass


class HttpEmbeddingProvider:
    """Client for an embeddings endpoint. Request {"input": [...], "model": m},
    response {"data": [{"embedding": [...]}, ...]} in input order.

    Stateless: every call opens its own connection, so instances are safe to
    use from many concurrent tasks.
    """

    kind = "remote_semantic"

    def __init__(
        self,
        endpoint_url: str,
        model: str,
        api_key: str = "",
        timeout_ms: int = 30000,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint_url = endpoint_url
        self.model = model
        self.api_key = api_key
        self.timeout_ms = timeout_ms
        self._transport = transport

    def embed(self, sentences: list[str]) -> list[list[float]]:
        if not self.endpoint_url:
            raise EmbeddingUnavailable("no embedding endpoint configured")
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            with httpx.Client(transport=self._transport, timeout=self.timeout_ms / 1000.0) as client:
                resp = client.post(
                    self.endpoint_url,
                    json={"input": sentences, "model": self.model},
                    headers=headers,
                )
        except httpx.HTTPError as exc:
            raise EmbeddingUnavailable(f"embedding request failed: {exc}") from exc
        if resp.status_code != 200:
            raise EmbeddingUnavailable(f"embedding endpoint returned {resp.status_code}")
        try:
            data = resp.json()["data"]
            return [item["embedding"] for item in data]
        except (KeyError, TypeError, ValueError) as exc:
            raise EmbeddingUnavailable(f"malformed embedding response: {exc}") from exc


class DeterministicMockProvider:
    """Embeddings derived from a seeded hash of the sentence text.

    Gives reproducible vectors (same input -> same output, across processes)
    without any model runtime; dimension defaults to 16.
    """

    kind = "deterministic_mock"

    def __init__(self, dim: int = 16, seed: int = 0):
        self.dim = dim
        self.seed = seed

    def embed(self, sentences: list[str]) -> list[list[float]]:
        return [self._vector(s) for s in sentences]

    def _vector(self, text: str) -> list[float]:
        root = hashlib.sha256(f"{self.seed}:{text}".encode("utf-8")).digest()
        out: list[float] = []
        block_index = 0
        while len(out) < self.dim:
            block = hashlib.sha256(root + block_index.to_bytes(4, "big")).digest()
            for k in range(0, len(block) - 3, 4):
                u = int.from_bytes(block[k : k + 4], "big")
                out.append(u / 2**31 - 1.0)
            block_index += 1
        return out[: self.dim]


def embed_batch(provider, sentences: list[str]) -> list[list[float]]:
    """One vector per sentence, validated: uniform dimension, finite entries.

    Raises EmbeddingUnavailable on any provider failure or invalid batch;
    the all-zero-vector check happens in build_similarity, which treats such
    a batch as unavailable too.
    """
    if not sentences or any(not s for s in sentences):
        raise ValueError("sentences must be a non-empty list of non-empty strings")
    try:
        vectors = provider.embed(sentences)
    except EmbeddingUnavailable:
        raise
    except Exception as exc:
        raise EmbeddingUnavailable(f"embedding provider error: {exc}") from exc
    if len(vectors) != len(sentences):
        raise EmbeddingUnavailable(
            f"expected {len(sentences)} vectors, got {len(vectors)}"
        )
    dims = {len(v) for v in vectors}
    if len(dims) != 1:
        raise EmbeddingUnavailable(f"inconsistent vector dimensions: {sorted(dims)}")
    for v in vectors:
        if not all(math.isfinite(x) for x in v):
            raise EmbeddingUnavailable("non-finite entry in embedding vector")
    return vectors


def cosine_matrix(
    orig_vecs: list[list[float]],
    simp_vecs: list[list[float]],
    tier: SimilarityTier = SimilarityTier.SEMANTIC,
) -> SimilarityMatrix:
    """Pairwise cosine similarity; zero-norm vectors yield 0 rows/columns."""
    a = np.asarray(orig_vecs, dtype=np.float64)
    b = np.asarray(simp_vecs, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("both vector lists must be non-empty and rectangular")
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    a_norm = np.linalg.norm(a, axis=1, keepdims=True)
    b_norm = np.linalg.norm(b, axis=1, keepdims=True)
    a = np.divide(a, a_norm, out=np.zeros_like(a), where=a_norm != 0)
    b = np.divide(b, b_norm, out=np.zeros_like(b), where=b_norm != 0)
    values = np.clip(a @ b.T, -1.0, 1.0)
    return SimilarityMatrix(tier=tier, values=values.tolist())


# --------------------------------------------------------------------------
# Tier 2: hybrid TF-IDF (word unigrams + character 3-grams)
# --------------------------------------------------------------------------


def _char_ngrams(word: str, n: int = 3) -> list[str]:
    padded = f"#{word}#"
    return [padded[i : i + n] for i in range(len(padded) - n + 1)]


def _sentence_features(sentence: str) -> tuple[Counter, Counter]:
    words = _word_tokens(sentence)
    word_counts = Counter(words)
    char_counts: Counter = Counter()
    for w in words:
        char_counts.update(_char_ngrams(w))
    return word_counts, char_counts


def _tfidf_block(counts: Counter, idf: dict[str, float]) -> dict[str, float]:
    vec = {term: tf * idf[term] for term, tf in counts.items()}
    norm = math.sqrt(sum(x * x for x in vec.values()))
    if norm == 0:
        return {}
    return {t: x / norm for t, x in vec.items()}


def _sparse_dot(a: dict[str, float], b: dict[str, float]) -> float:
    if len(b) < len(a):
        a, b = b, a
    return sum(x * b[t] for t, x in a.items() if t in b)


def tfidf_matrix(orig_sentences: list[str], simp_sentences: list[str]) -> SimilarityMatrix:
    """Lexical similarity over word unigrams plus boundary-padded character
    3-grams.

    Document frequencies come from the union of all sentences of both
    documents; idf = ln((1+N)/(1+df)) + 1. The word and character blocks are
    L2-normalized independently and combined with equal weight, so every
    entry lies in [0, 1] and identical sentences score exactly 1.
    """
    if not orig_sentences or not simp_sentences:
        raise ValueError("both sentence lists must be non-empty")
    corpus = [_sentence_features(s) for s in orig_sentences + simp_sentences]
    n_docs = len(corpus)

    word_df: Counter = Counter()
    char_df: Counter = Counter()
    for word_counts, char_counts in corpus:
        word_df.update(word_counts.keys())
        char_df.update(char_counts.keys())
    word_idf = {t: math.log((1 + n_docs) / (1 + df)) + 1.0 for t, df in word_df.items()}
    char_idf = {t: math.log((1 + n_docs) / (1 + df)) + 1.0 for t, df in char_df.items()}

    blocks = [
        (_tfidf_block(wc, word_idf), _tfidf_block(cc, char_idf))
        for wc, cc in corpus
    ]
    orig_blocks = blocks[: len(orig_sentences)]
    simp_blocks = blocks[len(orig_sentences) :]

    values = [
        [
            0.5 * _sparse_dot(ow, sw) + 0.5 * _sparse_dot(oc, sc)
            for sw, sc in simp_blocks
        ]
        for ow, oc in orig_blocks
    ]
    return SimilarityMatrix(tier=SimilarityTier.LEXICAL, values=values)


def positional_matrix(n_orig: int, n_simp: int) -> SimilarityMatrix:
    """Terminal fallback: all-zero matrix, so assignment degrades to pure
    positional tie-breaking."""
    if n_orig < 1 or n_simp < 1:
        raise ValueError("matrix dimensions must be positive")
    values = [[0.0] * n_simp for _ in range(n_orig)]
    return SimilarityMatrix(tier=SimilarityTier.POSITIONAL, values=values)


def build_similarity(
    provider,
    orig: list[SentenceRecord],
    simp: list[SentenceRecord],
    enable_lexical: bool = True,
) -> SimilarityMatrix:
    """Run the fallback cascade; never fails for non-empty sentence lists.

    Tier 1 embeds both documents in one batch and is rejected wholesale if
    the provider errors, any vector is non-finite or all-zero, or dimensions
    disagree. Tier 2 is the hybrid TF-IDF; `enable_lexical=False` is a test
    hook that forces the terminal positional tier.
    """
    if not orig or not simp:
        raise ValueError("both sentence lists must be non-empty")
    orig_texts = [r.text for r in orig]
    simp_texts = [r.text for r in simp]

    if provider is not None:
        try:
            vectors = embed_batch(provider, orig_texts + simp_texts)
            if any(all(x == 0 for x in v) for v in vectors):
                raise EmbeddingUnavailable("all-zero embedding vector")
            return cosine_matrix(
                vectors[: len(orig_texts)], vectors[len(orig_texts) :], SimilarityTier.SEMANTIC
            )
        except Exception:
            pass

    if enable_lexical:
        try:
            matrix = tfidf_matrix(orig_texts, simp_texts)
            if all(math.isfinite(x) for row in matrix.values for x in row):
                return matrix
        except Exception:
            pass

    return positional_matrix(len(orig), len(simp))


# --------------------------------------------------------------------------
# Linearity-bias scoring and many-to-one assignment
# --------------------------------------------------------------------------


def score(
    base: SimilarityMatrix | list[list[float]],
    orig_rel_pos: list[float],
    simp_rel_pos: list[float],
    linearity_bias: float,
) -> list[list[float]]:
    """Penalized score matrix:

        score[i][j] = base[i][j] - |orig_rel_pos[i] - simp_rel_pos[j]| * bias

    Plain float arithmetic in this exact order; the client mirrors it.
    """
    linearity_bias = check_lambda(linearity_bias)
    values = base.values if isinstance(base, SimilarityMatrix) else base
    if len(values) != len(orig_rel_pos):
        raise ValueError("orig_rel_pos length does not match matrix rows")
    if values and len(values[0]) != len(simp_rel_pos):
        raise ValueError("simp_rel_pos length does not match matrix cols")
    return [
        [
            values[i][j] - abs(orig_rel_pos[i] - simp_rel_pos[j]) * linearity_bias
            for j in range(len(simp_rel_pos))
        ]
        for i in range(len(orig_rel_pos))
    ]


def assign(
    score_matrix: list[list[float]],
    orig_rel_pos: list[float],
    simp_rel_pos: list[float],
    base: list[list[float]] | None = None,
) -> list[AlignmentLink]:
    """Columnwise argmax: each simplified sentence j gets the original i with
    the highest score; ties break to the smallest |rel_pos| difference, then
    to the smallest i. Exactly one link per column, ordered by column.

    `base` supplies the raw (pre-penalty) similarity recorded on each link;
    when omitted the score itself is recorded.
    """
    if not score_matrix or not score_matrix[0]:
        raise ValueError("score matrix must be non-empty")
    n_rows = len(score_matrix)
    n_cols = len(score_matrix[0])
    links = []
    for j in range(n_cols):
        best_i = 0
        best_score = score_matrix[0][j]
        best_dist = abs(orig_rel_pos[0] - simp_rel_pos[j])
        for i in range(1, n_rows):
            s = score_matrix[i][j]
            if s > best_score:
                best_i, best_score = i, s
                best_dist = abs(orig_rel_pos[i] - simp_rel_pos[j])
            elif s == best_score:
                d = abs(orig_rel_pos[i] - simp_rel_pos[j])
                if d < best_dist:
                    best_i, best_dist = i, d
        links.append(
            AlignmentLink(
                simplified_index=j,
                original_index=best_i,
                score=best_score,
                base_similarity=(base[best_i][j] if base is not None else best_score),
            )
        )
    return links


def align(
    base: SimilarityMatrix,
    orig_rel_pos: list[float],
    simp_rel_pos: list[float],
    linearity_bias: float,
) -> list[AlignmentLink]:
    """Score the base matrix at the given bias and assign links."""
    scored = score(base, orig_rel_pos, simp_rel_pos, linearity_bias)
    return assign(scored, orig_rel_pos, simp_rel_pos, base=base.values)


def crossing_count(links: list[AlignmentLink]) -> int:
    """Number of link pairs that invert order (j1 < j2 but orig(j1) > orig(j2));
    fewer crossings means a more monotone alignment."""
    ordered = sorted(links, key=lambda l: l.simplified_index)
    count = 0
    for x in range(len(ordered)):
        for y in range(x + 1, len(ordered)):
            if ordered[x].original_index > ordered[y].original_index:
                count += 1
    return count
