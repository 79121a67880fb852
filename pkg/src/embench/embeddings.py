"""Embedding containers, cosine geometry, and the text embedding file format.

The on-disk format is a plain-text table. Line 1 is a header::

    <n_codes> <dim> <method> <seed> <corpus_fingerprint>

followed by one line per code, in lexicographic vocabulary order::

    <code> <v1> <v2> ... <vdim>

Floats are written with shortest round-trip precision, so writing the same
embedding twice yields byte-identical files and load(save(e)) == e exactly.
"""

from dataclasses import dataclass

import numpy as np

from .corpus import ConceptVocabulary

KNOWN_METHODS = ("RANDOM", "AE", "NCF", "CBOW", "CBOWA", "BEHRT")

NULL_FINGERPRINT = "0" * 16


class EmbeddingFormatError(ValueError):
    """An embedding file violates the text format contract."""


def _check_token(value: str, what: str) -> str:
    if not isinstance(value, str) or not value or any(ch.isspace() for ch in value):
        raise ValueError(f"{what} must be a non-empty token without whitespace")
    return value


@dataclass(frozen=True)
class EmbeddingSet:
    """A float64 vector per vocabulary code, plus provenance metadata."""

    vocabulary: ConceptVocabulary
    vectors: np.ndarray
    method: str
    seed: int
    corpus_fingerprint: str = NULL_FINGERPRINT

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        object.__setattr__(self, "vectors", vectors)
        if vectors.ndim != 2:
            raise ValueError("vectors must be a 2-d array")
        if vectors.shape[0] != len(self.vocabulary):
            raise ValueError(
                f"vectors have {vectors.shape[0]} rows for {len(self.vocabulary)} codes"
            )
        if vectors.shape[1] < 1:
            raise ValueError("embedding dimension must be positive")
        if not np.all(np.isfinite(vectors)):
            raise ValueError("vectors must be finite")
        _check_token(self.method, "method")
        _check_token(self.corpus_fingerprint, "corpus_fingerprint")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def vector(self, code: str) -> np.ndarray:
        return self.vectors[self.vocabulary.index(code)]

    def __eq__(self, other):
        return (
            isinstance(other, EmbeddingSet)
            and self.vocabulary == other.vocabulary
            and self.method == other.method
            and self.seed == other.seed
            and self.corpus_fingerprint == other.corpus_fingerprint
            and self.vectors.shape == other.vectors.shape
            and bool(np.all(self.vectors == other.vectors))
        )

    def subset(self, codes) -> "EmbeddingSet":
        """Restrict to the given codes (which must all be present)."""
        vocab = ConceptVocabulary.from_codes(codes)
        rows = [self.vocabulary.index(c) for c in vocab]
        return EmbeddingSet(
            vocabulary=vocab,
            vectors=self.vectors[rows],
            method=self.method,
            seed=self.seed,
            corpus_fingerprint=self.corpus_fingerprint,
        )


def random_embeddings(
    vocabulary: ConceptVocabulary,
    dim: int,
    seed: int,
    corpus_fingerprint: str = NULL_FINGERPRINT,
) -> EmbeddingSet:
    """Standard normal vectors; the chance-level baseline for every evaluation."""
    rng = np.random.default_rng(seed)
    vectors = rng.standard_normal((len(vocabulary), dim))
    return EmbeddingSet(vocabulary, vectors, "RANDOM", seed, corpus_fingerprint)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding.

    Zero vectors have no direction and are an error.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError("vectors must have equal length")
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("undefined cosine for zero vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def cosine_matrix(emb: EmbeddingSet) -> np.ndarray:
    """All-pairs cosine similarities (V x V), diagonal exactly 1."""
    norms = np.linalg.norm(emb.vectors, axis=1)
    if np.any(norms == 0.0):
        code = emb.vocabulary[int(np.argmin(norms))]
        raise ValueError(f"undefined cosine for zero vector (code {code!r})")
    unit = emb.vectors / norms[:, None]
    sims = unit @ unit.T
    np.clip(sims, -1.0, 1.0, out=sims)
    np.fill_diagonal(sims, 1.0)
    return sims


def _ranked_others(sims_row: np.ndarray, self_index: int) -> np.ndarray:
    """Indices by descending similarity, ties broken lexicographically.

    Vocabulary order is lexicographic, so a stable sort on -similarity breaks
    ties in favour of the lexicographically smaller code.
    """
    order = np.argsort(-sims_row, kind="stable")
    return order[order != self_index]


@dataclass(frozen=True)
class Neighbourhood:
    """A query code with its nearest neighbours, best first."""

    query: str
    neighbours: tuple[tuple[str, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "neighbours", tuple(self.neighbours))
        cosines = [c for _, c in self.neighbours]
        if any(b > a for a, b in zip(cosines, cosines[1:])):
            raise ValueError("neighbour cosines must be non-increasing")
        if any(not -1.0 <= c <= 1.0 for c in cosines):
            raise ValueError("cosines must lie in [-1, 1]")
        if any(code == self.query for code, _ in self.neighbours):
            raise ValueError("query must not appear among its neighbours")

    def codes(self) -> list[str]:
        return [code for code, _ in self.neighbours]

    def __len__(self):
        return len(self.neighbours)

    def __iter__(self):
        return iter(self.neighbours)


def nearest_neighbours(emb: EmbeddingSet, code: str, k: int) -> Neighbourhood:
    """Top-k neighbours of a code by cosine similarity, excluding the code itself."""
    if k < 1 or k > len(emb.vocabulary) - 1:
        raise ValueError(f"k must be in [1, {len(emb.vocabulary) - 1}]")
    i = emb.vocabulary.index(code)
    x = emb.vectors[i]
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise ValueError("undefined cosine for zero vector")
    norms = np.linalg.norm(emb.vectors, axis=1)
    if np.any(norms == 0.0):
        j = int(np.argmin(norms))
        raise ValueError(f"undefined cosine for zero vector (code {emb.vocabulary[j]!r})")
    # per-pair arithmetic (not one matrix product) so that any independent
    # pairwise recomputation reproduces these values bit for bit
    sims = np.array([cosine(x, row) for row in emb.vectors])
    ranked = _ranked_others(sims, i)[:k]
    return Neighbourhood(
        query=code,
        neighbours=tuple((emb.vocabulary[int(j)], float(sims[int(j)])) for j in ranked),
    )


def neighbour_index(emb: EmbeddingSet, k: int) -> np.ndarray:
    """Row r holds the indices of the top-k neighbours of code r (self excluded)."""
    if k < 1:
        raise ValueError("k must be positive")
    if k > len(emb.vocabulary) - 1:
        raise ValueError(f"k={k} exceeds the {len(emb.vocabulary) - 1} available neighbours")
    sims = cosine_matrix(emb)
    out = np.empty((len(emb.vocabulary), k), dtype=np.int64)
    for i in range(len(emb.vocabulary)):
        out[i] = _ranked_others(sims[i], i)[:k]
    return out


def save_embeddings(emb: EmbeddingSet, path) -> None:
    lines = [f"{len(emb.vocabulary)} {emb.dim} {emb.method} {emb.seed} {emb.corpus_fingerprint}"]
    for i, code in enumerate(emb.vocabulary):
        values = " ".join(repr(float(x)) for x in emb.vectors[i])
        lines.append(f"{code} {values}")
    with open(path, "wb") as fh:
        fh.write(("".join(line + "\n" for line in lines)).encode("utf-8"))


def load_embeddings(path) -> EmbeddingSet:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise EmbeddingFormatError("empty embedding file")
    header = lines[0].split()
    if len(header) != 5:
        raise EmbeddingFormatError("header must be: n_codes dim method seed corpus_fingerprint")
    try:
        n_codes, dim = int(header[0]), int(header[1])
        seed = int(header[3])
    except ValueError:
        raise EmbeddingFormatError("header counts and seed must be integers") from None
    method, fingerprint = header[2], header[4]
    body = lines[1:]
    if len(body) != n_codes:
        raise EmbeddingFormatError(f"header promises {n_codes} codes, file has {len(body)} rows")

    codes = []
    vectors = np.empty((n_codes, dim), dtype=np.float64)
    for r, line in enumerate(body):
        parts = line.split()
        if len(parts) != dim + 1:
            raise EmbeddingFormatError(f"line {r + 2}: expected {dim} values, got {len(parts) - 1}")
        codes.append(parts[0])
        try:
            vectors[r] = [float(x) for x in parts[1:]]
        except ValueError:
            raise EmbeddingFormatError(f"line {r + 2}: non-numeric vector component") from None
    if codes != sorted(codes) or len(set(codes)) != len(codes):
        raise EmbeddingFormatError("codes must be unique and in lexicographic order")
    try:
        return EmbeddingSet(ConceptVocabulary(codes), vectors, method, seed, fingerprint)
    except ValueError as exc:
        raise EmbeddingFormatError(str(exc)) from None
