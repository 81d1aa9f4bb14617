"""Phrase embedding table and cosine similarity.

The on-disk format is a TSV with a `#dim D` header line followed by
`token<TAB>v1 v2 ... vD` rows.  Vectors are L2-normalized at load time;
phrase vectors are renormalized token means, so cosine similarity is a
plain dot product.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Optional

import numpy as np

log = logging.getLogger(__name__)

NORM_TOL = 1e-6


class OovPolicy(Enum):
    STRICT = "strict"
    LENIENT = "lenient"


class EmbeddingLoadError(ValueError):
    """Malformed embedding file (bad header, dim mismatch, zero vector)."""


class OovError(KeyError):
    """STRICT lookup of a phrase with no in-vocabulary token."""


@dataclass
class EmbeddingStore:
    dim: int
    table: dict = field(default_factory=dict)
    oov_policy: OovPolicy = OovPolicy.LENIENT

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.table

    def __len__(self) -> int:
        return len(self.table)


def load_embeddings(source, oov_policy: OovPolicy = OovPolicy.LENIENT) -> EmbeddingStore:
    """Load and normalize an embedding TSV (see module docstring)."""
    if isinstance(source, str) and "\n" in source:
        stream: IO[str] = io.StringIO(source)
    elif hasattr(source, "read"):
        stream = source
    else:
        stream = open(source, encoding="utf-8")

    try:
        header = stream.readline().strip()
        parts = header.split()
        if len(parts) != 2 or parts[0] != "#dim":
            raise EmbeddingLoadError(f"line 1: expected '#dim D' header, got {header!r}")
        try:
            dim = int(parts[1])
        except ValueError:
            raise EmbeddingLoadError(f"line 1: non-integer dimension {parts[1]!r}") from None
        if dim < 1:
            raise EmbeddingLoadError(f"line 1: dimension must be >= 1, got {dim}")

        table: dict = {}
        for lineno, raw in enumerate(stream, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise EmbeddingLoadError(f"line {lineno}: expected token<TAB>floats")
            token, vec_text = line.split("\t", 1)
            values = vec_text.split()
            if len(values) != dim:
                raise EmbeddingLoadError(
                    f"line {lineno}: expected {dim} floats for {token!r}, got {len(values)}"
                )
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError:
                raise EmbeddingLoadError(f"line {lineno}: non-numeric value") from None
            norm = float(np.linalg.norm(vec))
            if norm == 0.0:
                raise EmbeddingLoadError(f"line {lineno}: zero vector for {token!r}")
            key = token.lower()
            if key in table:
                log.warning("duplicate embedding for %r; keeping the later entry", token)
            table[key] = vec / norm
    finally:
        if stream is not source and not (isinstance(source, str) and "\n" in source):
            stream.close()

    return EmbeddingStore(dim=dim, table=table, oov_policy=oov_policy)


def phrase_vector(store: EmbeddingStore, phrase: str) -> Optional[np.ndarray]:
    """Renormalized mean of the phrase's in-vocabulary token vectors.

    Returns None for a fully out-of-vocabulary phrase under LENIENT;
    raises OovError under STRICT.
    """
    if not phrase or not phrase.strip():
        raise ValueError("phrase must be non-empty")
    hits = [store.table[tok] for tok in phrase.lower().split() if tok in store.table]
    if not hits:
        if store.oov_policy is OovPolicy.STRICT:
            raise OovError(f"no embedding for any token of phrase {phrase!r}")
        return None
    mean = np.mean(hits, axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        # Tokens cancelled exactly; treat like a missing phrase.
        if store.oov_policy is OovPolicy.STRICT:
            raise OovError(f"tokens of phrase {phrase!r} sum to the zero vector")
        return None
    return mean / norm


def cos_sim(store: EmbeddingStore, x: str, y: str) -> float:
    """Cosine similarity of two phrases; 0.0 when either is unresolvable."""
    vx = phrase_vector(store, x)
    vy = phrase_vector(store, y)
    if vx is None or vy is None:
        return 0.0
    return float(np.dot(vx, vy))
