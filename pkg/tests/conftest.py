"""Shared fixtures: fixture-data paths, parsed trees, toy stores."""

from pathlib import Path

import numpy as np
import pytest

from winosg.conllu import parse_conllu
from winosg.embed import EmbeddingStore, OovPolicy, load_embeddings
from winosg.sgparse import EntityMention, Triple

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def golden_trees():
    return {t.caption: t for t in parse_conllu(DATA / "golden.conllu")}


@pytest.fixture(scope="session")
def ud_trees():
    return {t.caption: t for t in parse_conllu(DATA / "ud_dialect.conllu")}


@pytest.fixture(scope="session")
def toy_store():
    return load_embeddings(DATA / "toy_embeddings.tsv")


@pytest.fixture()
def ortho_store():
    """Four pairwise-orthogonal unit words: dog, cat, mat, table."""
    basis = np.eye(4)
    table = {w: basis[i] for i, w in enumerate(["dog", "cat", "mat", "table"])}
    return EmbeddingStore(dim=4, table=table, oov_policy=OovPolicy.LENIENT)


def make_triple(subj: str, rel: str, obj=None, rule: str = "R1") -> Triple:
    return Triple(
        subject=EntityMention(head_lemma=subj),
        relation=rel,
        object=EntityMention(head_lemma=obj) if obj is not None else None,
        rule=rule,
    )


def random_store(rng: np.random.Generator, words, dim: int = 8) -> EmbeddingStore:
    table = {}
    for w in words:
        v = rng.normal(size=dim)
        table[w] = v / np.linalg.norm(v)
    return EmbeddingStore(dim=dim, table=table, oov_policy=OovPolicy.LENIENT)
