"""Caption-to-CoNLL-U ingestion adapter.

Runs a dependency-parser backend over a captions file and exports the
two sidecar formats the analysis core reads: CoNLL-U sentence blocks
and a per-lemma embedding TSV.
"""

from .backends import (
    BackendUnavailable,
    SentenceAnalysis,
    SimpleBackend,
    SpacyBackend,
    TokenAnalysis,
)
from .ingest import (
    FALLBACK_DIM,
    CaptionRecord,
    IngestError,
    IngestManifest,
    IngestResult,
    fallback_vector,
    ingest,
    load_captions,
    render_conllu,
    render_embeddings,
)

__version__ = "0.1.0"

__all__ = [
    "BackendUnavailable",
    "CaptionRecord",
    "FALLBACK_DIM",
    "IngestError",
    "IngestManifest",
    "IngestResult",
    "SentenceAnalysis",
    "SimpleBackend",
    "SpacyBackend",
    "TokenAnalysis",
    "fallback_vector",
    "ingest",
    "load_captions",
    "render_conllu",
    "render_embeddings",
    "__version__",
]
