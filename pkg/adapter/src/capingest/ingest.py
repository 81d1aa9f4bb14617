"""Caption ingestion: parse with a backend, export CoNLL-U and embeddings.

The captions input is JSONL with id, caption_0, caption_1 per record.
Each caption becomes exactly one sentence block in the CoNLL-U output,
carrying an `# id = <record id>/<0|1>` comment and a `# text` comment
that must survive a read back byte-for-byte. The embeddings TSV lists
one row per distinct lemma (`#dim` header first); lemmas the backend
has no vector for get a deterministic unit vector derived from the
lemma string alone, so output is reproducible run to run.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .backends import SentenceAnalysis

FALLBACK_DIM = 32


class IngestError(ValueError):
    """Malformed captions input or unexportable token text."""


@dataclass(frozen=True)
class CaptionRecord:
    id: str
    caption_0: str
    caption_1: str

    def numbered_captions(self):
        return ((0, self.caption_0), (1, self.caption_1))


@dataclass(frozen=True)
class IngestManifest:
    captions_path: Path
    conllu_path: Path
    embeddings_path: Path
    backend_name: str
    backend_version: str


@dataclass(frozen=True)
class IngestResult:
    manifest: IngestManifest
    sentence_count: int
    lemma_count: int
    warnings: tuple


def load_captions(path) -> list:
    records = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}: line {lineno}: invalid JSON ({exc})") from exc
            for key in ("id", "caption_0", "caption_1"):
                if key not in d:
                    raise IngestError(f"{path}: line {lineno}: missing field {key!r}")
            rid = str(d["id"])
            if rid in seen:
                raise IngestError(f"{path}: line {lineno}: duplicate record id {rid!r}")
            seen.add(rid)
            records.append(CaptionRecord(rid, str(d["caption_0"]), str(d["caption_1"])))
    return records


def fallback_vector(lemma: str, dim: int) -> np.ndarray:
    """Deterministic unit vector seeded from the lemma string."""
    seed = int.from_bytes(hashlib.sha256(lemma.encode("utf-8")).digest()[:8], "big")
    v = np.random.default_rng(seed).standard_normal(dim)
    return v / np.linalg.norm(v)


def _check_exportable(text: str, what: str) -> str:
    # Tab or newline inside a column would corrupt the line layout.
    if any(ch in text for ch in "\t\n\r"):
        raise IngestError(f"{what} contains tab/newline and cannot be exported: {text!r}")
    return text


def render_conllu(records, analyses, backend) -> str:
    """One sentence block per caption, in input order.

    `analyses` maps (record id, caption index) to a SentenceAnalysis.
    The leading comment block records backend provenance; downstream
    readers ignore comments they do not know.
    """
    lines = [f"# ingest: backend={backend.name} version={backend.version}", ""]
    for rec in records:
        for idx, caption in rec.numbered_captions():
            sa = analyses[(rec.id, idx)]
            lines.append(f"# id = {rec.id}/{idx}")
            lines.append(f"# text = {_check_exportable(caption, 'caption')}")
            if sa.warning:
                lines.append(f"# warning = {sa.warning}")
            for i, tok in enumerate(sa.tokens, start=1):
                lines.append(
                    "\t".join(
                        [
                            str(i),
                            _check_exportable(tok.form, "token form"),
                            _check_exportable(tok.lemma, "token lemma"),
                            tok.upos,
                            "_",
                            "_",
                            str(tok.head),
                            tok.deprel,
                            "_",
                            "_",
                        ]
                    )
                )
            lines.append("")
    return "\n".join(lines)


def render_embeddings(analyses, backend) -> str:
    """`#dim D` header plus one row per distinct lemma, sorted."""
    lemmas = sorted({t.lemma for sa in analyses.values() for t in sa.tokens})
    dim = backend.vector_dim() or FALLBACK_DIM
    lines = [f"#dim {dim}"]
    for lemma in lemmas:
        vec = backend.lemma_vector(lemma)
        if vec is None:
            vec = fallback_vector(lemma, dim)
        lines.append(lemma + "\t" + " ".join(format(float(x), ".8g") for x in vec))
    return "\n".join(lines) + "\n"


def ingest(captions_path, conllu_path, embeddings_path, backend) -> IngestResult:
    records = load_captions(captions_path)
    analyses: dict = {}
    warnings = []
    for rec in records:
        for idx, caption in rec.numbered_captions():
            sa: SentenceAnalysis = backend.analyze(caption)
            analyses[(rec.id, idx)] = sa
            if sa.warning:
                warnings.append(f"{rec.id}/{idx}: {sa.warning}")
    conllu_path = Path(conllu_path)
    embeddings_path = Path(embeddings_path)
    conllu_path.write_text(render_conllu(records, analyses, backend), encoding="utf-8")
    embeddings_path.write_text(render_embeddings(analyses, backend), encoding="utf-8")
    manifest = IngestManifest(
        captions_path=Path(captions_path),
        conllu_path=conllu_path,
        embeddings_path=embeddings_path,
        backend_name=backend.name,
        backend_version=backend.version,
    )
    lemma_count = len({t.lemma for sa in analyses.values() for t in sa.tokens})
    return IngestResult(
        manifest=manifest,
        sentence_count=len(analyses),
        lemma_count=lemma_count,
        warnings=tuple(warnings),
    )
