"""Parser backends behind one small surface.

A backend turns a caption into one analyzed sentence: tokens with form,
lemma, UPOS, 1-based head, and dependency label. The spaCy backend is
the intended production path; the simple backend is a deterministic,
dependency-free stand-in that produces structurally valid placeholder
parses (flat star trees) so the export pipeline can run and be tested
on machines without a statistical parser installed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

import numpy as np


class BackendUnavailable(RuntimeError):
    """The requested parser backend cannot run in this environment."""


@dataclass(frozen=True)
class TokenAnalysis:
    form: str
    lemma: str
    upos: str
    head: int  # 1-based position of the head token; 0 marks the root
    deprel: str


@dataclass(frozen=True)
class SentenceAnalysis:
    tokens: tuple
    warning: Optional[str] = None  # set when the backend saw >1 sentence


_WORD_RE = re.compile(r"\w+(?:'\w+)?|[^\w\s]")
_SENT_BREAK_RE = re.compile(r"[.!?]\s+\S")


class SimpleBackend:
    """Deterministic fallback: flat parses, no linguistic content.

    Every token after the first attaches to token 1 with label "dep";
    lemmas are lowercased forms. Good enough to exercise the file
    formats, useless for actual relation extraction.
    """

    name = "simple"
    version = "1"

    def analyze(self, caption: str) -> SentenceAnalysis:
        forms = _WORD_RE.findall(caption)
        tokens = []
        for i, form in enumerate(forms, start=1):
            if form.isdigit():
                upos = "NUM"
            elif not any(ch.isalnum() for ch in form):
                upos = "PUNCT"
            else:
                upos = "X"
            tokens.append(
                TokenAnalysis(
                    form=form,
                    lemma=form.lower(),
                    upos=upos,
                    head=0 if i == 1 else 1,
                    deprel="root" if i == 1 else "dep",
                )
            )
        warning = None
        if _SENT_BREAK_RE.search(caption):
            warning = "caption looks like multiple sentences; emitted as one block"
        return SentenceAnalysis(tokens=tuple(tokens), warning=warning)

    def vector_dim(self) -> int:
        return 0  # no vectors of its own; caller derives fallbacks

    def lemma_vector(self, lemma: str) -> Optional[np.ndarray]:
        return None


class SpacyBackend:
    """spaCy-based analysis; requires the package and a trained model.

    English spaCy models emit the ClearNLP-style label set the
    downstream rule engine expects, so labels pass through verbatim.
    """

    name = "spacy"

    def __init__(self, model: str = "en_core_web_sm"):
        try:
            import spacy
        except ImportError as exc:
            raise BackendUnavailable(
                "the spaCy backend needs the spacy package; install it with\n"
                "  pip install spacy\n"
                "  python -m spacy download en_core_web_sm"
            ) from exc
        try:
            self._nlp = spacy.load(model)
        except OSError as exc:
            raise BackendUnavailable(
                f"spaCy model {model!r} is not installed; fetch it with\n"
                f"  python -m spacy download {model}"
            ) from exc
        self.version = f"{spacy.__version__}+{model}"

    def analyze(self, caption: str) -> SentenceAnalysis:
        doc = self._nlp(caption)
        warning = None
        if doc.has_annotation("SENT_START"):
            n_sents = sum(1 for _ in doc.sents)
            if n_sents > 1:
                warning = (
                    f"backend split the caption into {n_sents} sentences; "
                    "emitted as one block"
                )
        tokens = []
        for tok in doc:
            head = 0 if tok.head is tok else tok.head.i + 1
            deprel = (tok.dep_ or "dep").lower()
            tokens.append(
                TokenAnalysis(
                    form=tok.text,
                    lemma=tok.lemma_ or tok.text.lower(),
                    upos=tok.pos_ or "X",
                    head=head,
                    deprel=deprel,
                )
            )
        return SentenceAnalysis(tokens=tuple(tokens), warning=warning)

    def vector_dim(self) -> int:
        return int(self._nlp.vocab.vectors_length)

    def lemma_vector(self, lemma: str) -> Optional[np.ndarray]:
        vec = np.asarray(self._nlp.vocab[lemma].vector, dtype=np.float64)
        if vec.size == 0 or float(np.linalg.norm(vec)) == 0.0:
            return None
        return vec
