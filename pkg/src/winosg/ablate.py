"""Caption perturbation transforms driven by dependency-tree spans.

Subject and object spans are located on the parsed caption via
character offsets, then captions are rewritten: mask subjects, mask
objects, mask both, or swap subject and object spans pairwise. Edits
are applied right to left so earlier offsets stay valid, and every
transform reports the span positions remapped into the new caption.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .conllu import DepTree, Token, children, normalize_deprel

SUBJECT_DEPRELS = {"nsubj", "nsubjpass"}
MODIFIER_DEPRELS = ("amod", "compound", "det")
DEFAULT_MASK = "something"


class SpanError(ValueError):
    pass


class AblationKind(Enum):
    MASK_SUBJECTS = "mask_subjects"
    MASK_OBJECTS = "mask_objects"
    MASK_BOTH = "mask_both"
    SWAP = "swap"


@dataclass(frozen=True)
class SemanticSpans:
    subject_spans: tuple = ()
    object_spans: tuple = ()

    @property
    def roles_overlap(self) -> bool:
        for a in self.subject_spans:
            for b in self.object_spans:
                if a[0] < b[1] and b[0] < a[1]:
                    return True
        return False


@dataclass(frozen=True)
class TransformResult:
    caption: str
    spans: SemanticSpans
    skipped: bool


def _span_for_head(tree: DepTree, head: Token) -> tuple:
    group = [head] + children(tree, head.index, deprel_filter=MODIFIER_DEPRELS)
    starts = [t.char_start for t in group]
    ends = [t.char_end for t in group]
    if min(starts) < 0:
        raise SpanError(
            "token character offsets are missing; supply a '# text = ...' "
            "comment in the CoNLL-U input"
        )
    return min(starts), max(ends)


def _clause_head(tree: DepTree, token: Token) -> Token:
    cur = token
    while cur.head != 0:
        cur = tree.token(cur.head)
        if cur.upos in ("VERB", "AUX"):
            return cur
    return cur


def _is_prep_object(tree: DepTree, tok: Token) -> bool:
    rel = normalize_deprel(tok.deprel)
    if rel == "pobj":
        return True
    if rel in ("nmod", "obl"):
        return any(
            normalize_deprel(c.deprel) == "case" for c in children(tree, tok.index)
        )
    return False


def _merge_sorted(spans: list) -> tuple:
    spans = sorted(spans)
    merged: list = []
    for s in spans:
        if merged and s[0] < merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], s[1]))
        else:
            merged.append(s)
    return tuple(tuple(x) for x in merged)


def find_spans(tree: DepTree, include_pobj: bool = True) -> SemanticSpans:
    """Locate subject and object character spans on the caption.

    Objects are direct-object heads; prepositional objects count only
    when their clause has no direct object (and include_pobj is set).
    """
    subject_spans = []
    object_spans = []
    for tok in tree.tokens:
        rel = normalize_deprel(tok.deprel)
        if rel in SUBJECT_DEPRELS:
            subject_spans.append(_span_for_head(tree, tok))
        elif rel == "dobj":
            object_spans.append(_span_for_head(tree, tok))
        elif include_pobj and _is_prep_object(tree, tok):
            clause = _clause_head(tree, tok)
            has_dobj = any(
                normalize_deprel(c.deprel) == "dobj"
                for c in children(tree, clause.index)
            )
            if not has_dobj:
                object_spans.append(_span_for_head(tree, tok))
    return SemanticSpans(
        subject_spans=_merge_sorted(subject_spans),
        object_spans=_merge_sorted(object_spans),
    )


def _apply_edits(caption: str, spans: SemanticSpans, edits: list) -> tuple:
    """Rewrite caption per (start, end, replacement) edits on disjoint
    spans; returns the new caption and spans remapped into it."""
    edits = sorted(edits)
    out = []
    pos = 0
    remap = {}
    shift_points = []  # (original end, cumulative shift) per edit
    shift = 0
    for start, end, rep in edits:
        out.append(caption[pos:start])
        remap[(start, end)] = (start + shift, start + shift + len(rep))
        out.append(rep)
        shift += len(rep) - (end - start)
        shift_points.append((end, shift))
        pos = end
    out.append(caption[pos:])

    def moved(span):
        if tuple(span) in remap:
            return remap[tuple(span)]
        s = 0
        for end, cum in shift_points:
            if end <= span[0]:
                s = cum
        return (span[0] + s, span[1] + s)

    new_spans = SemanticSpans(
        subject_spans=tuple(moved(s) for s in spans.subject_spans),
        object_spans=tuple(moved(s) for s in spans.object_spans),
    )
    return "".join(out), new_spans


def transform(
    caption: str,
    spans: SemanticSpans,
    kind: AblationKind,
    mask_token: str = DEFAULT_MASK,
    normalize_case: bool = False,
) -> TransformResult:
    """Apply one ablation; a transform with nothing to do is skipped."""
    for start, end in spans.subject_spans + spans.object_spans:
        if not (0 <= start <= end <= len(caption)):
            raise SpanError(f"span ({start}, {end}) exceeds caption length {len(caption)}")

    if kind is AblationKind.SWAP:
        pairs = list(zip(spans.subject_spans, spans.object_spans))
        if not pairs or spans.roles_overlap:
            return TransformResult(caption, spans, skipped=True)
        edits = []
        for subj, obj in pairs:
            edits.append((subj[0], subj[1], caption[obj[0] : obj[1]]))
            edits.append((obj[0], obj[1], caption[subj[0] : subj[1]]))
    else:
        if kind is AblationKind.MASK_SUBJECTS:
            targets = spans.subject_spans
        elif kind is AblationKind.MASK_OBJECTS:
            targets = spans.object_spans
        else:
            targets = tuple(sorted(spans.subject_spans + spans.object_spans))
        if not targets:
            return TransformResult(caption, spans, skipped=True)
        edits = [(start, end, mask_token) for start, end in targets]

    new_caption, new_spans = _apply_edits(caption, spans, edits)
    if normalize_case:
        new_caption = new_caption.lower()
    return TransformResult(new_caption, new_spans, skipped=False)
