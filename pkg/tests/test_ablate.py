"""Span finding and caption transforms on the fixture corpus."""

import re

import pytest

from winosg.ablate import (
    AblationKind,
    SemanticSpans,
    SpanError,
    find_spans,
    transform,
)
from winosg.conllu import DepTree, Token


def words(text):
    return sorted(w.lower() for w in re.findall(r"[\w']+", text))


def test_spans_on_minimal_pair(golden_trees):
    spans = find_spans(golden_trees["The dog is chasing the cat"])
    assert spans.subject_spans == ((0, 7),)
    assert spans.object_spans == ((19, 26),)


def test_spans_include_modifiers(golden_trees):
    spans = find_spans(golden_trees["The woman's dog chases a ball"])
    cap = "The woman's dog chases a ball"
    (s,) = spans.subject_spans
    (o,) = spans.object_spans
    assert cap[s[0] : s[1]] == "dog"
    assert cap[o[0] : o[1]] == "a ball"


def test_no_object_spans_when_no_object(golden_trees):
    spans = find_spans(golden_trees["The dog is not sleeping"])
    assert spans.subject_spans != ()
    assert spans.object_spans == ()


def test_pobj_counts_only_without_dobj(golden_trees):
    # clause with a direct object: prep object not included
    spans = find_spans(golden_trees["the man who holds a hat"])
    assert len(spans.object_spans) == 1
    # intransitive clause with a preposition: prep object included
    spans = find_spans(golden_trees["The dog sleeps under the table"])
    cap = "The dog sleeps under the table"
    (o,) = spans.object_spans
    assert cap[o[0] : o[1]] == "the table"
    # toggle removes prepositional objects entirely
    spans = find_spans(golden_trees["The dog sleeps under the table"], include_pobj=False)
    assert spans.object_spans == ()


def test_mask_examples(golden_trees):
    cap = "The dog is chasing the cat"
    spans = find_spans(golden_trees[cap])
    assert transform(cap, spans, AblationKind.MASK_SUBJECTS).caption == "something is chasing the cat"
    assert transform(cap, spans, AblationKind.MASK_OBJECTS).caption == "The dog is chasing something"
    assert transform(cap, spans, AblationKind.MASK_BOTH).caption == "something is chasing something"


def test_swap_example(golden_trees):
    cap = "The dog is chasing the cat"
    spans = find_spans(golden_trees[cap])
    out = transform(cap, spans, AblationKind.SWAP)
    assert out.caption == "the cat is chasing The dog"
    assert not out.skipped


def test_swap_normalize_case(golden_trees):
    cap = "The dog is chasing the cat"
    spans = find_spans(golden_trees[cap])
    out = transform(cap, spans, AblationKind.SWAP, normalize_case=True)
    assert out.caption == "the cat is chasing the dog"


def test_custom_mask_token(golden_trees):
    cap = "The dog is chasing the cat"
    spans = find_spans(golden_trees[cap])
    out = transform(cap, spans, AblationKind.MASK_BOTH, mask_token="X")
    assert out.caption == "X is chasing X"


def test_mask_length_change(golden_trees):
    cap = "The dog is chasing the cat"
    spans = find_spans(golden_trees[cap])
    out = transform(cap, spans, AblationKind.MASK_BOTH, mask_token="something")
    span_total = sum(e - s for s, e in spans.subject_spans + spans.object_spans)
    count = len(spans.subject_spans) + len(spans.object_spans)
    assert len(out.caption) - len(cap) == count * len("something") - span_total


def test_swap_involution_via_remapped_spans(golden_trees):
    for cap, tree in golden_trees.items():
        spans = find_spans(tree)
        first = transform(cap, spans, AblationKind.SWAP)
        if first.skipped:
            continue
        second = transform(first.caption, first.spans, AblationKind.SWAP)
        assert second.caption == cap, cap


def test_swap_preserves_word_multiset(golden_trees):
    for cap, tree in golden_trees.items():
        out = transform(cap, find_spans(tree), AblationKind.SWAP)
        assert words(out.caption) == words(cap), cap


def test_mask_both_equals_composition(golden_trees):
    for cap, tree in golden_trees.items():
        spans = find_spans(tree)
        both = transform(cap, spans, AblationKind.MASK_BOTH)
        step1 = transform(cap, spans, AblationKind.MASK_SUBJECTS)
        step2 = transform(step1.caption, step1.spans, AblationKind.MASK_OBJECTS)
        assert step2.caption == both.caption, cap


def test_swap_skip_when_unpairable(golden_trees):
    cap = "a cat on the mat"  # object span only, nothing to pair
    spans = find_spans(golden_trees[cap])
    assert spans.subject_spans == ()
    out = transform(cap, spans, AblationKind.SWAP)
    assert out.skipped and out.caption == cap


def test_mask_skip_when_no_targets(golden_trees):
    cap = "her hat"
    spans = find_spans(golden_trees[cap])
    out = transform(cap, spans, AblationKind.MASK_BOTH)
    assert out.skipped and out.caption == cap


def test_mask_objects_skip_flagged(golden_trees):
    cap = "The dog is not sleeping"
    out = transform(cap, find_spans(golden_trees[cap]), AblationKind.MASK_OBJECTS)
    assert out.skipped and out.caption == cap


def test_overlapping_roles_block_swap():
    spans = SemanticSpans(subject_spans=((0, 5),), object_spans=((3, 8),))
    assert spans.roles_overlap
    out = transform("abcdefghij", spans, AblationKind.SWAP)
    assert out.skipped


def test_span_bounds_checked():
    spans = SemanticSpans(subject_spans=((0, 99),))
    with pytest.raises(SpanError):
        transform("short", spans, AblationKind.MASK_SUBJECTS)


def test_missing_offsets_error():
    # hand-built tree whose forms cannot be located in the caption
    tree = DepTree(
        caption="zz qq",
        tokens=(
            Token(index=1, form="zz", lemma="zz", upos="NOUN", head=2, deprel="nsubj",
                  char_start=0, char_end=2),
            Token(index=2, form="yy", lemma="yy", upos="VERB", head=0, deprel="root",
                  char_start=-1, char_end=-1),
        ),
    )
    spans_ok = find_spans(tree)  # the nsubj token has offsets; fine
    assert spans_ok.subject_spans == ((0, 2),)
    bad = DepTree(
        caption="zz qq",
        tokens=(
            Token(index=1, form="xx", lemma="xx", upos="NOUN", head=2, deprel="nsubj",
                  char_start=-1, char_end=-1),
            Token(index=2, form="yy", lemma="yy", upos="VERB", head=0, deprel="root",
                  char_start=-1, char_end=-1),
        ),
    )
    with pytest.raises(SpanError, match="text"):
        find_spans(bad)


def test_two_subjects_two_spans():
    # two clauses: "the dog runs and the cat sleeps" (conj second clause)
    toks = (
        Token(index=1, form="the", lemma="the", upos="DET", head=2, deprel="det", char_start=0, char_end=3),
        Token(index=2, form="dog", lemma="dog", upos="NOUN", head=3, deprel="nsubj", char_start=4, char_end=7),
        Token(index=3, form="runs", lemma="run", upos="VERB", head=0, deprel="root", char_start=8, char_end=12),
        Token(index=4, form="and", lemma="and", upos="CCONJ", head=7, deprel="cc", char_start=13, char_end=16),
        Token(index=5, form="the", lemma="the", upos="DET", head=6, deprel="det", char_start=17, char_end=20),
        Token(index=6, form="cat", lemma="cat", upos="NOUN", head=7, deprel="nsubj", char_start=21, char_end=24),
        Token(index=7, form="sleeps", lemma="sleep", upos="VERB", head=3, deprel="conj", char_start=25, char_end=31),
    )
    tree = DepTree(caption="the dog runs and the cat sleeps", tokens=toks)
    spans = find_spans(tree)
    assert len(spans.subject_spans) == 2
    assert spans.subject_spans[0][0] < spans.subject_spans[1][0]
    out = transform(tree.caption, spans, AblationKind.MASK_SUBJECTS)
    assert out.caption == "something runs and something sleeps"
