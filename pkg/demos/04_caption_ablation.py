"""
Caption ablations: masking and role swapping
============================================

Subject and object spans are located in the original caption text from
the dependency tree, then rewritten: mask one role, mask both, or swap
the paired spans. Swapping twice restores the original string, and a
swap never changes the word multiset - only who does what to whom.
"""

from pathlib import Path

from winosg import AblationKind, find_spans, parse_conllu, transform

DATA = Path(__file__).resolve().parents[1] / "data"

trees = {t.caption: t for t in parse_conllu(DATA / "golden.conllu")}
caption = "The dog is chasing the cat"
spans = find_spans(trees[caption])
print(caption)
print("subject spans:", spans.subject_spans, [caption[a:b] for a, b in spans.subject_spans])
print("object  spans:", spans.object_spans, [caption[a:b] for a, b in spans.object_spans])
print()

for kind in AblationKind:
    result = transform(caption, spans, kind)
    flag = " (skipped)" if result.skipped else ""
    print(f"{kind.value:14s} {result.caption}{flag}")

# Swap is an involution: the transform result carries the spans
# remapped into the new string, so applying it again round-trips.
once = transform(caption, spans, AblationKind.SWAP)
twice = transform(once.caption, once.spans, AblationKind.SWAP)
print("\nswap twice:", twice.caption, "== original:", twice.caption == caption)

# Captions without both roles are skipped rather than half-rewritten.
spans_np = find_spans(trees["her hat"])
result = transform("her hat", spans_np, AblationKind.SWAP)
print("'her hat' swap skipped:", result.skipped)

# Prepositional objects fill in when a clause has no direct object.
caption2 = "The dog sleeps under the table"
spans2 = find_spans(trees[caption2])
print(f"\n{caption2!r} object spans:", [caption2[a:b] for a, b in spans2.object_spans])
print("masked:", transform(caption2, spans2, AblationKind.MASK_OBJECTS).caption)
