"""
From dependency trees to scene-graph triples
============================================

A caption's dependency parse (CoNLL-U) is turned into a small set of
<subject, relation, object> triples by five extraction rules: verbal
clauses, prepositional attachments, existentials, copulas, and
possessives. This walks the bundled fixture corpus and shows what each
sentence yields.
"""

from pathlib import Path

from winosg import parse_conllu, parse_scene_graph

DATA = Path(__file__).resolve().parents[1] / "data"

trees = parse_conllu(DATA / "golden.conllu")
print(f"{len(trees)} sentences\n")

# Each triple records which rule produced it. An intransitive clause
# keeps its subject and leaves the object slot empty.
for tree in trees:
    graph = parse_scene_graph(tree)
    print(tree.caption)
    if not graph.triples:
        print("    (no triples)")
    for t in graph.triples:
        obj = t.object.phrase if t.object else "-"
        print(f"    [{t.rule}] {t.subject.phrase} | {t.relation} | {obj}")
    print()

# The minimal pair at the heart of the evaluation: same words, roles
# reversed. The parses differ only in which entity is the subject.
by_caption = {t.caption: t for t in trees}
for caption in ("The dog is chasing the cat", "The cat is chasing the dog"):
    graph = parse_scene_graph(by_caption[caption])
    t = graph.triples[0]
    print(f"{caption!r} -> <{t.subject.phrase}, {t.relation}, {t.object.phrase}>")
