"""
Scene-graph prompting, flat and two-turn, on a scripted model
=============================================================

Triples can be injected into a yes/no matching prompt two ways: all at
once (flat), or filtered first by a Turn-1 question asking which
numbered triples are visible, with the match question asked in Turn 2
on the same transcript. A scripted model keyed by prompt hash stands in
for a real one, so every path here is reproducible.
"""

import math
from pathlib import Path

from winosg import (
    PromptTemplates,
    ScriptedModel,
    build_flat_prompt,
    build_turn1_prompt,
    parse_conllu,
    parse_scene_graph,
    prompt_key,
    run_multiturn_trace,
)

DATA = Path(__file__).resolve().parents[1] / "data"

templates = PromptTemplates.load()
trees = {t.caption: t for t in parse_conllu(DATA / "golden.conllu")}
graph = parse_scene_graph(trees["The woman's dog chases a ball"])

print("--- flat prompt ---")
print(build_flat_prompt(graph.caption, graph, templates))

# Script the model: keep only triple 2 in turn 1, then answer with
# logits that put P(yes) at 0.75.
t1 = build_turn1_prompt(graph, templates)
model = ScriptedModel(
    completions={prompt_key(t1): "2"},
    logits={"default": [math.log(3.0), 0.0]},  # (z_yes, z_no)
)
trace = run_multiturn_trace(model, graph.caption, graph, templates)
print("--- two-turn transcript ---")
print(trace.turn2_prompt)
print("kept:", [t.subject.phrase for t in trace.kept_triples], " score:", round(trace.score, 3))

# An unparseable reply falls back to keeping every triple.
confused = ScriptedModel(
    completions={"default": "hard to say, honestly"},
    logits={"default": [0.0, 0.0]},
)
fb = run_multiturn_trace(confused, graph.caption, graph, templates)
print("\nfallback used:", fb.turn1.fallback_used, " kept:", len(fb.kept_triples), " score:", fb.score)

# Empty graphs skip turn 1 entirely and ask the plain question.
empty = parse_scene_graph(trees["her hat"])
sc = run_multiturn_trace(confused, empty.caption, empty, templates)
print("empty graph short-circuited:", sc.short_circuited)
