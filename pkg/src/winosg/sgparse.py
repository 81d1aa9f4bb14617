"""Rule-based text scene-graph extraction from dependency trees.

Five rule families turn a parse into <subject, relation, object> triples:

  R1  verbs (transitive, intransitive, passives, relative clauses, negation)
  R2  prepositional relations
  R3  existential "there is/are" clauses
  R4  copular clauses ("X is Y")
  R5  possessives ("X's Y" -> <X, has, Y>)

Entity phrases are built from lemmas so that surface variation ("dogs" vs
"dog") unifies downstream.  Results are deduplicated and memoized per
caption string.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Optional

from .conllu import DepTree, Token, children, normalize_deprel

NOMINAL_UPOS = {"NOUN", "PROPN", "PRON"}
RELATIVE_PRONOUNS = {"who", "whom", "which", "that"}

RULE_ORDER = {"R1": 1, "R2": 2, "R3": 3, "R4": 4, "R5": 5}


@dataclass(frozen=True)
class EntityMention:
    """A noun-phrase entity: head lemma plus amod/compound modifiers."""

    head_lemma: str
    modifiers: tuple = ()
    token_indices: tuple = ()

    @property
    def phrase(self) -> str:
        return " ".join([*self.modifiers, self.head_lemma]).lower()


@dataclass(frozen=True)
class Triple:
    """One <subject, relation, object> unit; object may be None."""

    subject: EntityMention
    relation: str
    object: Optional[EntityMention]
    rule: str

    def key(self):
        obj = self.object.phrase.lower() if self.object is not None else None
        return (self.subject.phrase.lower(), self.relation.lower(), obj)


@dataclass(frozen=True)
class SceneGraph:
    caption: str
    triples: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "triples", tuple(self.triples))

    def __len__(self) -> int:
        return len(self.triples)


def triple_to_dict(t: Triple) -> dict:
    return {
        "subject": t.subject.phrase,
        "relation": t.relation,
        "object": t.object.phrase if t.object is not None else None,
        "rule": t.rule,
    }


def graph_to_json(graph: SceneGraph) -> str:
    """One-line JSON record for the graph (the `parse` output format)."""
    return json.dumps(
        {"caption": graph.caption, "triples": [triple_to_dict(t) for t in graph.triples]},
        ensure_ascii=False,
    )


class NotNominal(Exception):
    """Rule-skip signal: entity extraction was asked for a non-nominal head."""


def extract_entity(tree: DepTree, head_index: int) -> EntityMention:
    """Build an EntityMention for the nominal token at `head_index`.

    Modifiers are the head's `amod` and `compound` dependents in surface
    order; pronoun heads contribute their lowercase form.  Raises
    NotNominal when the head is not NOUN/PROPN/PRON.
    """
    head = tree.token(head_index)
    if head.upos not in NOMINAL_UPOS:
        raise NotNominal(f"token {head.index} ({head.form!r}) has UPOS {head.upos}")
    head_lemma = head.form.lower() if head.upos == "PRON" else head.lemma
    mods = []
    indices = [head.index]
    for child in tree.tokens:
        if child.head != head.index:
            continue
        if normalize_deprel(child.deprel) in ("amod", "compound"):
            if child.lemma != head_lemma:
                mods.append(child)
                indices.append(child.index)
    mods.sort(key=lambda t: t.index)
    return EntityMention(
        head_lemma=head_lemma,
        modifiers=tuple(m.lemma for m in mods),
        token_indices=tuple(sorted(indices)),
    )


def _entity_or_none(tree: DepTree, index: int) -> Optional[EntityMention]:
    try:
        return extract_entity(tree, index)
    except NotNominal:
        return None


def _is_negated(tree: DepTree, verb: Token) -> bool:
    for child in children(tree, verb.index):
        if normalize_deprel(child.deprel) == "neg":
            return True
        if child.upos == "PART" and child.lemma == "not":
            return True
    return False


def _first_child(tree: DepTree, index: int, deprel: str) -> Optional[Token]:
    kids = children(tree, index, deprel)
    return kids[0] if kids else None


def _is_existential_be(tree: DepTree, tok: Token) -> bool:
    if tok.lemma != "be":
        return False
    expl = _first_child(tree, tok.index, "expl")
    return expl is not None and expl.lemma == "there"


def _existential_pivot(tree: DepTree, be: Token) -> Optional[Token]:
    """The postverbal nominal of an existential clause (attr or nsubj)."""
    for rel in ("attr", "nsubj"):
        for child in children(tree, be.index, rel):
            if child.upos in NOMINAL_UPOS and child.index > be.index:
                return child
    return None


def _verb_subject(tree: DepTree, verb: Token) -> Optional[EntityMention]:
    """The entity acting as semantic subject of a verbal head.

    Covers plain nsubj, the existential pivot of "there be", and the
    agent phrase of passives.
    """
    nsubj = _first_child(tree, verb.index, "nsubj")
    if nsubj is not None and nsubj.upos in NOMINAL_UPOS:
        return _entity_or_none(tree, nsubj.index)
    if _is_existential_be(tree, verb):
        pivot = _existential_pivot(tree, verb)
        if pivot is not None:
            return _entity_or_none(tree, pivot.index)
    agent = _passive_agent(tree, verb)
    if agent is not None:
        return _entity_or_none(tree, agent.index)
    return None


def _passive_agent(tree: DepTree, verb: Token) -> Optional[Token]:
    for child in children(tree, verb.index, "agent"):
        if child.upos in NOMINAL_UPOS:
            return child  # UD obl:agent attaches the noun directly
        pobj = _first_child(tree, child.index, "pobj")
        if pobj is not None and pobj.upos in NOMINAL_UPOS:
            return pobj
    return None


def rule_svo(tree: DepTree) -> list:
    """R1: triples from verbs; intransitives get an absent object."""
    out = []
    for verb in tree.tokens:
        if verb.upos != "VERB" or verb.lemma == "be":
            continue
        relation = verb.lemma
        if _is_negated(tree, verb):
            relation = "not " + relation

        subject: Optional[EntityMention] = None
        obj: Optional[EntityMention] = None

        dobj_tok = _first_child(tree, verb.index, "dobj")
        if dobj_tok is not None and (
            dobj_tok.upos not in NOMINAL_UPOS or dobj_tok.lemma in RELATIVE_PRONOUNS
        ):
            dobj_tok = None

        if normalize_deprel(verb.deprel) == "relcl":
            modified = tree.token(verb.head)
            nsubj = _first_child(tree, verb.index, "nsubj")
            if (
                nsubj is not None
                and nsubj.upos in NOMINAL_UPOS
                and nsubj.lemma not in RELATIVE_PRONOUNS
            ):
                # Object relative: "the hat that the man holds".
                subject = _entity_or_none(tree, nsubj.index)
                obj = (
                    extract_entity(tree, dobj_tok.index)
                    if dobj_tok is not None
                    else _entity_or_none(tree, modified.index)
                )
            else:
                subject = _entity_or_none(tree, modified.index)
                obj = extract_entity(tree, dobj_tok.index) if dobj_tok is not None else None
        else:
            nsubjpass = _first_child(tree, verb.index, "nsubjpass")
            if nsubjpass is not None and nsubjpass.upos in NOMINAL_UPOS:
                # Passive: surface subject is the patient.
                obj = _entity_or_none(tree, nsubjpass.index)
                agent = _passive_agent(tree, verb)
                subject = _entity_or_none(tree, agent.index) if agent is not None else None
            else:
                subject = _verb_subject(tree, verb)
                if dobj_tok is not None:
                    obj = extract_entity(tree, dobj_tok.index)

        if subject is None:
            continue
        out.append(Triple(subject=subject, relation=relation, object=obj, rule="R1"))
    return out


def rule_prepositional(tree: DepTree) -> list:
    """R2: <head-entity, preposition, object-entity> triples.

    Handles both attachment dialects: prep->pobj chains and
    case-marked nmod/obl nominals.
    """
    out = []
    for prep in tree.tokens:
        if prep.upos != "ADP":
            continue
        rel = normalize_deprel(prep.deprel)
        if rel == "prep":
            head = tree.token(prep.head) if prep.head > 0 else None
            pobj = _first_child(tree, prep.index, "pobj")
            if head is None or pobj is None or pobj.upos not in NOMINAL_UPOS:
                continue
            out.extend(_prep_triples(tree, head, prep, pobj))
        elif rel == "case":
            if prep.head == 0:
                continue
            noun = tree.token(prep.head)
            if noun.upos not in NOMINAL_UPOS:
                continue
            if normalize_deprel(noun.deprel) not in ("nmod", "obl"):
                continue
            if noun.head == 0:
                continue
            head = tree.token(noun.head)
            out.extend(_prep_triples(tree, head, prep, noun))
    return out


def _prep_triples(tree: DepTree, head: Token, prep: Token, noun: Token) -> list:
    obj = _entity_or_none(tree, noun.index)
    if obj is None:
        return []
    if head.upos in NOMINAL_UPOS:
        subj = _entity_or_none(tree, head.index)
    elif head.upos in ("VERB", "AUX"):
        subj = _verb_subject(tree, head)
    else:
        subj = None
    if subj is None:
        return []
    return [Triple(subject=subj, relation=prep.lemma, object=obj, rule="R2")]


def rule_existential(tree: DepTree) -> list:
    """R3: "there is/are X" -> <X, exist, ->."""
    out = []
    for tok in tree.tokens:
        if not _is_existential_be(tree, tok):
            continue
        pivot = _existential_pivot(tree, tok)
        if pivot is None:
            continue
        entity = _entity_or_none(tree, pivot.index)
        if entity is None:
            continue
        relation = "not exist" if _is_negated(tree, tok) else "exist"
        out.append(Triple(subject=entity, relation=relation, object=None, rule="R3"))
    return out


def _predicate_entity(tree: DepTree, tok: Token) -> Optional[EntityMention]:
    if tok.upos in NOMINAL_UPOS:
        return _entity_or_none(tree, tok.index)
    if tok.upos == "ADJ":
        return EntityMention(head_lemma=tok.lemma, token_indices=(tok.index,))
    return None


def rule_copular(tree: DepTree) -> list:
    """R4: linking-verb clauses -> <subject, is, predicate>."""
    out = []
    for tok in tree.tokens:
        # Dialect A: "be" heads the clause, predicate is attr/acomp.
        if tok.lemma == "be" and not _is_existential_be(tree, tok):
            nsubj = _first_child(tree, tok.index, "nsubj")
            if nsubj is None or nsubj.upos not in NOMINAL_UPOS:
                continue
            pred_tok = None
            for child in children(tree, tok.index):
                if normalize_deprel(child.deprel) in ("attr", "acomp"):
                    pred_tok = child
                    break
            if pred_tok is None:
                continue
            subject = _entity_or_none(tree, nsubj.index)
            predicate = _predicate_entity(tree, pred_tok)
            if subject is None or predicate is None:
                continue
            relation = "not is" if _is_negated(tree, tok) else "is"
            out.append(Triple(subject=subject, relation=relation, object=predicate, rule="R4"))
            continue
        # Dialect B: the predicate heads the clause with a "be" cop child.
        cop = _first_child(tree, tok.index, "cop")
        if cop is None or cop.lemma != "be":
            continue
        nsubj = _first_child(tree, tok.index, "nsubj")
        if nsubj is None or nsubj.upos not in NOMINAL_UPOS:
            continue
        subject = _entity_or_none(tree, nsubj.index)
        predicate = _predicate_entity(tree, tok)
        if subject is None or predicate is None:
            continue
        relation = "not is" if _is_negated(tree, tok) else "is"
        out.append(Triple(subject=subject, relation=relation, object=predicate, rule="R4"))
    return out


def rule_possessive(tree: DepTree) -> list:
    """R5: poss arcs -> <possessor, has, possessee>; pronouns skipped."""
    out = []
    for possessor in tree.tokens:
        if normalize_deprel(possessor.deprel) != "poss":
            continue
        if possessor.upos not in ("NOUN", "PROPN"):
            continue  # "my"/"her" possessors have no groundable entity
        if possessor.head == 0:
            continue
        possessee = tree.token(possessor.head)
        if possessee.upos not in NOMINAL_UPOS:
            continue
        subj = _entity_or_none(tree, possessor.index)
        obj = _entity_or_none(tree, possessee.index)
        if subj is None or obj is None:
            continue
        out.append(Triple(subject=subj, relation="has", object=obj, rule="R5"))
    return out


_ALL_RULES = (rule_svo, rule_prepositional, rule_existential, rule_copular, rule_possessive)

_cache: dict = {}
_cache_lock = threading.Lock()


def clear_cache() -> None:
    with _cache_lock:
        _cache.clear()


def parse_scene_graph(tree: DepTree, use_cache: bool = True) -> SceneGraph:
    """Extract the deduplicated scene graph of a caption.

    Union of R1..R5, invalid triples (empty subject phrase or empty
    relation) dropped, first occurrence kept on duplicates, ordered by
    (rule, subject head index).  Memoized on the exact caption string;
    cached and uncached results are identical.
    """
    if use_cache:
        cached = _cache.get(tree.caption)
        if cached is not None:
            return cached

    collected = []
    for rule in _ALL_RULES:
        collected.extend(rule(tree))

    valid = [t for t in collected if t.subject.phrase.strip() and t.relation.strip()]
    valid.sort(key=lambda t: (RULE_ORDER[t.rule], min(t.subject.token_indices or (0,))))

    seen = set()
    unique = []
    for t in valid:
        if t.key() in seen:
            continue
        seen.add(t.key())
        unique.append(t)

    graph = SceneGraph(caption=tree.caption, triples=tuple(unique))
    if use_cache:
        with _cache_lock:
            _cache[tree.caption] = graph
    return graph
