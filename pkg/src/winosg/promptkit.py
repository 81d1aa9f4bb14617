"""Prompt construction for scene-graph injection, flat and multi-turn.

The flat strategy lists every extracted triple inside a single yes/no
prompt. The multi-turn protocol first asks the model which triples are
visible in the image (Turn 1), then appends a match question restating
only the kept triples (Turn 2); both turns share one context window.
Templates are plain text files with {caption}, {triples}, and
{question} placeholders. A scripted mock model keyed by prompt hash
makes the whole protocol testable without any neural backend.
"""

from __future__ import annotations

import hashlib
import json
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

from .augment import softmax_pair
from .sgparse import SceneGraph, Triple

TRIPLE_SEP = " — "  # em dash, as rendered in prompt triple lines
QUESTION_FORMAT = 'Does this image show "{caption}"? Answer yes or no.'

REQUIRED_PLACEHOLDERS = {
    "plain": ("{caption}", "{question}"),
    "flat": ("{caption}", "{triples}", "{question}"),
    "turn1": ("{triples}",),
    "turn1_caption": ("{caption}", "{triples}",),
    "turn2": ("{triples}", "{question}"),
}


class TemplateError(ValueError):
    pass


class ProtocolError(RuntimeError):
    """A model call failed; `turn` records which one."""

    def __init__(self, message: str, turn: int):
        super().__init__(message)
        self.turn = turn


class Decoding(Enum):
    GREEDY = "greedy"


class ModelInterface(ABC):
    @abstractmethod
    def complete(self, prompt: str, decoding: Decoding = Decoding.GREEDY) -> str:
        ...

    @abstractmethod
    def yes_no_logits(self, prompt: str) -> tuple:
        """Return (z_yes, z_no) for the final token decision."""


@dataclass(frozen=True)
class TurnOneResult:
    kept_indices: tuple  # sorted, deduped, 1-based
    raw_response: str
    fallback_used: bool


@dataclass(frozen=True)
class PromptTemplates:
    texts: dict

    @classmethod
    def load(cls, directory=None) -> "PromptTemplates":
        texts = {}
        if directory is None:
            root = resources.files("winosg") / "templates"
        else:
            root = Path(directory)
        for name, placeholders in REQUIRED_PLACEHOLDERS.items():
            path = root / f"{name}.txt"
            try:
                text = path.read_text(encoding="utf-8")
            except (FileNotFoundError, OSError) as exc:
                raise TemplateError(f"template file missing: {name}.txt") from exc
            for ph in placeholders:
                if ph not in text:
                    raise TemplateError(
                        f"template {name}.txt is missing placeholder {ph}"
                    )
            texts[name] = text
        return cls(texts=texts)

    def render(self, name: str, caption: str = "", triples: str = "", question: str = "") -> str:
        if name not in self.texts:
            raise TemplateError(f"unknown template {name!r}")
        out = self.texts[name]
        out = out.replace("{caption}", caption)
        out = out.replace("{triples}", triples)
        out = out.replace("{question}", question)
        return out


def build_question(caption: str) -> str:
    return QUESTION_FORMAT.replace("{caption}", caption)


def render_triple_block(triples) -> str:
    """Numbered triple lines, `k. subject (sep) relation (sep) object`."""
    lines = []
    for k, t in enumerate(triples, start=1):
        parts = [t.subject.phrase, t.relation]
        if t.object is not None:
            parts.append(t.object.phrase)
        lines.append(f"{k}. " + TRIPLE_SEP.join(parts))
    return "\n".join(lines)


def build_flat_prompt(caption: str, graph: SceneGraph, templates: PromptTemplates) -> str:
    question = build_question(caption)
    if not graph.triples:
        return templates.render("plain", caption=caption, question=question)
    block = render_triple_block(graph.triples)
    return templates.render("flat", caption=caption, triples=block, question=question)


def build_turn1_prompt(
    graph: SceneGraph, templates: PromptTemplates, with_caption: bool = False
) -> str:
    if not graph.triples:
        raise ValueError("turn-1 prompt needs a non-empty graph; short-circuit to plain")
    block = render_triple_block(graph.triples)
    if with_caption:
        return templates.render("turn1_caption", caption=graph.caption, triples=block)
    return templates.render("turn1", triples=block)


_INT_RE = re.compile(r"\d+")


def parse_turn1_response(response: str, n_triples: int) -> TurnOneResult:
    """Total parse of a Turn-1 reply into kept triple indices.

    Integer tokens anywhere in the reply count; out-of-range values are
    dropped. An empty result keeps every triple and flags the fallback.
    """
    if n_triples < 1:
        raise ValueError("n_triples must be >= 1")
    kept = sorted(
        {int(m) for m in _INT_RE.findall(response) if 1 <= int(m) <= n_triples}
    )
    if not kept:
        return TurnOneResult(
            kept_indices=tuple(range(1, n_triples + 1)),
            raw_response=response,
            fallback_used=True,
        )
    return TurnOneResult(kept_indices=tuple(kept), raw_response=response, fallback_used=False)


def build_turn2_prompt(caption: str, kept_triples, templates: PromptTemplates) -> str:
    question = build_question(caption)
    if not kept_triples:
        return question
    block = render_triple_block(kept_triples)
    return templates.render("turn2", triples=block, question=question)


@dataclass(frozen=True)
class MultiturnTrace:
    score: float
    short_circuited: bool
    turn1_prompt: str
    turn1_response: str
    turn1: object  # TurnOneResult or None on short-circuit
    kept_triples: tuple
    turn2_prompt: str  # full context window as presented to the model


def run_multiturn_trace(
    model: ModelInterface,
    caption: str,
    graph: SceneGraph,
    templates: PromptTemplates,
    turn1_with_caption: bool = False,
) -> MultiturnTrace:
    if not graph.triples:
        prompt = build_flat_prompt(caption, graph, templates)
        try:
            z_yes, z_no = model.yes_no_logits(prompt)
        except Exception as exc:
            raise ProtocolError(f"turn 2 model call failed: {exc}", turn=2) from exc
        return MultiturnTrace(
            score=softmax_pair(z_no, z_yes),
            short_circuited=True,
            turn1_prompt="",
            turn1_response="",
            turn1=None,
            kept_triples=(),
            turn2_prompt=prompt,
        )

    t1_prompt = build_turn1_prompt(graph, templates, with_caption=turn1_with_caption)
    try:
        reply = model.complete(t1_prompt, Decoding.GREEDY)
    except Exception as exc:
        raise ProtocolError(f"turn 1 model call failed: {exc}", turn=1) from exc
    parsed = parse_turn1_response(reply, len(graph.triples))
    kept = tuple(graph.triples[i - 1] for i in parsed.kept_indices)
    t2_text = build_turn2_prompt(caption, kept, templates)
    # Both turns share one context window: turn 2 extends the transcript.
    transcript = t1_prompt + "\n" + reply + "\n\n" + t2_text
    try:
        z_yes, z_no = model.yes_no_logits(transcript)
    except Exception as exc:
        raise ProtocolError(f"turn 2 model call failed: {exc}", turn=2) from exc
    return MultiturnTrace(
        score=softmax_pair(z_no, z_yes),
        short_circuited=False,
        turn1_prompt=t1_prompt,
        turn1_response=reply,
        turn1=parsed,
        kept_triples=kept,
        turn2_prompt=transcript,
    )


def run_multiturn(
    model: ModelInterface,
    caption: str,
    graph: SceneGraph,
    templates: PromptTemplates,
    turn1_with_caption: bool = False,
) -> float:
    return run_multiturn_trace(
        model, caption, graph, templates, turn1_with_caption=turn1_with_caption
    ).score


def prompt_key(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:16]


class ScriptedModel(ModelInterface):
    """Table-driven mock: responses looked up by prompt hash.

    The script maps hash keys (or "default") to canned completions and
    (z_yes, z_no) logit pairs, so protocol behavior is reproducible.
    """

    def __init__(self, completions: dict, logits: dict):
        self.completions = dict(completions)
        self.logits = dict(logits)

    @classmethod
    def from_json(cls, source) -> "ScriptedModel":
        if hasattr(source, "read"):
            data = json.load(source)
        else:
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh)
        return cls(
            completions=data.get("completions", {}),
            logits=data.get("logits", {}),
        )

    def _lookup(self, table: dict, prompt: str, what: str):
        key = prompt_key(prompt)
        if key in table:
            return table[key]
        if "default" in table:
            return table["default"]
        raise KeyError(f"scripted model has no {what} for prompt key {key}")

    def complete(self, prompt: str, decoding: Decoding = Decoding.GREEDY) -> str:
        return str(self._lookup(self.completions, prompt, "completion"))

    def yes_no_logits(self, prompt: str) -> tuple:
        z_yes, z_no = self._lookup(self.logits, prompt, "logits")
        return float(z_yes), float(z_no)
