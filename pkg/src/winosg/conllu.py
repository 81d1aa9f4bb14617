"""CoNLL-U ingestion and the validated dependency-tree model.

Only the ID, FORM, LEMMA, UPOS, HEAD and DEPREL columns are interpreted;
XPOS, FEATS, DEPS and MISC are carried opaquely so that round-tripping a
file through :func:`parse_conllu` / :func:`serialize_conllu` is lossless
for the columns we use.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional


class ConlluError(ValueError):
    """Malformed CoNLL-U input (bad line layout, non-integer fields)."""


class TreeValidationError(ValueError):
    """A structurally invalid dependency tree (no root, cycles, gaps)."""


# Different parser backends emit different relation inventories; the rule
# engine works on the canonical (ClearNLP-style) labels on the left of
# each mapping below.
_DEPREL_ALIASES = {
    "obj": "dobj",
    "nsubj:pass": "nsubjpass",
    "nmod:poss": "poss",
    "acl:relcl": "relcl",
    "obl:agent": "agent",
}


def normalize_deprel(label: str) -> str:
    """Map a dependency label to its canonical dialect."""
    return _DEPREL_ALIASES.get(label, label)


@dataclass(frozen=True)
class Token:
    """One syntactic word of a dependency tree (1-based index)."""

    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str
    char_start: int = -1
    char_end: int = -1
    xpos: str = "_"
    feats: str = "_"
    deps: str = "_"
    misc: str = "_"

    def __post_init__(self):
        if self.index < 1:
            raise TreeValidationError(f"token index must be >= 1, got {self.index}")
        if self.head < 0:
            raise TreeValidationError(f"token head must be >= 0, got {self.head}")
        if self.head == self.index:
            raise TreeValidationError(
                f"token {self.index} ({self.form!r}) is its own head"
            )
        if not self.lemma:
            raise TreeValidationError(f"token {self.index} has an empty lemma")
        if not self.upos:
            raise TreeValidationError(f"token {self.index} has an empty UPOS")


@dataclass(frozen=True)
class DepTree:
    """A validated dependency parse of one caption.

    Invariants checked at construction: token indices are contiguous
    1..n, exactly one token has head 0, and following head links never
    cycles.  A tree with no tokens is permitted and stands for an
    empty/whitespace caption.
    """

    caption: str
    tokens: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        _validate_tree(self.caption, self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def token(self, index: int) -> Token:
        """Return the token with the given 1-based index."""
        if not 1 <= index <= len(self.tokens):
            raise IndexError(f"token index {index} out of range 1..{len(self.tokens)}")
        return self.tokens[index - 1]

    @property
    def root(self) -> Token:
        for tok in self.tokens:
            if tok.head == 0:
                return tok
        raise TreeValidationError("tree has no tokens")


def _validate_tree(caption: str, tokens: tuple) -> None:
    n = len(tokens)
    if n == 0:
        return
    for pos, tok in enumerate(tokens, start=1):
        if tok.index != pos:
            raise TreeValidationError(
                f"sentence {caption!r}: token indices not contiguous "
                f"(expected {pos}, got {tok.index})"
            )
        if tok.head > n:
            raise TreeValidationError(
                f"sentence {caption!r}: token {tok.index} points at "
                f"nonexistent head {tok.head}"
            )
    roots = [tok.index for tok in tokens if tok.head == 0]
    if len(roots) != 1:
        raise TreeValidationError(
            f"sentence {caption!r}: expected exactly one root, found {len(roots)}"
        )
    # Walk up from every token; a tree of n nodes never needs more than
    # n hops to reach the root, so exceeding that means a cycle.
    for tok in tokens:
        hops = 0
        cur = tok.index
        while cur != 0:
            cur = tokens[cur - 1].head
            hops += 1
            if hops > n:
                raise TreeValidationError(
                    f"sentence {caption!r}: cycle in head links at token {tok.index}"
                )


def children(tree: DepTree, index: int, deprel_filter=None) -> list:
    """All tokens whose head is `index`, in surface order.

    `deprel_filter` is one label or an iterable of labels; comparison
    uses canonical labels, so asking for "dobj" also matches "obj".
    """
    if not 0 <= index <= len(tree.tokens):
        raise IndexError(f"token index {index} out of range 0..{len(tree.tokens)}")
    if deprel_filter is None:
        want = None
    elif isinstance(deprel_filter, str):
        want = {normalize_deprel(deprel_filter)}
    else:
        want = {normalize_deprel(d) for d in deprel_filter}
    out = []
    for tok in tree.tokens:
        if tok.head != index:
            continue
        if want is None or normalize_deprel(tok.deprel) in want:
            out.append(tok)
    return out


def _char_offsets(text: str, forms: list) -> list:
    """Locate each form in `text` left to right; (-1, -1) when not found."""
    spans = []
    cursor = 0
    for form in forms:
        pos = text.find(form, cursor)
        if pos < 0:
            spans.append((-1, -1))
        else:
            spans.append((pos, pos + len(form)))
            cursor = pos + len(form)
    return spans


def _parse_token_line(line: str, lineno: int) -> Optional[dict]:
    cols = line.split("\t")
    if len(cols) != 10:
        raise ConlluError(
            f"line {lineno}: expected 10 tab-separated columns, got {len(cols)}"
        )
    tok_id = cols[0]
    if "-" in tok_id or "." in tok_id:
        # Multiword-token ranges and empty nodes carry no tree structure.
        return None
    try:
        index = int(tok_id)
    except ValueError:
        raise ConlluError(f"line {lineno}: non-integer token ID {tok_id!r}") from None
    try:
        head = int(cols[6])
    except ValueError:
        raise ConlluError(f"line {lineno}: non-integer HEAD {cols[6]!r}") from None
    return {
        "index": index,
        "form": cols[1],
        "lemma": cols[2].lower(),
        "upos": cols[3],
        "xpos": cols[4],
        "feats": cols[5],
        "head": head,
        "deprel": cols[7],
        "deps": cols[8],
        "misc": cols[9],
    }


def _finish_sentence(caption: Optional[str], rows: list) -> Optional[DepTree]:
    if not rows:
        return None
    if caption is None:
        caption = " ".join(r["form"] for r in rows)
    spans = _char_offsets(caption, [r["form"] for r in rows])
    tokens = [
        Token(char_start=span[0], char_end=span[1], **row)
        for row, span in zip(rows, spans)
    ]
    return DepTree(caption=caption, tokens=tuple(tokens))


def parse_conllu(source) -> list:
    """Read CoNLL-U text into a list of DepTrees.

    `source` may be a text stream, a string of CoNLL-U content, or a
    filesystem path-like.  A `# text = ...` comment supplies the caption;
    otherwise the caption is reconstructed by joining forms with spaces.
    """
    if isinstance(source, str):
        stream: IO[str] = io.StringIO(source)
    elif hasattr(source, "read"):
        stream = source
    else:
        stream = open(source, encoding="utf-8")

    trees = []
    caption: Optional[str] = None
    rows: list = []
    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                tree = _finish_sentence(caption, rows)
                if tree is not None:
                    trees.append(tree)
                caption, rows = None, []
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("text") and "=" in body:
                    key, value = body.split("=", 1)
                    if key.strip() == "text":
                        caption = value.strip()
                continue
            rows.append(_parse_token_line(line, lineno))
            if rows[-1] is None:
                rows.pop()
        tree = _finish_sentence(caption, rows)
        if tree is not None:
            trees.append(tree)
    finally:
        if stream is not source and not isinstance(source, str):
            stream.close()
    return trees


def serialize_conllu(trees: Iterable[DepTree]) -> str:
    """Render trees back to CoNLL-U, preserving the opaque columns."""
    blocks = []
    for tree in trees:
        lines = [f"# text = {tree.caption}"]
        for tok in tree.tokens:
            lines.append(
                "\t".join(
                    [
                        str(tok.index),
                        tok.form,
                        tok.lemma,
                        tok.upos,
                        tok.xpos,
                        tok.feats,
                        str(tok.head),
                        tok.deprel,
                        tok.deps,
                        tok.misc,
                    ]
                )
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")
