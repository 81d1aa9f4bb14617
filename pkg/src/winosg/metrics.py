"""Text/image/group indicators and corpus aggregation.

Scores follow the convention s_ij = score(caption i, image j). Per
example:

    text  = 1[s00 > s10] * 1[s11 > s01]
    image = 1[s00 > s01] * 1[s11 > s10]
    group = text * image

Ties fail; every comparison is strict. The random baseline is reported
two ways: exact enumeration over the 24 orderings of four distinct
scores, and a seeded Monte Carlo estimate over i.i.d. uniform quads.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np


class DataError(ValueError):
    """Malformed dataset content (bad record, missing quad, dup id)."""


@dataclass(frozen=True)
class ScoreQuad:
    s00: float
    s01: float
    s10: float
    s11: float

    def __post_init__(self):
        for name in ("s00", "s01", "s10", "s11"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise DataError(f"score {name} must be finite, got {v!r}")

    def as_list(self) -> list:
        return [self.s00, self.s01, self.s10, self.s11]


@dataclass(frozen=True)
class ExampleRecord:
    id: str
    caption_0: str
    caption_1: str
    tag: str
    quads: dict = field(default_factory=dict)  # strategy name -> ScoreQuad

    def __post_init__(self):
        if self.caption_0 == self.caption_1:
            raise DataError(f"record {self.id!r}: captions must differ")


@dataclass(frozen=True)
class MetricReport:
    n: int
    text: float
    image: float
    group: float
    per_tag: dict = field(default_factory=dict)  # tag -> (n, text, image, group)


def example_metrics(q: ScoreQuad) -> tuple:
    text = int(q.s00 > q.s10 and q.s11 > q.s01)
    image = int(q.s00 > q.s01 and q.s11 > q.s10)
    return text, image, text * image


def aggregate(records: list, strategy: str) -> MetricReport:
    if not records:
        raise DataError("cannot aggregate an empty record list")
    totals = [0, 0, 0]
    by_tag: dict = {}
    for rec in records:
        quad = rec.quads.get(strategy)
        if quad is None:
            raise DataError(f"record {rec.id!r} has no quad for strategy {strategy!r}")
        t, i, g = example_metrics(quad)
        totals[0] += t
        totals[1] += i
        totals[2] += g
        tag = by_tag.setdefault(rec.tag, [0, 0, 0, 0])
        tag[0] += 1
        tag[1] += t
        tag[2] += i
        tag[3] += g
    n = len(records)
    per_tag = {
        tag: (c[0], c[1] / c[0], c[2] / c[0], c[3] / c[0]) for tag, c in by_tag.items()
    }
    return MetricReport(
        n=n,
        text=totals[0] / n,
        image=totals[1] / n,
        group=totals[2] / n,
        per_tag=per_tag,
    )


def enumerated_baseline() -> MetricReport:
    """Exact chance metrics over all orderings of four distinct scores."""
    counts = [0, 0, 0]
    perms = list(itertools.permutations((1.0, 2.0, 3.0, 4.0)))
    for s00, s01, s10, s11 in perms:
        t, i, g = example_metrics(ScoreQuad(s00, s01, s10, s11))
        counts[0] += t
        counts[1] += i
        counts[2] += g
    n = len(perms)
    return MetricReport(n=n, text=counts[0] / n, image=counts[1] / n, group=counts[2] / n)


@dataclass(frozen=True)
class BaselineResult:
    exact: MetricReport
    monte_carlo: MetricReport


def random_baseline(trials: int, seed: int) -> BaselineResult:
    """Chance-level metrics: exact enumeration plus a seeded estimate."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    s = rng.random((trials, 4))  # columns: s00, s01, s10, s11
    text = (s[:, 0] > s[:, 2]) & (s[:, 3] > s[:, 1])
    image = (s[:, 0] > s[:, 1]) & (s[:, 3] > s[:, 2])
    group = text & image
    mc = MetricReport(
        n=trials,
        text=float(text.mean()),
        image=float(image.mean()),
        group=float(group.mean()),
    )
    return BaselineResult(exact=enumerated_baseline(), monte_carlo=mc)


def quad_from_values(values, where: str = "quad") -> ScoreQuad:
    if not isinstance(values, (list, tuple)) or len(values) != 4:
        raise DataError(f"{where}: expected 4 scores, got {values!r}")
    try:
        return ScoreQuad(*(float(v) for v in values))
    except (TypeError, ValueError) as exc:
        raise DataError(f"{where}: {exc}") from exc


def record_from_dict(d: dict, where: str = "record") -> ExampleRecord:
    for key in ("id", "caption_0", "caption_1", "tag"):
        if key not in d:
            raise DataError(f"{where}: missing field {key!r}")
    quads_raw = d.get("quads", {})
    if not isinstance(quads_raw, dict):
        raise DataError(f"{where}: quads must be an object")
    quads = {
        name: quad_from_values(vals, where=f"{where} quad {name!r}")
        for name, vals in quads_raw.items()
    }
    return ExampleRecord(
        id=str(d["id"]),
        caption_0=str(d["caption_0"]),
        caption_1=str(d["caption_1"]),
        tag=str(d["tag"]),
        quads=quads,
    )


def record_to_dict(rec: ExampleRecord) -> dict:
    return {
        "id": rec.id,
        "caption_0": rec.caption_0,
        "caption_1": rec.caption_1,
        "tag": rec.tag,
        "quads": {name: quad.as_list() for name, quad in rec.quads.items()},
    }


def load_examples(source) -> list:
    """Read ExampleRecords from a JSONL path, string, or stream."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = str(source)
        if "\n" not in text and not text.lstrip().startswith("{"):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
    records = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            d = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"line {lineno}: invalid JSON ({exc})") from exc
        rec = record_from_dict(d, where=f"line {lineno}")
        if rec.id in seen:
            raise DataError(f"line {lineno}: duplicate record id {rec.id!r}")
        seen.add(rec.id)
        records.append(rec)
    return records
