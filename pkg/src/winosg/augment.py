"""Score combinators and the additive scene-graph prior.

clip_score maps a cosine similarity into [0, 1]; softmax_pair turns a
pair of logits into the probability of the second one. augment_quad
adds a caption-level prior to a score quadruple: the prior for caption
i is lambda * delta_sg(g_i, g_other), added to that caption's score
against both images, so image indicators never move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .asym import AsymConfig, delta_sg
from .embed import EmbeddingStore
from .metrics import ScoreQuad
from .sgparse import SceneGraph

RANGE_TOL = 1e-9


@dataclass(frozen=True)
class AugmentConfig:
    lambda_: float = 0.3

    def __post_init__(self):
        if not math.isfinite(self.lambda_):
            raise ValueError("lambda must be finite")


def clip_score(cos: float) -> float:
    if not math.isfinite(cos):
        raise ValueError(f"cosine must be finite, got {cos!r}")
    if abs(cos) > 1.0 + RANGE_TOL:
        raise ValueError(f"cosine out of range [-1, 1]: {cos!r}")
    # Clamp round-off overshoot so the result stays inside [0, 1].
    cos = max(-1.0, min(1.0, cos))
    return (1.0 + cos) / 2.0


def softmax_pair(v_first: float, v_second: float) -> float:
    """P(second) for a two-way softmax over (v_first, v_second)."""
    if not (math.isfinite(v_first) and math.isfinite(v_second)):
        raise ValueError("logits must be finite")
    m = max(v_first, v_second)
    e_first = math.exp(v_first - m)
    e_second = math.exp(v_second - m)
    return e_second / (e_first + e_second)


def augment_quad(
    q: ScoreQuad,
    g0: SceneGraph,
    g1: SceneGraph,
    cfg: AugmentConfig,
    asym_cfg: AsymConfig,
    store: EmbeddingStore,
) -> ScoreQuad:
    p0 = cfg.lambda_ * delta_sg(asym_cfg, store, g0, g1)
    p1 = cfg.lambda_ * delta_sg(asym_cfg, store, g1, g0)
    return ScoreQuad(q.s00 + p0, q.s01 + p0, q.s10 + p1, q.s11 + p1)
