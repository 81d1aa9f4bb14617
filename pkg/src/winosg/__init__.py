"""Scene-graph grounded evaluation toolkit for image-text matching.

Parses captions' dependency trees into relation triples, scores
caption pairs through optimal triple matching, and measures the
text/image/group indicators used by compositional benchmarks, with
caption-ablation diagnostics and prompt-protocol tooling on top.
"""

from .ablate import AblationKind, SemanticSpans, SpanError, TransformResult, find_spans, transform
from .asym import (
    AsymConfig,
    CostMatrix,
    Objective,
    build_cost_matrix,
    delta_sg,
    matched_total,
    pairwise_asymmetry,
    solve_assignment,
    usable_triples,
)
from .augment import AugmentConfig, augment_quad, clip_score, softmax_pair
from .conllu import (
    ConlluError,
    DepTree,
    Token,
    TreeValidationError,
    children,
    normalize_deprel,
    parse_conllu,
    serialize_conllu,
)
from .embed import (
    EmbeddingLoadError,
    EmbeddingStore,
    OovError,
    OovPolicy,
    cos_sim,
    load_embeddings,
    phrase_vector,
)
from .metrics import (
    BaselineResult,
    DataError,
    ExampleRecord,
    MetricReport,
    ScoreQuad,
    aggregate,
    enumerated_baseline,
    example_metrics,
    load_examples,
    random_baseline,
)
from .promptkit import (
    Decoding,
    ModelInterface,
    MultiturnTrace,
    PromptTemplates,
    ProtocolError,
    ScriptedModel,
    TemplateError,
    TurnOneResult,
    build_flat_prompt,
    build_turn1_prompt,
    build_turn2_prompt,
    parse_turn1_response,
    prompt_key,
    render_triple_block,
    run_multiturn,
    run_multiturn_trace,
)
from .sgparse import EntityMention, SceneGraph, Triple, parse_scene_graph

__version__ = "0.1.0"

__all__ = [
    "AblationKind",
    "AsymConfig",
    "AugmentConfig",
    "BaselineResult",
    "ConlluError",
    "CostMatrix",
    "DataError",
    "Decoding",
    "DepTree",
    "EmbeddingLoadError",
    "EmbeddingStore",
    "EntityMention",
    "ExampleRecord",
    "MetricReport",
    "ModelInterface",
    "MultiturnTrace",
    "Objective",
    "OovError",
    "OovPolicy",
    "PromptTemplates",
    "ProtocolError",
    "SceneGraph",
    "ScoreQuad",
    "ScriptedModel",
    "SemanticSpans",
    "SpanError",
    "TemplateError",
    "Token",
    "TransformResult",
    "TreeValidationError",
    "Triple",
    "TurnOneResult",
    "aggregate",
    "augment_quad",
    "build_cost_matrix",
    "build_flat_prompt",
    "build_turn1_prompt",
    "build_turn2_prompt",
    "children",
    "clip_score",
    "cos_sim",
    "delta_sg",
    "enumerated_baseline",
    "example_metrics",
    "find_spans",
    "load_embeddings",
    "load_examples",
    "matched_total",
    "normalize_deprel",
    "pairwise_asymmetry",
    "parse_conllu",
    "parse_scene_graph",
    "parse_turn1_response",
    "phrase_vector",
    "prompt_key",
    "random_baseline",
    "render_triple_block",
    "run_multiturn",
    "run_multiturn_trace",
    "serialize_conllu",
    "softmax_pair",
    "solve_assignment",
    "transform",
    "usable_triples",
]
