"""Command-line pipeline: parse, score, eval, ablate, simulate, prompt.

Every stage is file-to-file JSONL (or a TSV report on stdout), so runs
can be re-executed and diffed independently. Output files are written
to a temp path and renamed into place only on success. Diagnostics go
to stderr; exit codes are 0 on success, 1 for usage errors, 2 for data
errors. Record-level failures inside `score`, `ablate`, and `prompt`
are reported on stderr and do not abort the run.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import ablate as ablate_mod
from .asym import AsymConfig, Objective
from .augment import AugmentConfig, augment_quad
from .conllu import ConlluError, TreeValidationError, parse_conllu
from .embed import EmbeddingLoadError, OovError, OovPolicy, load_embeddings
from .metrics import (
    DataError,
    aggregate,
    load_examples,
    random_baseline,
    record_from_dict,
)
from .promptkit import (
    PromptTemplates,
    ScriptedModel,
    TemplateError,
    build_flat_prompt,
    build_turn1_prompt,
    build_turn2_prompt,
    run_multiturn_trace,
)
from .sgparse import graph_to_json, parse_scene_graph

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

DATA_ERRORS = (
    DataError,
    ConlluError,
    TreeValidationError,
    EmbeddingLoadError,
    OovError,
    TemplateError,
    ablate_mod.SpanError,
    json.JSONDecodeError,
    OSError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _existing_path(value: str) -> Path:
    p = Path(value)
    if not p.exists():
        raise argparse.ArgumentTypeError(f"path does not exist: {value}")
    return p


def _emit(text: str, out) -> None:
    """Write to stdout, or atomically to a file path."""
    if out is None:
        sys.stdout.write(text)
        return
    out = Path(out)
    fd, tmp = tempfile.mkstemp(dir=out.parent or Path("."), prefix=f".{out.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _tree_index(conllu_path: Path) -> dict:
    """Map caption text to its dependency tree (first block wins)."""
    index = {}
    for tree in parse_conllu(conllu_path):
        index.setdefault(tree.caption, tree)
    return index


def _load_raw_records(path: Path) -> list:
    """Record dicts plus validated views, preserving unknown fields."""
    raw = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: line {lineno}: invalid JSON ({exc})") from exc
            rec = record_from_dict(d, where=f"{path}: line {lineno}")
            raw.append((d, rec))
    return raw


def cmd_parse(args) -> int:
    trees = parse_conllu(args.conllu)
    lines = [graph_to_json(parse_scene_graph(tree)) for tree in trees]
    _emit("".join(line + "\n" for line in lines), args.out)
    return EXIT_OK


def cmd_score(args) -> int:
    pairs = _load_raw_records(args.examples)
    trees = _tree_index(args.conllu)
    store = load_embeddings(args.embeddings, oov_policy=OovPolicy(args.oov))
    asym_cfg = AsymConfig(alpha=args.alpha, gamma=args.gamma, objective=Objective(args.objective))
    aug_cfg = AugmentConfig(lambda_=args.lambda_)
    name = args.name or f"{args.strategy}+SG"

    out_lines = []
    failures = []
    for d, rec in pairs:
        base = rec.quads.get(args.strategy)
        if base is None:
            failures.append((rec.id, f"no quad for strategy {args.strategy!r}"))
            out_lines.append(json.dumps(d))
            continue
        missing = [c for c in (rec.caption_0, rec.caption_1) if c not in trees]
        if missing:
            failures.append((rec.id, f"caption not in sidecar: {missing[0]!r}"))
            out_lines.append(json.dumps(d))
            continue
        try:
            g0 = parse_scene_graph(trees[rec.caption_0])
            g1 = parse_scene_graph(trees[rec.caption_1])
            new_quad = augment_quad(base, g0, g1, aug_cfg, asym_cfg, store)
        except (OovError, ValueError) as exc:
            failures.append((rec.id, str(exc)))
            out_lines.append(json.dumps(d))
            continue
        quads = dict(d.get("quads", {}))
        quads[name] = new_quad.as_list()
        d = dict(d)
        d["quads"] = quads
        out_lines.append(json.dumps(d))

    _emit("".join(line + "\n" for line in out_lines), args.out)
    if failures:
        print(f"{len(failures)} record(s) failed:", file=sys.stderr)
        for rid, reason in failures:
            print(f"  {rid}: {reason}", file=sys.stderr)
    return EXIT_OK


def _format_report(strategy: str, report, per_tag: bool) -> str:
    lines = ["Strategy\tTxt\tImg\tGrp"]
    lines.append(f"{strategy}\t{report.text:.3f}\t{report.image:.3f}\t{report.group:.3f}")
    if per_tag:
        lines.append("")
        lines.append("Tag\tN\tTxt\tImg\tGrp")
        for tag in sorted(report.per_tag):
            n, t, i, g = report.per_tag[tag]
            lines.append(f"{tag}\t{n}\t{t:.3f}\t{i:.3f}\t{g:.3f}")
    return "\n".join(lines) + "\n"


def cmd_eval(args) -> int:
    with open(args.examples, encoding="utf-8") as fh:
        records = load_examples(fh)
    available = sorted({name for rec in records for name in rec.quads})
    if args.strategy not in available:
        print(
            f"unknown strategy {args.strategy!r}; available: {', '.join(available)}",
            file=sys.stderr,
        )
        return EXIT_DATA
    report = aggregate(records, args.strategy)
    _emit(_format_report(args.strategy, report, args.per_tag), args.out)
    return EXIT_OK


def cmd_ablate(args) -> int:
    pairs = _load_raw_records(args.examples)
    trees = _tree_index(args.conllu)
    kinds = [ablate_mod.AblationKind(k.strip()) for k in args.kinds.split(",") if k.strip()]
    out_lines = []
    skipped = 0
    for _, rec in pairs:
        for idx, caption in ((0, rec.caption_0), (1, rec.caption_1)):
            tree = trees.get(caption)
            for kind in kinds:
                row = {
                    "id": rec.id,
                    "kind": kind.value,
                    "caption_index": idx,
                    "original": caption,
                    "transformed": caption,
                    "skipped": True,
                }
                if tree is not None:
                    try:
                        spans = ablate_mod.find_spans(tree, include_pobj=args.include_pobj)
                        result = ablate_mod.transform(
                            caption,
                            spans,
                            kind,
                            mask_token=args.mask_token,
                            normalize_case=args.normalize_case,
                        )
                        row["transformed"] = result.caption
                        row["skipped"] = result.skipped
                    except ablate_mod.SpanError as exc:
                        print(f"{rec.id}/{idx}: {exc}", file=sys.stderr)
                else:
                    print(f"{rec.id}/{idx}: caption not in sidecar", file=sys.stderr)
                skipped += int(row["skipped"])
                out_lines.append(json.dumps(row))
    _emit("".join(line + "\n" for line in out_lines), args.out)
    if skipped:
        print(f"{skipped} transform(s) skipped", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args) -> int:
    result = random_baseline(args.trials, args.seed)
    lines = ["Baseline\tTxt\tImg\tGrp"]
    for label, rep in (("enumerated", result.exact), ("monte_carlo", result.monte_carlo)):
        lines.append(f"{label}\t{rep.text:.3f}\t{rep.image:.3f}\t{rep.group:.3f}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_prompt(args) -> int:
    pairs = _load_raw_records(args.examples)
    trees = _tree_index(args.conllu)
    templates = PromptTemplates.load(args.templates)
    model = ScriptedModel.from_json(args.mock) if args.mock else None

    out_lines = []
    failures = []
    for _, rec in pairs:
        for idx, caption in ((0, rec.caption_0), (1, rec.caption_1)):
            tree = trees.get(caption)
            if tree is None:
                failures.append((rec.id, idx, "caption not in sidecar"))
                continue
            graph = parse_scene_graph(tree)
            row = {"id": rec.id, "caption_index": idx, "caption": caption}
            if model is None:
                row["flat"] = build_flat_prompt(caption, graph, templates)
                if graph.triples:
                    row["turn1"] = build_turn1_prompt(
                        graph, templates, with_caption=args.with_caption
                    )
                    row["turn2_template"] = build_turn2_prompt(
                        caption, list(graph.triples), templates
                    )
            else:
                trace = run_multiturn_trace(
                    model, caption, graph, templates, turn1_with_caption=args.with_caption
                )
                row["score"] = trace.score
                row["short_circuited"] = trace.short_circuited
                row["turn1_prompt"] = trace.turn1_prompt
                row["turn1_response"] = trace.turn1_response
                row["fallback_used"] = bool(trace.turn1 and trace.turn1.fallback_used)
                row["kept_indices"] = list(trace.turn1.kept_indices) if trace.turn1 else []
                row["turn2_prompt"] = trace.turn2_prompt
            out_lines.append(json.dumps(row))
    _emit("".join(line + "\n" for line in out_lines), args.out)
    if failures:
        for rid, idx, reason in failures:
            print(f"{rid}/{idx}: {reason}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="winosg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("parse", help="extract scene graphs from a CoNLL-U file")
    p.add_argument("--conllu", type=_existing_path, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("score", help="add an augmented-score strategy to a dataset")
    p.add_argument("--examples", type=_existing_path, required=True)
    p.add_argument("--conllu", type=_existing_path, required=True)
    p.add_argument("--embeddings", type=_existing_path, required=True)
    p.add_argument("--strategy", default="base", help="base strategy to augment")
    p.add_argument("--name", default=None, help="output strategy name (default: <strategy>+SG)")
    p.add_argument("--lambda", dest="lambda_", type=float, default=0.3)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--objective", choices=[o.value for o in Objective], default="max")
    p.add_argument("--oov", choices=[o.value for o in OovPolicy], default="lenient")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="report text/image/group fractions")
    p.add_argument("--examples", type=_existing_path, required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--per-tag", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="emit masked/swapped caption variants")
    p.add_argument("--examples", type=_existing_path, required=True)
    p.add_argument("--conllu", type=_existing_path, required=True)
    p.add_argument(
        "--kinds",
        default=",".join(k.value for k in ablate_mod.AblationKind),
        help="comma-separated ablation kinds",
    )
    p.add_argument("--mask-token", default=ablate_mod.DEFAULT_MASK)
    p.add_argument("--normalize-case", action="store_true")
    p.add_argument("--no-pobj", dest="include_pobj", action="store_false")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("simulate", help="print chance-level baselines")
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("prompt", help="build prompts; with --mock, run the protocol")
    p.add_argument("--examples", type=_existing_path, required=True)
    p.add_argument("--conllu", type=_existing_path, required=True)
    p.add_argument("--templates", type=_existing_path, default=None)
    p.add_argument("--mock", type=_existing_path, default=None, help="scripted-model JSON")
    p.add_argument("--with-caption", action="store_true", help="include caption in turn 1")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_prompt)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
