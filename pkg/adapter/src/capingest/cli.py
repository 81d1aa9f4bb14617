"""ingest command line: captions JSONL in, CoNLL-U + embeddings TSV out.

Exit codes: 0 success, 1 usage error, 2 ingestion/backend error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .backends import BackendUnavailable, SimpleBackend, SpacyBackend
from .ingest import IngestError, ingest


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _existing_path(value: str) -> Path:
    p = Path(value)
    if not p.exists():
        raise argparse.ArgumentTypeError(f"path does not exist: {value}")
    return p


def build_parser() -> _Parser:
    parser = _Parser(prog="ingest", description=__doc__.splitlines()[0])
    parser.add_argument("--captions", type=_existing_path, required=True)
    parser.add_argument("--conllu", required=True)
    parser.add_argument("--embeddings", required=True)
    parser.add_argument(
        "--backend",
        choices=("spacy", "simple"),
        default="spacy",
        help="parser backend; 'simple' is a deterministic no-dependency fallback",
    )
    parser.add_argument("--model", default="en_core_web_sm", help="spaCy model name")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        backend = SpacyBackend(model=args.model) if args.backend == "spacy" else SimpleBackend()
        result = ingest(args.captions, args.conllu, args.embeddings, backend)
    except BackendUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IngestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(
        f"wrote {result.sentence_count} sentence blocks "
        f"({result.manifest.conllu_path}) and {result.lemma_count} embedding rows "
        f"({result.manifest.embeddings_path}) via backend "
        f"{result.manifest.backend_name}/{result.manifest.backend_version}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
