"""Command line for the exporter.

    scorer-adapter scores      --dataset data.txt --model mock:0.5,0.25 --out scores.txt
    scorer-adapter embeddings  --dataset data.txt --encoder mock-16 --out emb.txt
    scorer-adapter pairprobs   --dataset data.txt --pairs 0:1,1:0 --out pairs.txt

Exit codes: 0 success, 1 input or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .errors import AdapterError
from .export import AdapterConfig, export_embeddings, export_pairwise_probs, export_scores


def _parse_pairs(text: str) -> list[tuple[int, int]]:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        left, sep, right = chunk.partition(":")
        if not sep:
            raise AdapterError(f"pairs are written i:j, got {chunk!r}")
        try:
            pairs.append((int(left), int(right)))
        except ValueError:
            raise AdapterError(f"pair ids must be integers, got {chunk!r}")
    return pairs


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scorer-adapter")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("scores", "embeddings", "pairprobs"):
        sp = subs.add_parser(name)
        sp.add_argument("--dataset", required=True, help="id ||| prompt ||| answer ||| reasoning per line")
        sp.add_argument("--out", required=True)
        sp.add_argument("--model", default="mock", help="mock[:p1,p2,...][+double]")
        sp.add_argument("--encoder", default="mock-16", help="mock-<dim>")
        sp.add_argument("--max-pairs", type=int, default=10_000)
        if name == "pairprobs":
            sp.add_argument("--pairs", required=True, help="comma-separated i:j pairs")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    cfg = AdapterConfig(
        model=args.model,
        encoder=args.encoder,
        dataset=args.dataset,
        max_pairs=args.max_pairs,
    )
    try:
        if args.command == "scores":
            count = export_scores(cfg, args.out)
        elif args.command == "embeddings":
            count = export_embeddings(cfg, args.out)
        else:
            count = export_pairwise_probs(cfg, _parse_pairs(args.pairs), args.out)
    except (AdapterError, OSError) as exc:
        print(f"scorer-adapter: error: {exc}", file=sys.stderr)
        return 1
    print(f"scorer-adapter: wrote {count} record(s) to {args.out}")
    return 0


def entrypoint() -> None:
    raise SystemExit(main())
