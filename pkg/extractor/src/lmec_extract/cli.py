"""Command-line entry points: extract and list-layers."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .zoo import INCLUDE_KINDS, ExtractionError, extract, list_layers


def _include(value: str) -> tuple[str, ...]:
    return tuple(k.strip() for k in value.split(",") if k.strip())


def _add_source_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--include", type=_include, default=INCLUDE_KINDS,
                   help="comma-separated layer kinds (conv,linear)")
    p.add_argument("--random-init", action="store_true",
                   help="use freshly initialized weights instead of the "
                        "pretrained checkpoint (testing aid)")
    p.add_argument("--seed", type=int, default=None,
                   help="seed for --random-init reproducibility")


def cmd_extract(args: argparse.Namespace) -> int:
    manifest = extract(
        args.model,
        args.out,
        include=args.include,
        pretrained=not args.random_init,
        seed=args.seed,
    )
    manifest_path = args.manifest or f"{args.out}.manifest.json"
    Path(manifest_path).write_text(
        json.dumps(manifest.as_dict(), indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(manifest.layer_names)} tensors to {args.out}")
    print(f"manifest: {manifest_path}")
    return 0


def cmd_list_layers(args: argparse.Namespace) -> int:
    manifest = list_layers(
        args.model,
        include=args.include,
        pretrained=not args.random_init,
        seed=args.seed,
    )
    json.dump(manifest.as_dict(), sys.stdout, indent=2)
    print()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmec-extract",
        description="Export torchvision model weights into LMEC v1 containers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="write a model's weights to an LMEC file")
    p.add_argument("model")
    p.add_argument("--out", required=True, help="output LMEC path")
    p.add_argument("--manifest", default=None,
                   help="manifest JSON path (default: <out>.manifest.json)")
    _add_source_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("list-layers", help="print the manifest without writing")
    p.add_argument("model")
    _add_source_flags(p)
    p.set_defaults(func=cmd_list_layers)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ExtractionError as exc:
        print(f"lmec-extract: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"lmec-extract: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    raise SystemExit(main())
