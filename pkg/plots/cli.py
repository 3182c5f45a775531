"""Command-line wrapper: render one figure from artifact files.

Either pass a JSON spec file:

    python3 -m plots --spec figure.json

with layout {"kind": ..., "inputs": {role: path, ...}, "out": path},
or pass the fields directly:

    python3 -m plots --kind density1d --density d.csv \
        --mixture final_mixture.json --reference ref.csv --out fig.png
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, FigureSpec, render
from .readers import SchemaError

_ROLE_FLAGS = ("density", "reference", "mixture", "tv", "field")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plots",
                                     description="render run-artifact figures")
    parser.add_argument("--spec", help="JSON figure spec file")
    parser.add_argument("--kind", choices=FIGURE_KINDS)
    for role in _ROLE_FLAGS:
        parser.add_argument(f"--{role}", help=f"path for the '{role}' input")
    parser.add_argument("--out", default="figure.png", help="output image path")
    return parser


def spec_from_args(args) -> FigureSpec:
    if args.spec is not None:
        try:
            raw = json.loads(Path(args.spec).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"cannot read spec {args.spec}: {exc}") from exc
        if not isinstance(raw, dict) or "kind" not in raw:
            raise SchemaError(f"{args.spec}: spec must be an object with a "
                              "'kind' entry")
        return FigureSpec(kind=raw["kind"], inputs=dict(raw.get("inputs", {})),
                          out=raw.get("out", args.out))
    if args.kind is None:
        raise SchemaError("either --spec or --kind is required")
    inputs = {role: getattr(args, role) for role in _ROLE_FLAGS
              if getattr(args, role) is not None}
    return FigureSpec(kind=args.kind, inputs=inputs, out=args.out)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = render(spec_from_args(args))
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
