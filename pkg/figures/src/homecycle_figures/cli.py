"""Command-line figure renderer: homecycle-figures render --kind ... --in ... --out ..."""

from __future__ import annotations

import argparse
import sys

from homecycle_figures.render import KINDS, FigureSpec, SchemaError, render


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="homecycle-figures")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render one figure from a result CSV")
    r.add_argument("--kind", choices=KINDS, required=True)
    r.add_argument("--in", dest="input_csv", required=True)
    r.add_argument("--out", dest="output_path", required=True, help="output image (.png or .svg)")
    r.add_argument("--title", default="")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    spec = FigureSpec(input_csv=args.input_csv, kind=args.kind,
                      output_path=args.output_path, title=args.title)
    try:
        out = render(spec)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
