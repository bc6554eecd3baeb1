"""Command line front end: ``hyperbem-viz render --kind ... --in ... --out ...``.

Input CSVs are classified by header, so the order of ``--in`` paths does not
matter: a field job accepts one or two field grids plus an optional mesh file
for the interface overlay, a trace job accepts one or two trace files, and so
on.  Schema mismatches exit nonzero with a column diagnostic.
"""

import argparse
import sys
from pathlib import Path

from .io import SchemaError, classify, load_csv
from .render import (render_convergence, render_field, render_mesh,
                     render_trace)


def _build_parser():
    parser = argparse.ArgumentParser(prog="hyperbem-viz")
    sub = parser.add_subparsers(dest="command", required=True)
    render = sub.add_parser("render", help="render one figure from CSV inputs")
    render.add_argument("--kind", required=True,
                        choices=["trace", "field", "mesh", "convergence"])
    render.add_argument("--in", dest="inputs", required=True, nargs="+",
                        metavar="CSV", help="input CSV paths")
    render.add_argument("--out", required=True, metavar="PNG",
                        help="output image path")
    return parser


def _sorted_inputs(paths):
    """Classify every input; returns {kind: [(path, columns), ...]}."""
    groups = {}
    for path in paths:
        kind, cols = load_csv(path)
        groups.setdefault(kind, []).append((Path(path), cols))
    return groups


def _run_render(args):
    groups = _sorted_inputs(args.inputs)

    def take(kind, at_least, at_most):
        got = groups.pop(kind, [])
        if not (at_least <= len(got) <= at_most):
            raise SchemaError(
                f"kind {args.kind!r} needs {at_least}-{at_most} {kind} "
                f"file(s), got {len(got)}")
        return got

    if args.kind == "trace":
        traces = take("trace", 1, 2)
        render_trace([(p.stem, c) for p, c in traces], args.out)
    elif args.kind == "field":
        fields = take("field", 1, 2)
        mesh = take("mesh", 0, 1)
        render_field([(p.stem, c) for p, c in fields], args.out,
                     mesh_cols=mesh[0][1] if mesh else None)
    elif args.kind == "mesh":
        mesh = take("mesh", 1, 1)
        render_mesh(mesh[0][1], args.out)
    else:
        levels = take("levels", 1, 1)
        render_convergence(levels[0][1], args.out)
    if groups:
        stray = {k: [str(p) for p, _ in v] for k, v in groups.items()}
        raise SchemaError(f"unused inputs for kind {args.kind!r}: {stray}")


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        _run_render(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
