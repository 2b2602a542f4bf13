"""Command-line entry point.

    mnsplot energy      --in a.csv b.csv ... --out energy.png
    mnsplot convergence --in table.csv       --out rates.png
    mnsplot stirring    --in t1.vtk t2.vtk   --out grid.png
"""

import argparse
import sys
from pathlib import Path

from . import plots, readers


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mnsplot",
        description="Render solver CSV/VTK outputs as figures",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for name, help_ in [
        ("energy", "energy-decay curves, one per series"),
        ("convergence", "log-log error table with slope guide"),
        ("stirring", "snapshot heatmap grid"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--in", dest="inputs", nargs="+", required=True,
                       help="input file(s)")
        p.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)

    try:
        for path in args.inputs:
            if not Path(path).exists():
                raise readers.SchemaError(f"{path}: no such file")
        if args.kind == "energy":
            plots.plot_energy(args.inputs, args.out)
        elif args.kind == "convergence":
            if len(args.inputs) != 1:
                raise readers.SchemaError("convergence takes exactly one CSV")
            plots.plot_convergence(args.inputs[0], args.out)
        else:
            plots.plot_stirring(args.inputs, args.out)
    except readers.SchemaError as exc:
        print(f"mnsplot: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
