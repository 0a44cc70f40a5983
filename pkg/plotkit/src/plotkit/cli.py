"""plotkit <kind> <input.csv> -o <image> [options].

Kinds: heatmap, quiver, msd, convergence, identity-table. Inputs are
never mutated; any schema violation exits with status 1.
"""

import argparse
import sys

from plotkit import render
from plotkit.schemas import SchemaError


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="plotkit",
        description="Render lattice-gas harness CSVs to static images")
    parser.add_argument("kind", choices=["heatmap", "quiver", "msd",
                                         "convergence", "identity-table"])
    parser.add_argument("input", help="input CSV (documented schema)")
    parser.add_argument("-o", "--output", required=True,
                        help="output image path (.png or .svg)")
    parser.add_argument("--column", default="rho",
                        help="field column for heatmap (default rho)")
    parser.add_argument("--coeffs", default=None,
                        help="coeffs.csv for the msd reference curve "
                             "(default: evaluate the cubic directly)")
    parser.add_argument("--species", default="a", choices=["a", "p"],
                        help="species for convergence plots")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    try:
        if args.kind == "heatmap":
            render.plot_heatmap(args.input, args.output,
                                column=args.column, title=args.title)
        elif args.kind == "quiver":
            render.plot_quiver(args.input, args.output, title=args.title)
        elif args.kind == "msd":
            render.plot_msd(args.input, args.output,
                            coeffs_path=args.coeffs, title=args.title)
        elif args.kind == "convergence":
            render.plot_convergence(args.input, args.output,
                                    species=args.species, title=args.title)
        else:
            render.plot_identity_table(args.input, args.output,
                                       title=args.title)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
