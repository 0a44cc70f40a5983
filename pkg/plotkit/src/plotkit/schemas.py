"""Strict CSV schema validation for the harness's output tables.

Each plot kind consumes exactly one documented schema; unknown or
missing columns are reported together and rendering refuses to start.
"""

import csv


class SchemaError(ValueError):
    """Input CSV does not match the declared schema."""


# fixed leading columns; field frames additionally carry h_a_k/h_p_k
# angular-histogram columns whose count is discovered from the header
FIELD_COLUMNS = ["cell_x", "cell_y", "rho", "rho_a", "rho_p", "px", "py"]
MSD_COLUMNS = ["alpha", "t", "msd_mean", "msd_stderr", "d_hat"]
COEFFS_COLUMNS = ["alpha", "d_s", "D", "s"]
IDENTITIES_COLUMNS = ["identity_id", "l", "Ka", "Kp", "angles_hash",
                      "lhs", "rhs", "abs_err"]
RESIDUALS_COLUMNS = ["n", "eps", "test_fn", "species", "replicas",
                     "seed_base", "resid_mean", "resid_stderr"]

_NUMERIC = {"cell_x", "cell_y", "rho", "rho_a", "rho_p", "px", "py",
            "alpha", "t", "msd_mean", "msd_stderr", "d_hat",
            "d_s", "D", "s", "l", "Ka", "Kp", "lhs", "rhs", "abs_err",
            "n", "eps", "replicas", "seed_base", "resid_mean",
            "resid_stderr"}


def load_table(path, required, allow_empty=False):
    """Rows of `path` as dicts with numeric columns converted to float.

    Raises SchemaError listing every missing column; histogram columns
    (h_a_k / h_p_k) are accepted without being required.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing columns {missing}; found {header}")
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            row = {}
            for key, val in raw.items():
                if key is None:
                    raise SchemaError(f"{path}:{lineno}: extra fields "
                                      "beyond the header")
                if key in _NUMERIC or key.startswith(("h_a_", "h_p_")):
                    try:
                        row[key] = float(val)
                    except (TypeError, ValueError):
                        raise SchemaError(
                            f"{path}:{lineno}: column {key!r}: "
                            f"cannot parse {val!r} as a number")
                else:
                    row[key] = val
            rows.append(row)
    if not rows and not allow_empty:
        raise SchemaError(f"{path}: no data rows")
    return rows


def field_grid(rows, column):
    """(n, dense array) for one column of an EmpiricalField table."""
    import numpy as np

    if column not in rows[0]:
        raise SchemaError(f"unknown field column {column!r}")
    n = int(max(r["cell_x"] for r in rows)) + 1
    m = int(max(r["cell_y"] for r in rows)) + 1
    if len(rows) != n * m or n != m:
        raise SchemaError(f"field table is not a square grid: "
                          f"{len(rows)} rows, extent {n}x{m}")
    out = np.full((n, n), np.nan)
    for r in rows:
        out[int(r["cell_x"]), int(r["cell_y"])] = r[column]
    if np.any(np.isnan(out)):
        raise SchemaError("field table has missing cells")
    return n, out
