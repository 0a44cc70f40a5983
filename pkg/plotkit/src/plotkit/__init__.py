"""Offline rendering of lattice-gas harness CSV outputs."""

from plotkit.schemas import SchemaError, load_table  # noqa: F401
