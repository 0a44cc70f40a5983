"""Active/passive lattice gas on the 2D torus.

Event-driven exclusion-process simulator with continuous orientations,
a conservative solver for the associated cross-diffusion PDE system,
closed-form transport coefficients, and an exact small-box verification
laboratory for canonical-measure identities.
"""

__version__ = "0.1.0"
