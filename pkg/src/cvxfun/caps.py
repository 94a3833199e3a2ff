"""Enumeration caps.

Every potentially explosive enumeration checks one of these limits first and
raises SizeCapError instead of grinding.  The environment variable CVXFUN_CAP,
when set to a positive integer, overrides every cap at once (useful for
benchmarking beyond desk scale).
"""

import os

# Dimension of the ambient tensor power d**n used by Schur functors.
TENSOR_POWER_DIM = 4096
# Vertices accepted per factor body in functor constructions.
VERTICES_PER_FACTOR = 20
# Face-lattice enumeration refuses beyond this many facets / vertices.
FACE_LATTICE_FACETS = 12
FACE_LATTICE_VERTICES = 20
# Vertex tuples scanned by brute-force multilinear maximization.
TUPLE_ENUMERATION = 10**6
# Rows of a moment pencil (monomials of degree <= k).
PENCIL_SIZE = 256


def cap(name: str) -> int:
    """Return the active value of the named cap, honoring CVXFUN_CAP."""
    override = os.environ.get("CVXFUN_CAP")
    if override:
        try:
            value = int(override)
        except ValueError as exc:
            raise ValueError(f"CVXFUN_CAP must be an integer, got {override!r}") from exc
        if value <= 0:
            raise ValueError("CVXFUN_CAP must be positive")
        return value
    return globals()[name]
