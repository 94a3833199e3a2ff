"""cvxfun: exact functorial constructions on polyhedral convex sets.

Subpackages:
    qlinalg     exact rational linear algebra, LP, PSD decisions
    cones       polyhedral cones, marked cones, convex bodies, duality, faces
    functors    tensor / symmetric / Hom / Schur constructions and witnesses
    linearizer  multilinear objectives turned into linear ones over functor bodies
    moments     moment pencils and the spectrahedral outer-approximation hierarchy
    cli         the `cvxfun` command line front end and JSON interchange
"""

__version__ = "0.1.0"
