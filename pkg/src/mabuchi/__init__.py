"""Geodesics between convex potentials on an interval.

Weak geodesics come from the lower convex hull of the lifted boundary data;
smooth ones from the segment foliation when the endpoint gradient images agree.
The ``verify`` module turns regularity and barrier statements into numerical
checks on any sampled solution.
"""

from .envelope import HullEnvelope, barrier, contact_set, envelope_grid, solve_envelope_hull
from .expr import ScalarField, parse_expression
from .foliation import NotInImage, NotSmoothlyConnectable, smooth_geodesic
from .grid import GridField, SpaceDomain, SpaceTimeGrid, read_grid_csv
from .kernels import BACKEND
from .oracles import oracle_grid
from .potential import gradient_image, images_equal, validate_potential
from .toric import ToricProblem, complex_hessian, log_pullback, toric_psh_check
from .verify import CheckRegion, VerificationReport, run_checks

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "GridField",
    "HullEnvelope",
    "NotInImage",
    "NotSmoothlyConnectable",
    "CheckRegion",
    "ScalarField",
    "SpaceDomain",
    "SpaceTimeGrid",
    "ToricProblem",
    "VerificationReport",
    "barrier",
    "complex_hessian",
    "contact_set",
    "envelope_grid",
    "gradient_image",
    "images_equal",
    "log_pullback",
    "oracle_grid",
    "parse_expression",
    "read_grid_csv",
    "run_checks",
    "smooth_geodesic",
    "solve_envelope_hull",
    "toric_psh_check",
    "validate_potential",
]
