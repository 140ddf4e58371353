"""Curve graph, boundary and join-topology toolkit for the once-punctured torus."""
from ._kernels import BACKEND
from .action import MappingClass, act_boundary, act_slope, classify, twist, twist_coordinate
from .boundary import OrientedCurve, PrefixStream, QuadraticIrrational, converges_to, gromov_product
from .errors import CurvexError, IndistinguishableAtDepth, InsufficientDepth, ParseError, SemanticError
from .join import (
    ComponentSpace,
    ProductPoint,
    Term,
    Universe,
    WeightedLamination,
    converge_in_X,
    converge_in_Y,
    extract_limit,
    w_membership,
)
from .markings import Marking, marking_distance_bfs, max_projection_gap, mm_path
from .slopes import INFINITY, ZERO, Slope, farey_distance, farey_distance_bfs, farey_geodesic, is_edge

__version__ = "0.1.0"
