"""Rotating rays Voronoi diagrams and Brocard angles.

Sites are rays; the distance from a point to a ray is the counterclockwise
angle the ray must sweep about its apex to touch the point.  The package
builds the nearest-site diagram in the plane, inside convex polygons (two
independent pipelines: collapse, and split/rotate/merge), and restricted to
curves as lower envelopes, and extracts the Brocard angle (the minimum
uniform floodlight aperture that lights the domain).
"""

from .geom import (EPS_ANGLE, Ray, angular_difference, angular_distance,
                   canonicalize, ccw_angle, make_ray, ray_from_angle,
                   rotate_ray, set_eps_angle, surrogate_distance)
from .bisector import (Bisector, BisectingCircle, PairClass, arc_distance,
                       bisecting_circle, bisector, classify_pair, dominates)
from .diagram import (BrocardResult, Diagram, Edge, Face, Vertex, build_faces,
                      connected_components, diagram_isomorphic, is_forest,
                      is_tree, locate_owner)
from .oracle import (SampleReport, brocard_grid_bound, brute_nearest,
                     sample_compare)
from .plane import (brocard_plane, build_plane_diagram, generate_adversarial,
                    rays_pairwise_noncrossing)
from .polygon import (ConvexPolygon, DirectionClass, DirTag, brocard_polygon,
                      build_pvd_collapse, dd_nearest, is_brocard_polygon,
                      rays_of_polygon, rotate_rays, split_by_direction)
from .merge import build_pvd_splitmerge, build_subdiagram, merge_diagrams
from .envelope import (INSIDE, OUTSIDE, UNRESTRICTED, CurveDomain, Envelope,
                       EnvelopePiece, PartialFunction, brocard_curve,
                       lower_envelope, partial_functions)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "EPS_ANGLE", "Ray", "angular_difference", "angular_distance",
    "canonicalize", "ccw_angle", "make_ray", "ray_from_angle", "rotate_ray",
    "set_eps_angle", "surrogate_distance",
    "Bisector", "BisectingCircle", "PairClass", "arc_distance",
    "bisecting_circle", "bisector", "classify_pair", "dominates",
    "BrocardResult", "Diagram", "Edge", "Face", "Vertex", "build_faces",
    "connected_components", "diagram_isomorphic", "is_forest", "is_tree",
    "locate_owner",
    "SampleReport", "brocard_grid_bound", "brute_nearest", "sample_compare",
    "brocard_plane", "build_plane_diagram", "generate_adversarial",
    "rays_pairwise_noncrossing",
    "ConvexPolygon", "DirectionClass", "DirTag", "brocard_polygon",
    "build_pvd_collapse", "dd_nearest", "is_brocard_polygon",
    "rays_of_polygon", "rotate_rays", "split_by_direction",
    "build_pvd_splitmerge", "build_subdiagram", "merge_diagrams",
    "INSIDE", "OUTSIDE", "UNRESTRICTED", "CurveDomain", "Envelope",
    "EnvelopePiece", "PartialFunction", "brocard_curve", "lower_envelope",
    "partial_functions",
    "errors",
]
