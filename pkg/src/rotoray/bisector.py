"""Pairwise structures: dominance, bisecting circles and bisector curves.

The bisector of two rays consists of the rays themselves plus one connecting
piece between the apices: a circular arc in the generic and tangent cases, a
segment for antiparallel rays, two half-lines for parallel rays, or a single
point when the apices coincide.  The connecting piece is selected among the
two candidate arcs by probing equidistance at the midpoint rather than by
symbolic case analysis: one code path, directly testable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import geom
from .carriers import Arc, RaySeg, Seg, circumcircle
from .errors import DegenerateArc, NearCollinear
from .geom import (EPS_ANGLE, TWO_PI, Point, Ray, angular_distance, canonicalize,
                   cross, dist, dot, perp, point_on_ray, sub, surrogate_distance,
                   unit)

#: Relative cross-product threshold treating three defining points as collinear.
EPS_COLLINEAR = 1e-12

#: Relative coordinate tolerance for incidence tests.
EPS_COORD = 1e-9


class PairClass(enum.Enum):
    GENERIC = "generic"
    TANGENT_APEX_ON_OTHER = "tangent_apex_on_other"
    TANGENT_APEX_OFF_OTHER = "tangent_apex_off_other"
    SHARED_APEX = "shared_apex"
    PARALLEL = "parallel"
    ANTIPARALLEL_DISTINCT_LINES = "antiparallel_distinct_lines"
    ANTIPARALLEL_SAME_LINE = "antiparallel_same_line"


@dataclass(frozen=True)
class BisectingCircle:
    """Carrier of the connecting piece: a circle, a line, or a point."""

    kind: str  # "circle" | "line" | "point"
    center: Point | None = None
    radius: float = 0.0
    line_point: Point | None = None
    line_dir: Point | None = None


@dataclass(frozen=True)
class Bisector:
    r: Ray
    s: Ray
    pair_class: PairClass
    circle: BisectingCircle
    #: connecting piece from apex(r) to apex(s): Arc | Seg | (RaySeg, RaySeg) | None
    arc: object
    contains_I: bool


def _scale(r: Ray, s: Ray) -> float:
    return geom.input_scale([r.apex, s.apex])


def classify_pair(r: Ray, s: Ray, eps_angle: float | None = None) -> PairClass:
    """Unique configuration tag of an ordered ray pair (stable under swap)."""
    if eps_angle is None:
        eps_angle = geom.EPS_ANGLE
    scale = _scale(r, s)
    tol = EPS_COORD * scale
    if dist(r.apex, s.apex) <= tol:
        return PairClass.SHARED_APEX
    c = cross(r.dir, s.dir)
    d = dot(r.dir, s.dir)
    if abs(c) <= eps_angle:
        if d > 0.0:
            return PairClass.PARALLEL
        off = abs(cross(r.dir, sub(s.apex, r.apex)))
        if off <= tol:
            return PairClass.ANTIPARALLEL_SAME_LINE
        return PairClass.ANTIPARALLEL_DISTINCT_LINES
    # supporting lines cross at a unique point I
    hit = _supporting_intersection(r, s)
    if dist(hit, r.apex) <= tol:
        return (PairClass.TANGENT_APEX_ON_OTHER if point_on_ray(r.apex, s, tol)
                else PairClass.TANGENT_APEX_OFF_OTHER)
    if dist(hit, s.apex) <= tol:
        return (PairClass.TANGENT_APEX_ON_OTHER if point_on_ray(s.apex, r, tol)
                else PairClass.TANGENT_APEX_OFF_OTHER)
    return PairClass.GENERIC


def _supporting_intersection(r: Ray, s: Ray) -> Point:
    den = cross(r.dir, s.dir)
    w = sub(s.apex, r.apex)
    t = cross(w, s.dir) / den
    return (r.apex[0] + t * r.dir[0], r.apex[1] + t * r.dir[1])


def _tangent_circle(p_t: Point, line_dir: Point, p_o: Point, scale: float):
    """Circle through p_t and p_o, tangent at p_t to the line with direction
    line_dir.  Degenerates when p_o lies on that line."""
    n = perp(line_dir)
    w = sub(p_o, p_t)
    den = 2.0 * dot(n, w)
    if abs(den) < EPS_COLLINEAR * scale:
        raise NearCollinear("tangent-circle apex is collinear with the tangent line")
    k = dot(w, w) / den
    center = (p_t[0] + k * n[0], p_t[1] + k * n[1])
    return center, abs(k)


def bisecting_circle(r: Ray, s: Ray) -> BisectingCircle:
    """Carrier of the equidistant piece per the pairwise case analysis."""
    cls = classify_pair(r, s)
    scale = _scale(r, s)
    if cls is PairClass.SHARED_APEX:
        return BisectingCircle("point", center=r.apex, radius=0.0)
    if cls in (PairClass.PARALLEL, PairClass.ANTIPARALLEL_DISTINCT_LINES,
               PairClass.ANTIPARALLEL_SAME_LINE):
        return BisectingCircle("line", line_point=r.apex,
                               line_dir=unit(sub(s.apex, r.apex)))
    if cls is PairClass.GENERIC:
        I = _supporting_intersection(r, s)
        try:
            center, radius = circumcircle(I, r.apex, s.apex,
                                          collinear_tol=EPS_COLLINEAR)
        except ValueError as exc:
            raise NearCollinear(str(exc)) from exc
        return BisectingCircle("circle", center=center, radius=radius)
    # tangent cases: I coincides with one of the apices
    I = _supporting_intersection(r, s)
    if dist(I, r.apex) <= dist(I, s.apex):
        center, radius = _tangent_circle(r.apex, r.dir, s.apex, scale)
    else:
        center, radius = _tangent_circle(s.apex, s.dir, r.apex, scale)
    return BisectingCircle("circle", center=center, radius=radius)


def _equidist_error(p: Point, r: Ray, s: Ray) -> float:
    return abs(surrogate_distance(p, r) - surrogate_distance(p, s))


def bisector(r: Ray, s: Ray) -> Bisector:
    """Full bisector record with the connecting piece oriented apex(r) to
    apex(s).  Propagates NearCollinear from the circle construction."""
    cls = classify_pair(r, s)
    bc = bisecting_circle(r, s)
    scale = _scale(r, s)
    tol = EPS_COORD * scale

    if cls is PairClass.SHARED_APEX:
        return Bisector(r, s, cls, bc, None, True)

    if cls is PairClass.PARALLEL:
        u = bc.line_dir
        # one half-line behind the first apex, one beyond the second
        if dot(u, sub(s.apex, r.apex)) < 0.0:
            u = (-u[0], -u[1])
        h_r = RaySeg(r.apex[0], r.apex[1], -u[0], -u[1], 0.0, math.inf)
        h_s = RaySeg(s.apex[0], s.apex[1], u[0], u[1], 0.0, math.inf)
        return Bisector(r, s, cls, bc, (h_r, h_s), False)

    if cls in (PairClass.ANTIPARALLEL_DISTINCT_LINES, PairClass.ANTIPARALLEL_SAME_LINE):
        seg = Seg(r.apex[0], r.apex[1], s.apex[0], s.apex[1])
        return Bisector(r, s, cls, bc, seg, False)

    center, radius = bc.center, bc.radius
    phi_r = math.atan2(r.apex[1] - center[1], r.apex[0] - center[0])
    phi_s = math.atan2(s.apex[1] - center[1], s.apex[0] - center[0])
    sweep_ccw = canonicalize(phi_s - phi_r)
    if sweep_ccw == 0.0:
        sweep_ccw = TWO_PI
    cand_ccw = Arc(center[0], center[1], radius, phi_r, sweep_ccw)
    cand_cw = Arc(center[0], center[1], radius, phi_r, sweep_ccw - TWO_PI)
    err_ccw = _equidist_error(cand_ccw.point_at(0.5), r, s)
    err_cw = _equidist_error(cand_cw.point_at(0.5), r, s)
    arc = cand_ccw if err_ccw <= err_cw else cand_cw

    I = _supporting_intersection(r, s)
    on_r = point_on_ray(I, r, tol)
    on_s = point_on_ray(I, s, tol)
    contains = on_r == on_s
    return Bisector(r, s, cls, bc, arc, contains)


def dominates(x: Point, r: Ray, s: Ray) -> bool:
    """True when x is strictly nearer (in angular distance) to r than to s."""
    return surrogate_distance(x, r) < surrogate_distance(x, s)


def arc_distance(bis: Bisector, t: float) -> float:
    """Distance profile along the connecting piece, t=0 at apex(r), t=1 at
    apex(s).

    Interior points are equidistant to both rays; the value is monotone in t
    for non-parallel supporting lines (wrapping through 0 where the piece
    crosses a ray crossing point), and constant on an antiparallel segment.
    """
    arc = bis.arc
    if arc is None or isinstance(arc, tuple):
        raise DegenerateArc("no bounded connecting piece for this pair")
    if not 0.0 <= t <= 1.0:
        raise ValueError("arc parameter must lie in [0, 1]")
    return angular_distance(arc.point_at(t), bis.r)
