"""Edge carriers: circular arcs, segments and half-lines with parametrization.

Diagram edges live on one of three carriers.  Each carrier knows how to map a
parameter to a point, recover the parameter of an on-carrier point, and
intersect itself with another carrier.  Arc parameters are affine in angle on
[0, 1]; segment parameters are affine on [0, 1]; ray-piece parameters are
euclidean distances from the apex (the upper end may be infinite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geom import TWO_PI, Point, canonicalize

_BIG = 1e18


@dataclass(frozen=True)
class Arc:
    """Circular arc traversed from angle a0 by a signed sweep."""

    cx: float
    cy: float
    r: float
    a0: float
    sweep: float  # signed, |sweep| <= 2*pi

    kind = "arc"

    def point_at(self, u: float) -> Point:
        a = self.a0 + u * self.sweep
        return (self.cx + self.r * math.cos(a), self.cy + self.r * math.sin(a))

    def tangent_at(self, u: float) -> Point:
        a = self.a0 + u * self.sweep
        s = 1.0 if self.sweep >= 0 else -1.0
        return (-s * math.sin(a), s * math.cos(a))

    def angle_of(self, p: Point) -> float:
        return math.atan2(p[1] - self.cy, p[0] - self.cx)

    def param_of(self, p: Point, tol: float = 1e-9) -> float | None:
        """Parameter of an on-circle point if it lies on the swept range."""
        if abs(self.sweep) < 1e-15:
            return None
        # relative slack: points on huge circles are only meaningful to ~r*eps
        if abs(math.hypot(p[0] - self.cx, p[1] - self.cy) - self.r) > tol + self.r * 1e-12:
            return None
        ang_tol = tol / max(self.r, 1e-12) + 1e-12
        delta = canonicalize((self.angle_of(p) - self.a0) * (1.0 if self.sweep > 0 else -1.0))
        span = abs(self.sweep)
        if delta <= span + ang_tol:
            return min(max(delta / span, 0.0), 1.0) if delta <= span else 1.0
        if delta >= TWO_PI - ang_tol:  # just behind the start
            return 0.0
        return None

    def reversed(self) -> "Arc":
        return Arc(self.cx, self.cy, self.r, self.a0 + self.sweep, -self.sweep)

    def subarc(self, u0: float, u1: float) -> "Arc":
        return Arc(self.cx, self.cy, self.r, self.a0 + u0 * self.sweep,
                   (u1 - u0) * self.sweep)

    def length(self) -> float:
        return abs(self.sweep) * self.r

    def dist_to(self, p: Point) -> float:
        d = math.hypot(p[0] - self.cx, p[1] - self.cy)
        if self.param_of(p_closest := self._project(p), tol=1e-12) is not None:
            return abs(d - self.r)
        e0 = self.point_at(0.0)
        e1 = self.point_at(1.0)
        return min(math.hypot(p[0] - e0[0], p[1] - e0[1]),
                   math.hypot(p[0] - e1[0], p[1] - e1[1]))

    def _project(self, p: Point) -> Point:
        d = math.hypot(p[0] - self.cx, p[1] - self.cy)
        if d < 1e-15:
            return self.point_at(0.0)
        k = self.r / d
        return (self.cx + (p[0] - self.cx) * k, self.cy + (p[1] - self.cy) * k)

    def to_json(self) -> dict:
        return {"type": "arc", "center": [self.cx, self.cy], "radius": self.r,
                "angle0": self.a0, "sweep": self.sweep}


@dataclass(frozen=True)
class Seg:
    x0: float
    y0: float
    x1: float
    y1: float

    kind = "seg"

    def point_at(self, u: float) -> Point:
        return (self.x0 + u * (self.x1 - self.x0), self.y0 + u * (self.y1 - self.y0))

    def tangent_at(self, u: float) -> Point:
        dx, dy = self.x1 - self.x0, self.y1 - self.y0
        n = math.hypot(dx, dy)
        return (dx / n, dy / n)

    def param_of(self, p: Point, tol: float = 1e-9) -> float | None:
        dx, dy = self.x1 - self.x0, self.y1 - self.y0
        L2 = dx * dx + dy * dy
        if L2 < 1e-30:
            return None
        u = ((p[0] - self.x0) * dx + (p[1] - self.y0) * dy) / L2
        off = abs((p[0] - self.x0) * dy - (p[1] - self.y0) * dx) / math.sqrt(L2)
        slack = tol / math.sqrt(L2)
        if off <= tol and -slack <= u <= 1.0 + slack:
            return min(max(u, 0.0), 1.0)
        return None

    def reversed(self) -> "Seg":
        return Seg(self.x1, self.y1, self.x0, self.y0)

    def subarc(self, u0: float, u1: float) -> "Seg":
        p0 = self.point_at(u0)
        p1 = self.point_at(u1)
        return Seg(p0[0], p0[1], p1[0], p1[1])

    def length(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    def dist_to(self, p: Point) -> float:
        dx, dy = self.x1 - self.x0, self.y1 - self.y0
        L2 = dx * dx + dy * dy
        if L2 < 1e-30:
            return math.hypot(p[0] - self.x0, p[1] - self.y0)
        u = ((p[0] - self.x0) * dx + (p[1] - self.y0) * dy) / L2
        u = min(max(u, 0.0), 1.0)
        q = self.point_at(u)
        return math.hypot(p[0] - q[0], p[1] - q[1])

    def to_json(self) -> dict:
        return {"type": "segment", "p0": [self.x0, self.y0], "p1": [self.x1, self.y1]}


@dataclass(frozen=True)
class RaySeg:
    """Piece of a half-line; parameter is distance from the apex."""

    ax: float
    ay: float
    dx: float
    dy: float
    t0: float
    t1: float  # math.inf for an unbounded piece

    kind = "rayseg"

    def point_at(self, t: float) -> Point:
        if math.isinf(t):
            t = _BIG
        return (self.ax + t * self.dx, self.ay + t * self.dy)

    def tangent_at(self, t: float) -> Point:
        return (self.dx, self.dy)

    def param_of(self, p: Point, tol: float = 1e-9) -> float | None:
        t = (p[0] - self.ax) * self.dx + (p[1] - self.ay) * self.dy
        off = abs((p[0] - self.ax) * self.dy - (p[1] - self.ay) * self.dx)
        if off <= tol and self.t0 - tol <= t <= self.t1 + tol:
            return min(max(t, self.t0), self.t1)
        return None

    def reversed(self) -> "RaySeg":
        if math.isinf(self.t1):
            raise ValueError("cannot reverse an unbounded ray piece")
        return RaySeg(self.ax + self.t1 * self.dx, self.ay + self.t1 * self.dy,
                      -self.dx, -self.dy, 0.0, self.t1 - self.t0)

    def subarc(self, u0: float, u1: float) -> "RaySeg":
        return RaySeg(self.ax, self.ay, self.dx, self.dy, u0, u1)

    def length(self) -> float:
        return self.t1 - self.t0

    def dist_to(self, p: Point) -> float:
        t = (p[0] - self.ax) * self.dx + (p[1] - self.ay) * self.dy
        t = min(max(t, self.t0), self.t1 if not math.isinf(self.t1) else _BIG)
        q = self.point_at(t)
        return math.hypot(p[0] - q[0], p[1] - q[1])

    def to_json(self) -> dict:
        return {"type": "ray", "apex": [self.ax, self.ay], "dir": [self.dx, self.dy],
                "t0": self.t0, "t1": None if math.isinf(self.t1) else self.t1}


Carrier = Arc | Seg | RaySeg


# -- primitive intersections -------------------------------------------------

def circle_circle(c1x: float, c1y: float, r1: float,
                  c2x: float, c2y: float, r2: float) -> list[Point]:
    """Intersection points of two circles (0, 1 or 2 points)."""
    dx, dy = c2x - c1x, c2y - c1y
    d = math.hypot(dx, dy)
    if d < 1e-15:
        return []
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    h2 = r1 * r1 - a * a
    if h2 < 0.0:
        if h2 > -1e-12 * r1 * r1:
            h2 = 0.0
        else:
            return []
    h = math.sqrt(h2)
    mx = c1x + a * dx / d
    my = c1y + a * dy / d
    if h == 0.0:
        return [(mx, my)]
    ox = -dy / d * h
    oy = dx / d * h
    return [(mx + ox, my + oy), (mx - ox, my - oy)]


def circle_line(cx: float, cy: float, r: float,
                px: float, py: float, dx: float, dy: float) -> list[tuple[float, Point]]:
    """Intersections of a circle with the line p + t*d; returns (t, point)."""
    fx, fy = px - cx, py - cy
    a = dx * dx + dy * dy
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - r * r
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        if disc > -1e-12 * max(1.0, b * b):
            disc = 0.0
        else:
            return []
    sq = math.sqrt(disc)
    out = []
    for t in ((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)):
        out.append((t, (px + t * dx, py + t * dy)))
    if disc == 0.0:
        out = out[:1]
    return out


def line_line(p1x: float, p1y: float, d1x: float, d1y: float,
              p2x: float, p2y: float, d2x: float, d2y: float,
              eps: float = 1e-14) -> tuple[float, float, Point] | None:
    den = d1x * d2y - d1y * d2x
    if abs(den) < eps:
        return None
    wx, wy = p2x - p1x, p2y - p1y
    t1 = (wx * d2y - wy * d2x) / den
    t2 = (wx * d1y - wy * d1x) / den
    return (t1, t2, (p1x + t1 * d1x, p1y + t1 * d1y))


def _line_of(car: Carrier) -> tuple[float, float, float, float]:
    """(px, py, dx, dy) of the supporting line; d at unit scale of the param."""
    if isinstance(car, Seg):
        return (car.x0, car.y0, car.x1 - car.x0, car.y1 - car.y0)
    if isinstance(car, RaySeg):
        return (car.ax, car.ay, car.dx, car.dy)
    raise TypeError(car)


def _lin_param_ok(car: Carrier, t: float, tol: float) -> float | None:
    if isinstance(car, Seg):
        slack = tol / max(car.length(), 1e-30)
        if -slack <= t <= 1.0 + slack:
            return min(max(t, 0.0), 1.0)
        return None
    if isinstance(car, RaySeg):
        if car.t0 - tol <= t <= car.t1 + tol:
            return min(max(t, car.t0), car.t1)
        return None
    raise TypeError(car)


def intersect(a: Carrier, b: Carrier, tol: float = 1e-9) -> list[tuple[float, float, Point]]:
    """All intersection points of two carrier pieces.

    Returns (param_a, param_b, point) triples; parameters are clamped into
    range when the hit is within tol of an endpoint.  Overlapping collinear
    or cocircular carriers yield no points (callers treat those separately).
    """
    out: list[tuple[float, float, Point]] = []
    if isinstance(a, Arc) and isinstance(b, Arc):
        same = (abs(a.cx - b.cx) < tol and abs(a.cy - b.cy) < tol
                and abs(a.r - b.r) < tol)
        if same:
            return []
        pts = circle_circle(a.cx, a.cy, a.r, b.cx, b.cy, b.r)
        if len(pts) == 2 and math.hypot(pts[0][0] - pts[1][0],
                                        pts[0][1] - pts[1][1]) <= 4 * tol:
            # tangential contact: the root pair is noise around one point
            pts = [(0.5 * (pts[0][0] + pts[1][0]), 0.5 * (pts[0][1] + pts[1][1]))]
        for p in pts:
            ua = a.param_of(p, tol)
            ub = b.param_of(p, tol)
            if ua is not None and ub is not None:
                out.append((ua, ub, p))
        return out
    if isinstance(a, Arc):
        px, py, dx, dy = _line_of(b)
        roots = circle_line(a.cx, a.cy, a.r, px, py, dx, dy)
        if len(roots) == 2:
            span = math.hypot(dx, dy)
            if abs(roots[0][0] - roots[1][0]) * span <= 100 * tol:
                t_mid = 0.5 * (roots[0][0] + roots[1][0])
                roots = [(t_mid, (px + t_mid * dx, py + t_mid * dy))]
        for t, p in roots:
            ua = a.param_of(p, tol)
            ub = _lin_param_ok(b, t, tol)
            if ua is not None and ub is not None:
                out.append((ua, ub, p))
        return out
    if isinstance(b, Arc):
        return [(ua, ub, p) for (ub, ua, p) in intersect(b, a, tol)]
    p1x, p1y, d1x, d1y = _line_of(a)
    p2x, p2y, d2x, d2y = _line_of(b)
    hit = line_line(p1x, p1y, d1x, d1y, p2x, p2y, d2x, d2y)
    if hit is None:
        return []
    t1, t2, p = hit
    ua = _lin_param_ok(a, t1, tol)
    ub = _lin_param_ok(b, t2, tol)
    if ua is not None and ub is not None:
        out.append((ua, ub, p))
    return out


def circumcircle(p1: Point, p2: Point, p3: Point,
                 collinear_tol: float = 1e-12) -> Circle_t:
    """Circle through three points; raises ValueError when collinear."""
    ax, ay = p1
    bx, by = p2
    cx, cy = p3
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    scale2 = max(abs(ax - cx), abs(ay - cy), abs(bx - cx), abs(by - cy), 1e-300) ** 2
    if abs(d) < collinear_tol * scale2:
        raise ValueError("collinear points")
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    r = math.hypot(ax - ux, ay - uy)
    return ((ux, uy), r)


Circle_t = tuple[Point, float]
