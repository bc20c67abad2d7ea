"""Angular-distance geometry kernel.

The whole library is built on one distance: the counterclockwise angle a ray
must sweep about its apex until it passes through a query point.  Everything
here is a pure function on plain floats; batch variants for the oracle live
in :mod:`rotoray.oracle`.

Conventions:

* points and directions are ``(x, y)`` tuples of floats,
* angles are radians canonicalized to ``[0, 2*pi)``,
* a ray is an apex plus a unit direction.
"""

from __future__ import annotations

import math
from typing import NamedTuple

TWO_PI = 2.0 * math.pi

#: Absolute tolerance for angle comparisons (one site for all predicates).
EPS_ANGLE = 1e-9

#: Below this separation a query point is treated as sitting on an apex.
EPS_APEX = 1e-12


def set_eps_angle(value: float) -> None:
    """Override the global angle tolerance (CLI --eps-angle / ROTORAY_EPS)."""
    global EPS_ANGLE
    if not 0.0 < value < 1e-3:
        raise ValueError("eps-angle must be a small positive tolerance")
    EPS_ANGLE = value

Point = tuple[float, float]
Direction = tuple[float, float]


class Ray(NamedTuple):
    """Half-line site: apex plus unit direction."""

    apex: Point
    dir: Direction

    @property
    def angle(self) -> float:
        """Direction angle in [0, 2*pi)."""
        return canonicalize(math.atan2(self.dir[1], self.dir[0]))

    def point_at(self, t: float) -> Point:
        return (self.apex[0] + t * self.dir[0], self.apex[1] + t * self.dir[1])


class Circle(NamedTuple):
    center: Point
    radius: float


def make_ray(apex: Point, direction: Direction) -> Ray:
    """Build a ray, normalizing the direction.

    Raises ValueError for a zero direction or non-finite input.
    """
    ax, ay = float(apex[0]), float(apex[1])
    dx, dy = float(direction[0]), float(direction[1])
    if not (math.isfinite(ax) and math.isfinite(ay) and math.isfinite(dx) and math.isfinite(dy)):
        raise ValueError("ray coordinates must be finite")
    n = math.hypot(dx, dy)
    if n < EPS_APEX:
        raise ValueError("ray direction must be nonzero")
    return Ray((ax, ay), (dx / n, dy / n))


def ray_from_angle(apex: Point, theta: float) -> Ray:
    return Ray((float(apex[0]), float(apex[1])), (math.cos(theta), math.sin(theta)))


def canonicalize(theta: float) -> float:
    """Reduce an angle to [0, 2*pi)."""
    theta = math.fmod(theta, TWO_PI)
    if theta < 0.0:
        theta += TWO_PI
    if theta >= TWO_PI:  # fmod can land exactly on 2*pi after the add
        theta -= TWO_PI
    return theta


def ccw_angle(u: Direction, v: Direction) -> float:
    """Counterclockwise angle from direction u to direction v, in [0, 2*pi)."""
    cross = u[0] * v[1] - u[1] * v[0]
    dot = u[0] * v[0] + u[1] * v[1]
    return canonicalize(math.atan2(cross, dot))


def angular_distance(x: Point, r: Ray) -> float:
    """Counterclockwise sweep of r about its apex until it touches x.

    Zero at the apex itself, by convention.  Discontinuous (jump of 2*pi)
    across the ray's clockwise side.
    """
    wx = x[0] - r.apex[0]
    wy = x[1] - r.apex[1]
    if math.hypot(wx, wy) < EPS_APEX:
        return 0.0
    cross = r.dir[0] * wy - r.dir[1] * wx
    dot = r.dir[0] * wx + r.dir[1] * wy
    return canonicalize(math.atan2(cross, dot))


def angular_difference(r: Ray, s: Ray) -> float:
    """Counterclockwise rotation of s about its apex making it parallel to r.

    For non-parallel rays, angular_difference(r, s) + angular_difference(s, r)
    equals 2*pi.
    """
    return ccw_angle(s.dir, r.dir)


def surrogate_distance(x: Point, r: Ray) -> float:
    """Piecewise-algebraic stand-in for angular_distance, in [0, 4).

    Equals 1 - cos(theta) for theta in [0, pi] and 3 + cos(theta) above;
    strictly increasing in theta, so it orders points exactly like the angle
    while avoiding atan2 and the 2*pi branch cut in comparisons.
    """
    wx = x[0] - r.apex[0]
    wy = x[1] - r.apex[1]
    n = math.hypot(wx, wy)
    if n < EPS_APEX:
        return 0.0
    c = (r.dir[0] * wx + r.dir[1] * wy) / n
    cross = r.dir[0] * wy - r.dir[1] * wx
    if cross >= 0.0:
        return 1.0 - c
    return 3.0 + c


def surrogate_of_angle(theta: float) -> float:
    """surrogate_distance expressed directly on a canonical angle."""
    theta = canonicalize(theta)
    if theta <= math.pi:
        return 1.0 - math.cos(theta)
    return 3.0 + math.cos(theta)


# -- small vector helpers ----------------------------------------------------

def sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def add(a: Point, b: Point) -> Point:
    return (a[0] + b[0], a[1] + b[1])


def scale(a: Point, k: float) -> Point:
    return (a[0] * k, a[1] * k)


def dot(a: Point, b: Point) -> float:
    return a[0] * b[0] + a[1] * b[1]


def cross(a: Point, b: Point) -> float:
    return a[0] * b[1] - a[1] * b[0]


def norm(a: Point) -> float:
    return math.hypot(a[0], a[1])


def dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def unit(a: Point) -> Direction:
    n = math.hypot(a[0], a[1])
    if n < EPS_APEX:
        raise ValueError("cannot normalize a zero vector")
    return (a[0] / n, a[1] / n)


def rotate(v: Direction, theta: float) -> Direction:
    c, s = math.cos(theta), math.sin(theta)
    return (v[0] * c - v[1] * s, v[0] * s + v[1] * c)


def perp(v: Direction) -> Direction:
    """v rotated by +pi/2 (counterclockwise normal)."""
    return (-v[1], v[0])


def rotate_ray(r: Ray, theta: float) -> Ray:
    """Rotate a ray about its own apex; the apex stays put."""
    return Ray(r.apex, rotate(r.dir, theta))


def point_on_ray(x: Point, r: Ray, tol: float) -> bool:
    """True when x lies on the closed half-line r within distance tol."""
    w = sub(x, r.apex)
    t = dot(w, r.dir)
    if t < -tol:
        return False
    return abs(cross(r.dir, w)) <= tol


def input_scale(points: list[Point]) -> float:
    """Characteristic length of an input: max coordinate spread, at least 1."""
    if not points:
        return 1.0
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return max(1.0, max(xs) - min(xs), max(ys) - min(ys), max(map(abs, xs + ys)))
