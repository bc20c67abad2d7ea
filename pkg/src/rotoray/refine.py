"""Newton refinement of candidate vertices and conditioning-aware slacks.

Angular distance has gradient magnitude 1/|p - apex|, so any fixed angle
tolerance is wrong near an apex: a coordinate error e reads as an angle error
e/|p - apex|.  Candidate points coming out of circle intersections (whose
radii blow up for near-parallel pairs) are polished with a couple of Newton
steps on the equidistance residuals, and comparisons get a per-site slack
proportional to the local gradient.
"""

from __future__ import annotations

import math

from .geom import Point, Ray, angular_distance, dist

TWO_PI = 2.0 * math.pi


def wrap_diff(x: float) -> float:
    """Reduce an angle difference into [-pi, pi)."""
    return (x + math.pi) % TWO_PI - math.pi


def distance_gradient(p: Point, r: Ray) -> tuple[float, float]:
    """Gradient of the angular distance (the bearing) at p; apex-singular."""
    wx = p[0] - r.apex[0]
    wy = p[1] - r.apex[1]
    n2 = wx * wx + wy * wy
    if n2 < 1e-300:
        return (0.0, 0.0)
    return (-wy / n2, wx / n2)


def angle_slack(p: Point, rays: list[Ray], idxs, coord_tol: float,
                base: float = 0.0) -> float:
    """Angle tolerance equivalent to a coord_tol displacement near p."""
    s = base
    for m in idxs:
        s += coord_tol / max(dist(p, rays[m].apex), coord_tol)
    return s


def refine_equidistant3(p: Point, ra: Ray, rb: Ray, rc: Ray,
                        iters: int = 4, max_step: float = math.inf) -> Point:
    """Newton-polish p onto the point equidistant to three rays."""
    x, y = p
    for _ in range(iters):
        fa = angular_distance((x, y), ra)
        fb = angular_distance((x, y), rb)
        fc = angular_distance((x, y), rc)
        f1 = wrap_diff(fa - fb)
        f2 = wrap_diff(fa - fc)
        ga = distance_gradient((x, y), ra)
        gb = distance_gradient((x, y), rb)
        gc = distance_gradient((x, y), rc)
        a11, a12 = ga[0] - gb[0], ga[1] - gb[1]
        a21, a22 = ga[0] - gc[0], ga[1] - gc[1]
        det = a11 * a22 - a12 * a21
        if abs(det) < 1e-300:
            break
        dx = (f1 * a22 - f2 * a12) / det
        dy = (a11 * f2 - a21 * f1) / det
        step = math.hypot(dx, dy)
        if step > max_step:
            k = max_step / step
            dx *= k
            dy *= k
        x -= dx
        y -= dy
        if step < 1e-15:
            break
    return (x, y)


def refine_on_ray_tie(p: Point, ra: Ray, rb: Ray, rk: Ray,
                      iters: int = 4, max_step: float = math.inf) -> Point:
    """Newton-polish p onto {equidistant to ra, rb} intersected with ray rk."""
    x, y = p
    for _ in range(iters):
        fa = angular_distance((x, y), ra)
        fb = angular_distance((x, y), rb)
        f1 = wrap_diff(fa - fb)
        f2 = rk.dir[0] * (y - rk.apex[1]) - rk.dir[1] * (x - rk.apex[0])
        ga = distance_gradient((x, y), ra)
        gb = distance_gradient((x, y), rb)
        a11, a12 = ga[0] - gb[0], ga[1] - gb[1]
        a21, a22 = -rk.dir[1], rk.dir[0]
        det = a11 * a22 - a12 * a21
        if abs(det) < 1e-300:
            break
        dx = (f1 * a22 - f2 * a12) / det
        dy = (a11 * f2 - a21 * f1) / det
        step = math.hypot(dx, dy)
        if step > max_step:
            k = max_step / step
            dx *= k
            dy *= k
        x -= dx
        y -= dy
        if step < 1e-15:
            break
    return (x, y)
