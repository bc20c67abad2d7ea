"""Brute-force ground truth: nearest-site queries, diagram sampling
comparison, and grid lower bounds on the Brocard angle.

Everything downstream is checked against these definitional evaluations.
Batch paths are vectorized with numpy; the scalar path is plain math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geom import TWO_PI, Point, Ray, angular_distance

_APEX_EPS = 1e-12


@dataclass
class SampleReport:
    samples: int
    excluded: int
    seed: int
    mismatches: list[tuple[Point, int, int, float]] = field(default_factory=list)
    max_margin_violation: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches


def brute_nearest(x: Point, rays: list[Ray]) -> tuple[int, float]:
    """Argmin and min of the angular distance over all sites.

    Ties go to the smallest site id.
    """
    if not rays:
        raise ValueError("need at least one ray")
    best = 0
    best_d = angular_distance(x, rays[0])
    for i in range(1, len(rays)):
        d = angular_distance(x, rays[i])
        if d < best_d:
            best, best_d = i, d
    return best, best_d


def nearest_with_ties(x: Point, rays: list[Ray], tol: float = 1e-9) -> list[int]:
    """All site ids within tol of the minimum distance at x."""
    ds = [angular_distance(x, r) for r in rays]
    m = min(ds)
    return [i for i, d in enumerate(ds) if d - m <= tol]


def distances_to_all(xs: np.ndarray, ys: np.ndarray, rays: list[Ray]) -> np.ndarray:
    """Angular distances of query points to every ray.

    xs, ys: shape (m,) query coordinates.  Returns shape (len(rays), m).
    """
    ax = np.array([r.apex[0] for r in rays])[:, None]
    ay = np.array([r.apex[1] for r in rays])[:, None]
    dx = np.array([r.dir[0] for r in rays])[:, None]
    dy = np.array([r.dir[1] for r in rays])[:, None]
    wx = xs[None, :] - ax
    wy = ys[None, :] - ay
    ang = np.arctan2(dx * wy - dy * wx, dx * wx + dy * wy)
    ang = np.mod(ang, TWO_PI)
    on_apex = np.hypot(wx, wy) < _APEX_EPS
    ang[on_apex] = 0.0
    return ang


def min_distances(xs: np.ndarray, ys: np.ndarray, rays: list[Ray]) -> tuple[np.ndarray, np.ndarray]:
    """(argmin site ids, min distances) for a batch of query points."""
    d = distances_to_all(xs, ys, rays)
    idx = np.argmin(d, axis=0)
    return idx, d[idx, np.arange(d.shape[1])]


class XorShift:
    """xorshift64* generator: deterministic across platforms, recorded seed."""

    def __init__(self, seed: int):
        self.state = (seed ^ 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF or 1

    def next_u64(self) -> int:
        x = self.state
        x ^= (x >> 12) & 0xFFFFFFFFFFFFFFFF
        x ^= (x << 25) & 0xFFFFFFFFFFFFFFFF
        x ^= (x >> 27) & 0xFFFFFFFFFFFFFFFF
        self.state = x & 0xFFFFFFFFFFFFFFFF
        return (self.state * 0x2545F4914F6CDD1D) & 0xFFFFFFFFFFFFFFFF

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * (self.next_u64() >> 11) / float(1 << 53)


def sample_compare(diagram, rays: list[Ray], region, n: int, seed: int = 1,
                   exclusion: float = 1e-6) -> SampleReport:
    """Compare diagram ownership against brute force at seeded sample points.

    region is either an axis box ``(x0, y0, x1, y1)`` or a list of convex
    polygon vertices.  Points within ``exclusion * scale`` of any diagram
    edge are skipped; elsewhere the located face owner must equal the brute
    nearest site.  Mismatches are data, not errors.
    """
    from .diagram import locate_owner  # local import to avoid a cycle

    rng = XorShift(seed)
    if isinstance(region, (tuple, list)) and len(region) == 4 and not isinstance(region[0], (tuple, list)):
        x0, y0, x1, y1 = region
        poly = None
    else:
        poly = [tuple(p) for p in region]
        x0 = min(p[0] for p in poly)
        x1 = max(p[0] for p in poly)
        y0 = min(p[1] for p in poly)
        y1 = max(p[1] for p in poly)
    scale = max(1.0, x1 - x0, y1 - y0)
    cutoff = exclusion * scale

    report = SampleReport(samples=0, excluded=0, seed=seed)
    attempts = 0
    budget = 20 * n + 1000
    while report.samples + report.excluded < n and attempts < budget:
        attempts += 1
        x = rng.uniform(x0, x1)
        y = rng.uniform(y0, y1)
        if poly is not None and not _inside_convex(poly, (x, y)):
            continue
        p = (x, y)
        if _near_any_edge(diagram, p, cutoff):
            report.excluded += 1
            continue
        got = locate_owner(diagram, p)
        want, want_d = brute_nearest(p, rays)
        report.samples += 1
        if got is not None and got != want:
            margin = angular_distance(p, rays[got]) - want_d
            report.mismatches.append((p, want, got, margin))
            report.max_margin_violation = max(report.max_margin_violation, margin)
    return report


def _inside_convex(poly: list[Point], p: Point) -> bool:
    n = len(poly)
    for i in range(n):
        a = poly[i]
        b = poly[(i + 1) % n]
        if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) <= 0.0:
            return False
    return True


def _near_any_edge(diagram, p: Point, cutoff: float) -> bool:
    from .diagram import carrier_bbox

    boxes = getattr(diagram, "_edge_boxes", None)
    if boxes is None:
        boxes = [carrier_bbox(e.carrier) for e in diagram.edges]
        diagram._edge_boxes = boxes
    x, y = p
    for e, (bx0, by0, bx1, by1) in zip(diagram.edges, boxes):
        if x < bx0 - cutoff or x > bx1 + cutoff or \
                y < by0 - cutoff or y > by1 + cutoff:
            continue
        if e.carrier.dist_to(p) < cutoff:
            return True
    return False


def brocard_grid_bound(rays: list[Ray], domain, resolution: float) -> float:
    """Grid lower bound on max-min distance over a bounded domain.

    domain is an axis box or a convex polygon vertex list.  Monotone
    nondecreasing under refinement; always at most the true Brocard angle.
    """
    if isinstance(domain, (tuple, list)) and len(domain) == 4 and not isinstance(domain[0], (tuple, list)):
        x0, y0, x1, y1 = domain
        poly = None
    else:
        poly = [tuple(p) for p in domain]
        x0 = min(p[0] for p in poly)
        x1 = max(p[0] for p in poly)
        y0 = min(p[1] for p in poly)
        y1 = max(p[1] for p in poly)
    nx = max(2, int(math.ceil((x1 - x0) / resolution)) + 1)
    ny = max(2, int(math.ceil((y1 - y0) / resolution)) + 1)
    gx = np.linspace(x0, x1, nx)
    gy = np.linspace(y0, y1, ny)
    best = 0.0
    # row blocks keep memory flat for fine grids
    block = max(1, int(4e6 / nx))
    for j0 in range(0, ny, block):
        yy = gy[j0:j0 + block]
        X, Y = np.meshgrid(gx, yy)
        xs = X.ravel()
        ys = Y.ravel()
        if poly is not None:
            mask = np.ones(xs.shape, dtype=bool)
            n = len(poly)
            for i in range(n):
                a = poly[i]
                b = poly[(i + 1) % n]
                mask &= (b[0] - a[0]) * (ys - a[1]) - (b[1] - a[1]) * (xs - a[0]) > 0.0
            xs, ys = xs[mask], ys[mask]
            if xs.size == 0:
                continue
        d = distances_to_all(xs, ys, rays)
        best = max(best, float(d.min(axis=0).max()))
    return best
