import math
import random

import pytest

from rotoray.geom import Ray, make_ray, ray_from_angle


def random_ray(rng: random.Random, span: float = 10.0) -> Ray:
    return ray_from_angle((rng.uniform(-span, span), rng.uniform(-span, span)),
                          rng.uniform(0.0, 2.0 * math.pi))


def random_rays(rng: random.Random, n: int, span: float = 10.0) -> list[Ray]:
    """General-position rays: distinct apices, pairwise non-parallel."""
    rays: list[Ray] = []
    while len(rays) < n:
        r = random_ray(rng, span)
        ok = True
        for s in rays:
            if math.hypot(r.apex[0] - s.apex[0], r.apex[1] - s.apex[1]) < 1e-3:
                ok = False
                break
            crossp = abs(r.dir[0] * s.dir[1] - r.dir[1] * s.dir[0])
            if crossp < 1e-3:
                ok = False
                break
        if ok:
            rays.append(r)
    return rays


def random_convex_polygon(rng: random.Random, n: int, radius: float = 5.0):
    """Strictly convex ccw n-gon: jittered direction grid, closure by a
    least-norm length correction (rejection-free in practice)."""
    import numpy as np

    from rotoray.polygon import ConvexPolygon

    for _ in range(64):
        thetas = [2.0 * math.pi * (i + 0.2 + 0.6 * rng.random()) / n
                  for i in range(n)]
        c = np.array([math.cos(t) for t in thetas])
        s = np.array([math.sin(t) for t in thetas])
        L0 = np.array([rng.uniform(0.6, 2.0) for _ in range(n)])
        A = np.vstack([c, s])
        dL = -A.T @ np.linalg.solve(A @ A.T, A @ L0)
        L = L0 + dL
        if (L < 0.05).any():
            continue
        # keep edge pairs clear of exact (anti)parallelism
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                if abs(math.remainder(thetas[i] - thetas[j], math.pi)) < 1e-6:
                    ok = False
        if not ok:
            continue
        pts = [(0.0, 0.0)]
        for k in range(n - 1):
            pts.append((pts[-1][0] + L[k] * c[k], pts[-1][1] + L[k] * s[k]))
        span = max(max(abs(p[0]) for p in pts), max(abs(p[1]) for p in pts), 1.0)
        k = radius / span
        pts = [(p[0] * k, p[1] * k) for p in pts]
        try:
            return ConvexPolygon(pts)
        except Exception:
            continue
    raise RuntimeError(f"polygon generation failed for n={n}")


def regular_polygon(n: int, radius: float = 1.0):
    from rotoray.polygon import ConvexPolygon

    pts = [(radius * math.cos(2.0 * math.pi * k / n),
            radius * math.sin(2.0 * math.pi * k / n)) for k in range(n)]
    return ConvexPolygon(pts)


@pytest.fixture
def rng():
    return random.Random(20240811)
