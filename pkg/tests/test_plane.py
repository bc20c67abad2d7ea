import math
import random
from collections import Counter

import pytest

from rotoray.diagram import connected_components, locate_owner
from rotoray.errors import DegenerateInput
from rotoray.geom import TWO_PI, make_ray, ray_from_angle
from rotoray.oracle import brocard_grid_bound, brute_nearest, sample_compare
from rotoray.plane import (brocard_plane, build_plane_diagram,
                           generate_adversarial, rays_pairwise_noncrossing)
from conftest import random_rays

PI = math.pi


def fan_rays(n, seed=42, delta=0.01):
    """Evenly spread directions, apices pulled back along their own rays."""
    rng = random.Random(seed)
    rays = []
    for k in range(n):
        th = TWO_PI * k / n
        jx, jy = rng.uniform(-1e-5, 1e-5), rng.uniform(-1e-5, 1e-5)
        rays.append(ray_from_angle((-delta * math.cos(th) + jx,
                                    -delta * math.sin(th) + jy), th))
    return rays


def test_single_ray_diagram():
    d = build_plane_diagram([make_ray((0, 0), (1, 0))])
    assert len(d.circular_edges()) == 0
    assert len(d.edges) == 1 and d.edges[0].kind == "ray"
    assert len(d.vertices) == 1


def test_duplicate_apices_rejected():
    with pytest.raises(DegenerateInput):
        build_plane_diagram([make_ray((0, 0), (1, 0)), make_ray((0, 0), (0, 1))])


def test_strict_mode_rejects_parallels():
    rays = [make_ray((0, 0), (1, 0)), make_ray((1, 3), (1, 0))]
    with pytest.raises(DegenerateInput):
        build_plane_diagram(rays, strict=True)
    build_plane_diagram(rays)  # permissive mode handles line carriers


def test_triple_counts_paper_figure():
    # seed 58 reproduces the figure counts: 1 proper, 5 mixed, 3 intersection
    rng = random.Random(58)
    rays = random_rays(rng, 3, span=5.0)
    d = build_plane_diagram(rays)
    c = Counter(v.kind for v in d.vertices)
    assert (c.get("proper", 0), c.get("mixed", 0), c.get("intersection", 0)) == (1, 5, 3)


@pytest.mark.parametrize("seed", range(0, 60))
def test_triple_count_lemma(seed):
    rng = random.Random(seed)
    rays = random_rays(rng, 3, span=5.0)
    d = build_plane_diagram(rays)
    c = Counter(v.kind for v in d.vertices)
    assert c.get("proper", 0) <= 1
    assert c.get("intersection", 0) <= 3
    assert c.get("mixed", 0) <= 6


@pytest.mark.parametrize("n,seed", [(2, 0), (4, 1), (6, 2), (8, 3)])
def test_connected_and_unbounded_faces(n, seed):
    rng = random.Random(seed)
    rays = random_rays(rng, n)
    d = build_plane_diagram(rays)
    assert connected_components(d) == 1
    unbounded = [f for f in d.faces if not f.bounded and f.site is not None]
    assert len(unbounded) == n
    owners = {f.site for f in unbounded}
    assert owners == set(range(n))


@pytest.mark.parametrize("n,seed", [(3, 7), (5, 8), (8, 9)])
def test_oracle_agreement(n, seed):
    rng = random.Random(seed)
    rays = random_rays(rng, n)
    d = build_plane_diagram(rays)
    rep = sample_compare(d, rays, (-20.0, -20.0, 20.0, 20.0), 1000, seed=seed)
    assert rep.ok, rep.mismatches[:3]


@pytest.mark.parametrize("n,seed", [(2, 3), (4, 5), (7, 6)])
def test_brocard_plane_range(n, seed):
    rng = random.Random(seed)
    rays = random_rays(rng, n)
    b = brocard_plane(rays)
    assert TWO_PI / n - 1e-9 <= b.angle <= TWO_PI + 1e-9


def test_brocard_single_ray():
    b = brocard_plane([make_ray((0, 0), (1, 0))])
    assert b.angle == pytest.approx(TWO_PI)
    assert b.witness_kind == "at_infinity"
    assert not b.attained


def test_brocard_even_fan():
    b = brocard_plane(fan_rays(8))
    assert b.angle == pytest.approx(PI / 4, abs=1e-9)


def test_brocard_parallel_family():
    rays = [make_ray((i, 0.001 * i), (1, 0)) for i in range(4)]
    b = brocard_plane(rays)
    assert b.angle == pytest.approx(TWO_PI, abs=1e-6)
    assert not b.attained


def test_brocard_grid_bound_is_lower_bound():
    rng = random.Random(17)
    rays = random_rays(rng, 4)
    b = brocard_plane(rays)
    g = brocard_grid_bound(rays, (-12.0, -12.0, 12.0, 12.0), 0.05)
    assert g <= b.angle + 1e-9


def test_grid_adversarial_faces():
    rays = generate_adversarial("grid", 5)
    assert len(rays) == 11
    d = build_plane_diagram(rays)
    t = len(rays) - 1
    in_grid = 0
    for f in d.faces:
        if f.site != t or not f.bounded:
            continue
        p = _interior_point(f)
        if p is not None and 1.0 <= p[0] <= 5.0 and 1.0 <= p[1] <= 5.0:
            in_grid += 1
    assert in_grid == 16  # (m-1)^2 faces, one per grid square


def test_grid_small():
    rays = generate_adversarial("grid", 2)
    assert len(rays) == 5
    d = build_plane_diagram(rays)
    t = len(rays) - 1
    in_grid = 0
    for f in d.faces:
        if f.site == t and f.bounded:
            p = _interior_point(f)
            if p is not None and 1.0 <= p[0] <= 2.0 and 1.0 <= p[1] <= 2.0:
                in_grid += 1
    assert in_grid == 1


def test_nonintersecting_adversarial():
    rays = generate_adversarial("nonintersecting", 5)
    assert len(rays) == 10
    assert rays_pairwise_noncrossing(rays)
    d = build_plane_diagram(rays)
    counts = Counter()
    for f in d.faces:
        if f.bounded:
            counts[f.site] += 1
    # the m-1 leftmost tilted rays weave a face into every vertical gap
    for i in range(4):
        assert counts[i] >= 3  # >= m/2


def _interior_point(face):
    from rotoray.diagram import point_in_loop
    from rotoray.geom import perp
    for car in face.loop:
        if hasattr(car, "subarc") and not hasattr(car, "t0"):
            m = car.point_at(0.5)
            tg = car.tangent_at(0.5)
        else:
            span = (car.t1 - car.t0) if not math.isinf(car.t1) else 1.0
            m = car.point_at(car.t0 + 0.5 * span)
            tg = (car.dx, car.dy)
        n = perp(tg)
        for s in (1e-4, -1e-4, 1e-6, -1e-6):
            p = (m[0] + s * n[0], m[1] + s * n[1])
            if point_in_loop(face.loop, p, 1e-12):
                return p
    return None
