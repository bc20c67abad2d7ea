import math
import random

import pytest

from rotoray.diagram import is_tree, locate_owner
from rotoray.errors import InvalidPolygon
from rotoray.geom import angular_distance, rotate, rotate_ray
from rotoray.oracle import brocard_grid_bound, brute_nearest
from rotoray.polygon import (ConvexPolygon, DirTag, build_pvd_collapse,
                             brocard_polygon, dd_nearest, is_brocard_polygon,
                             rays_of_polygon, rotate_rays, split_by_direction)
from rotoray.bisector import bisecting_circle
from conftest import random_convex_polygon, regular_polygon

PI = math.pi


def test_polygon_validation():
    with pytest.raises(InvalidPolygon):
        ConvexPolygon([(0, 0), (1, 0)])
    with pytest.raises(InvalidPolygon):
        ConvexPolygon([(0, 0), (0, 1), (1, 0)])  # clockwise
    with pytest.raises(InvalidPolygon):
        ConvexPolygon([(0, 0), (1, 0), (2, 0), (1, 1)])  # collinear triple
    P = ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert P.has_antiparallel_edges
    assert not ConvexPolygon([(0, 0), (1, 0), (0, 1)]).has_antiparallel_edges


def test_rays_of_polygon():
    P = ConvexPolygon([(0, 0), (1, 0), (0, 1)])
    rays = rays_of_polygon(P)
    assert [r.apex for r in rays] == [(0, 0), (1, 0), (0, 1)]
    assert rays[0].dir == pytest.approx((1, 0))
    assert rays[1].dir == pytest.approx((-math.sqrt(2) / 2, math.sqrt(2) / 2))
    assert rays[2].dir == pytest.approx((0, -1))


def test_split_by_direction_square_and_triangle():
    sq = rays_of_polygon(ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)]))
    classes = split_by_direction(sq)
    assert all(len(classes[t].ids) == 1 for t in DirTag)
    tri = rays_of_polygon(ConvexPolygon([(0, 0), (1, 0), (0, 1)]))
    classes = split_by_direction(tri)
    sizes = {t.value: len(classes[t].ids) for t in DirTag}
    assert sizes == {"E": 1, "N": 0, "W": 1, "S": 1}
    assert sum(sizes.values()) == 3


def test_split_classes_contiguous(rng):
    for _ in range(20):
        P = random_convex_polygon(rng, rng.randint(4, 30))
        rays = rays_of_polygon(P)
        classes = split_by_direction(rays)
        n = P.n
        total = sum(len(classes[t].ids) for t in DirTag)
        assert total == n
        for t in DirTag:
            ids = classes[t].ids
            for a, b in zip(ids, ids[1:]):
                assert (a + 1) % n == b
            # intra-class spread at most a quarter turn
            for a in ids:
                for b in ids:
                    d1 = rays[a].angle - rays[b].angle
                    d1 = abs((d1 + PI) % (2 * PI) - PI)
                    assert d1 <= PI / 2 + 1e-9


def test_rotate_rays():
    from rotoray.geom import make_ray
    r = make_ray((2, 3), (1, 0))
    (rot,) = rotate_rays([r])
    assert rot.apex == (2, 3)
    assert rot.dir == pytest.approx((0, -1))
    twice = rotate_rays(rotate_rays([r]))[0]
    assert twice.dir == pytest.approx((-1, 0))


def test_rotation_preserves_bisecting_circles(rng):
    from conftest import random_rays
    for _ in range(30):
        r, s = random_rays(rng, 2)
        bc1 = bisecting_circle(r, s)
        r2 = rotate_ray(r, -PI / 2)
        s2 = rotate_ray(s, -PI / 2)
        bc2 = bisecting_circle(r2, s2)
        assert bc1.kind == bc2.kind
        if bc1.kind == "circle":
            assert bc1.center[0] == pytest.approx(bc2.center[0], abs=1e-9)
            assert bc1.center[1] == pytest.approx(bc2.center[1], abs=1e-9)
            assert bc1.radius == pytest.approx(bc2.radius, abs=1e-9)


@pytest.mark.parametrize("n,expect", [
    (3, PI / 6), (4, PI / 4), (5, 3 * PI / 10), (6, PI / 3)])
def test_collapse_regular_polygons(n, expect):
    d = build_pvd_collapse(regular_polygon(n))
    assert d.brocard.angle == pytest.approx(expect, abs=1e-9)
    assert d.brocard.point == pytest.approx((0.0, 0.0), abs=1e-9)
    assert is_tree(d)
    # star: n leaves plus the center
    assert len(d.vertices) == n + 1
    assert len(d.circular_edges()) == n


def test_collapse_tree_with_leaves(rng):
    for _ in range(10):
        P = random_convex_polygon(rng, rng.randint(4, 24))
        d = build_pvd_collapse(P)
        assert is_tree(d)
        leaf_pts = {(round(v.x, 7), round(v.y, 7))
                    for v in d.vertices if v.distance == 0.0}
        poly_pts = {(round(p[0], 7), round(p[1], 7)) for p in P.vertices}
        assert poly_pts <= leaf_pts


def test_collapse_oracle_agreement(rng):
    for _ in range(6):
        P = random_convex_polygon(rng, rng.randint(4, 16))
        d = build_pvd_collapse(P)
        xs = [p[0] for p in P.vertices]
        ys = [p[1] for p in P.vertices]
        tested = 0
        for _ in range(400):
            x = (rng.uniform(min(xs), max(xs)), rng.uniform(min(ys), max(ys)))
            if not P.contains(x, tol=1e-5):
                continue
            if any(e.carrier.dist_to(x) < 1e-5 for e in d.edges):
                continue
            tested += 1
            assert locate_owner(d, x) == brute_nearest(x, d.rays)[0]
        assert tested > 30


def test_region_chains_bimonotone(rng):
    # distances along each region boundary rise from both polygon corners
    # to a unique maximum
    for _ in range(8):
        P = random_convex_polygon(rng, rng.randint(4, 20))
        d = build_pvd_collapse(P)
        for site, comps in d.chains.items():
            (comp,) = comps
            seq = []
            for eid, fwd in comp:
                e = d.edges[eid]
                if e.kind != "circular":
                    continue
                v_from = e.v0 if fwd else e.v1
                v_to = e.v1 if fwd else e.v0
                if not seq:
                    seq.append(d.vertices[v_from].distance)
                seq.append(d.vertices[v_to].distance)
            assert seq, f"region {site} has no circular boundary"
            peak = seq.index(max(seq))
            rising = seq[:peak + 1]
            falling = seq[peak:]
            assert all(b >= a - 1e-9 for a, b in zip(rising, rising[1:]))
            assert all(b <= a + 1e-9 for a, b in zip(falling, falling[1:]))


def test_internal_vertices_have_two_inward_edges(rng):
    for _ in range(8):
        P = random_convex_polygon(rng, rng.randint(4, 20))
        d = build_pvd_collapse(P)
        incoming = {v.id: 0 for v in d.vertices}
        degree = {v.id: 0 for v in d.vertices}
        for e in d.edges:
            if e.kind != "circular":
                continue
            da = d.vertices[e.v0].distance
            db = d.vertices[e.v1].distance
            degree[e.v0] += 1
            degree[e.v1] += 1
            if db >= da:
                incoming[e.v1] += 1
            if da >= db:
                incoming[e.v0] += 1
        for v in d.vertices:
            if v.distance > 0 and degree[v.id] >= 2:
                assert incoming[v.id] >= 2


def test_level_set_convex_polygon_rule(rng):
    # points with min distance >= c are exactly the intersection of the
    # c-rotated half-planes, inside P
    P = random_convex_polygon(rng, 12)
    rays = rays_of_polygon(P)
    d = build_pvd_collapse(P)
    omega = d.brocard.angle
    for c in (0.1 * omega, 0.3 * omega, 0.5 * omega):
        rotated = [rotate_ray(r, c) for r in rays]
        for _ in range(400):
            x = (rng.uniform(-5, 5), rng.uniform(-5, 5))
            if not P.contains(x, tol=1e-7):
                continue
            _, md = brute_nearest(x, rays)
            if abs(md - c) < 1e-6:
                continue
            in_bc = all(
                (r.dir[0] * (x[1] - r.apex[1]) - r.dir[1] * (x[0] - r.apex[0]))
                >= 0 for r in rotated)
            assert in_bc == (md >= c)


def test_dd_nearest_coincides_inside(rng):
    for _ in range(5):
        P = random_convex_polygon(rng, rng.randint(4, 10))
        rays = rays_of_polygon(P)
        xs = [p[0] for p in P.vertices]
        ys = [p[1] for p in P.vertices]
        hits = 0
        for _ in range(300):
            x = (rng.uniform(min(xs), max(xs)), rng.uniform(min(ys), max(ys)))
            if not P.contains(x, tol=1e-6):
                continue
            got = dd_nearest(x, rays)
            want, _ = brute_nearest(x, rays)
            if got is None:
                continue  # boundary-tolerance miss
            hits += 1
            assert got == want
        assert hits > 20


def test_dd_void_exists():
    # far outside the polygon, cyclic dominance leaves unowned points
    P = regular_polygon(5)
    rays = rays_of_polygon(P)
    rng = random.Random(3)
    found_void = False
    for _ in range(4000):
        x = (rng.uniform(-30, 30), rng.uniform(-30, 30))
        if dd_nearest(x, rays) is None:
            found_void = True
            break
    assert found_void


def test_dd_apex_inside():
    # an apex strictly inside the clipped region belongs to its own site
    P = regular_polygon(6)
    rays = rays_of_polygon(P)
    for i, r in enumerate(rays):
        probe = (r.apex[0] * 0.99, r.apex[1] * 0.99)
        got = dd_nearest(probe, rays)
        want = brute_nearest(probe, rays)[0]
        assert got in (None, want)


@pytest.mark.parametrize("n", [3, 4, 5, 7, 10])
def test_is_brocard_polygon_regular(n):
    P = regular_polygon(n)
    ok, point, angle = is_brocard_polygon(P)
    assert ok
    assert point == pytest.approx((0.0, 0.0), abs=1e-7)
    assert angle == pytest.approx(PI / 2 - PI / n, abs=1e-9)


def test_is_brocard_polygon_triangle(rng):
    for _ in range(10):
        pts = [(rng.uniform(-3, 3), rng.uniform(-3, 3)) for _ in range(3)]
        area2 = ((pts[1][0] - pts[0][0]) * (pts[2][1] - pts[0][1])
                 - (pts[1][1] - pts[0][1]) * (pts[2][0] - pts[0][0]))
        if abs(area2) < 0.5:
            continue
        if area2 < 0:
            pts.reverse()
        ok, point, angle = is_brocard_polygon(ConvexPolygon(pts))
        assert ok  # every triangle has a Brocard point
        assert 0 < angle < PI / 6 + 1e-9


def test_random_quadrilateral_not_brocard(rng):
    found_false = 0
    for _ in range(20):
        P = random_convex_polygon(rng, 4)
        ok, _, _ = is_brocard_polygon(P)
        if not ok:
            found_false += 1
    assert found_false >= 18  # non-harmonic quadrilaterals dominate


def test_brocard_polygon_entry_point(rng):
    P = random_convex_polygon(rng, 9)
    b1 = brocard_polygon(P, algo="collapse")
    b2 = brocard_polygon(P, algo="splitmerge")
    assert b1.angle == pytest.approx(b2.angle, abs=1e-9)
    g = brocard_grid_bound(rays_of_polygon(P), list(P.vertices), 0.02)
    assert g <= b1.angle + 1e-9
    assert 0 < b1.angle <= PI / 2 - PI / P.n + 1e-9


def test_brocard_bound_regular_equality():
    for n in (3, 5, 8):
        b = brocard_polygon(regular_polygon(n))
        assert b.angle == pytest.approx(PI / 2 - PI / n, abs=1e-12)


def test_antiparallel_edge_interval_witness():
    P = ConvexPolygon([(0, 0), (10, 0), (12, 1), (10, 2), (0, 2), (-2, 1)])
    d = build_pvd_collapse(P)
    assert d.brocard.witness_kind == "edge_interval"
    assert d.brocard.angle == pytest.approx(math.atan2(2, 10), abs=1e-9)
    g = brocard_grid_bound(rays_of_polygon(P), list(P.vertices), 0.01)
    assert abs(g - d.brocard.angle) < 5e-3


def test_three_floodlights_cover(rng):
    # the witness triple's floodlights at the Brocard aperture cover P
    for _ in range(4):
        P = random_convex_polygon(rng, rng.randint(5, 12))
        d = build_pvd_collapse(P)
        b = d.brocard
        triple = [d.rays[s] for s in b.witness_sites]
        for _ in range(800):
            x = (rng.uniform(-5, 5), rng.uniform(-5, 5))
            if not P.contains(x, tol=1e-7):
                continue
            assert min(angular_distance(x, r) for r in triple) <= b.angle + 1e-7
