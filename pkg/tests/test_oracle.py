import math
import random

import pytest

from rotoray.geom import TWO_PI, angular_distance, make_ray
from rotoray.oracle import (XorShift, brocard_grid_bound, brute_nearest,
                            nearest_with_ties, sample_compare)
from rotoray.plane import build_plane_diagram
from conftest import random_rays, regular_polygon


def test_brute_nearest_apex_and_fan():
    rays = [make_ray((0, 0), (1, 0)), make_ray((3, 1), (0, 1)),
            make_ray((-2, 2), (1, 1))]
    site, d = brute_nearest((0, 0), rays)
    assert site == 0 and d == 0.0
    # slightly ccw of ray 1
    site, d = brute_nearest((2.999, 2.0), rays)
    assert site == 1 and d < 0.1


def test_brute_nearest_tie_smallest_id():
    # half-turn symmetric pair: the origin is exactly tied
    rays = [make_ray((1, 0), (0, 1)), make_ray((-1, 0), (0, -1))]
    ties = nearest_with_ties((0.0, 0.0), rays)
    assert ties == [0, 1]
    site, _ = brute_nearest((0.0, 0.0), rays)
    assert site == 0  # smallest id wins the tie


def test_xorshift_deterministic():
    a = XorShift(42)
    b = XorShift(42)
    seq_a = [a.uniform() for _ in range(32)]
    seq_b = [b.uniform() for _ in range(32)]
    assert seq_a == seq_b
    assert all(0.0 <= v < 1.0 for v in seq_a)
    assert XorShift(43).uniform() != seq_a[0]


def test_sample_compare_zero_count():
    rays = [make_ray((0, 0), (1, 0))]
    d = build_plane_diagram(rays)
    rep = sample_compare(d, rays, (-2.0, -2.0, 2.0, 2.0), 0, seed=9)
    assert rep.samples == 0 and rep.ok


def test_sample_compare_clean_diagram(rng):
    rays = random_rays(rng, 6)
    d = build_plane_diagram(rays)
    rep = sample_compare(d, rays, (-20.0, -20.0, 20.0, 20.0), 2000, seed=5)
    assert rep.ok, rep.mismatches[:2]
    assert rep.samples > 1500


def test_sample_compare_detects_corruption(rng):
    rays = random_rays(rng, 5)
    d = build_plane_diagram(rays)
    # corrupt one face owner
    for f in d.faces:
        if f.site is not None:
            f.site = (f.site + 1) % len(rays)
            break
    rep = sample_compare(d, rays, (-20.0, -20.0, 20.0, 20.0), 2000, seed=5)
    assert not rep.ok


@pytest.mark.parametrize("n,expect", [(3, math.pi / 6), (4, math.pi / 4)])
def test_grid_bound_regular(n, expect):
    from rotoray.polygon import rays_of_polygon
    P = regular_polygon(n)
    g = brocard_grid_bound(rays_of_polygon(P), list(P.vertices), 1e-3)
    assert g <= expect + 1e-12
    assert abs(g - expect) < 5e-3


def test_grid_bound_monotone_refinement(rng):
    from rotoray.polygon import rays_of_polygon
    P = regular_polygon(5)
    rays = rays_of_polygon(P)
    g1 = brocard_grid_bound(rays, list(P.vertices), 0.05)
    g2 = brocard_grid_bound(rays, list(P.vertices), 0.01)
    assert g2 >= g1 - 1e-12
