"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.
"""

import json
import math
import random
import subprocess
import sys
import time
from collections import Counter

import numpy as np
import pytest

from rotoray.diagram import diagram_isomorphic, is_tree, locate_owner
from rotoray.envelope import (INSIDE, OUTSIDE, CurveDomain, lower_envelope,
                              partial_functions)
from rotoray.geom import TWO_PI, angular_distance, make_ray, ray_from_angle
from rotoray.merge import build_pvd_splitmerge
from rotoray.oracle import (brocard_grid_bound, brute_nearest,
                            distances_to_all, sample_compare)
from rotoray.plane import (brocard_plane, build_plane_diagram,
                           generate_adversarial, rays_pairwise_noncrossing)
from rotoray.polygon import (ConvexPolygon, build_pvd_collapse,
                             is_brocard_polygon, rays_of_polygon)
from conftest import random_convex_polygon, random_rays, regular_polygon

PI = math.pi


def report(num, text, elapsed, budget):
    print(f"\nACCEPTANCE {num}: PASS ({elapsed:.2f}s < {budget}s) {text}")
    assert elapsed < budget, f"criterion {num} exceeded its runtime budget"


def test_criterion_1_regular_polygon_brocard_exactness():
    t0 = time.perf_counter()
    for n in (3, 4, 5, 6, 12, 100):
        expect = PI / 2 - PI / n
        dc = build_pvd_collapse(regular_polygon(n))
        ds = build_pvd_splitmerge(regular_polygon(n))
        assert abs(dc.brocard.angle - expect) <= 1e-9, f"collapse n={n}"
        assert abs(ds.brocard.angle - expect) <= 1e-9, f"splitmerge n={n}"
    report(1, "regular n-gons give pi/2 - pi/n on both pipelines (1e-9)",
           time.perf_counter() - t0, 1.0)


def test_criterion_2_cross_pipeline_equivalence():
    t0 = time.perf_counter()
    rng = random.Random(20260809)
    for trial in range(200):
        P = random_convex_polygon(rng, rng.randint(4, 64))
        dc = build_pvd_collapse(P)
        ds = build_pvd_splitmerge(P)
        assert diagram_isomorphic(dc, ds, tol=1e-7), f"trial {trial} n={P.n}"
        assert abs(dc.brocard.angle - ds.brocard.angle) <= 1e-9
        assert dc.brocard.witness_kind == ds.brocard.witness_kind
        assert max(abs(dc.brocard.point[0] - ds.brocard.point[0]),
                   abs(dc.brocard.point[1] - ds.brocard.point[1])) <= 1e-7
        assert sorted(dc.brocard.witness_sites) == sorted(ds.brocard.witness_sites)
    report(2, "200 random polygons (n in [4,64]): pipelines isomorphic, "
           "identical witnesses", time.perf_counter() - t0, 30.0)


def _oracle_corpus():
    rng = random.Random(7)
    fan = [ray_from_angle((-0.01 * math.cos(TWO_PI * k / 8) + rng.uniform(-1e-5, 1e-5),
                           -0.01 * math.sin(TWO_PI * k / 8) + rng.uniform(-1e-5, 1e-5)),
                          TWO_PI * k / 8) for k in range(8)]
    plane_instances = [
        ("grid m=5", generate_adversarial("grid", 5), (-4.0, -4.0, 8.0, 8.0)),
        ("noninter m=5", generate_adversarial("nonintersecting", 5),
         (-2.0, -6.0, 13.0, 7.0)),
        ("fan n=8", fan, (-1.0, -1.0, 1.0, 1.0)),
        ("random n=6", random_rays(rng, 6), (-20.0, -20.0, 20.0, 20.0)),
        ("random n=9", random_rays(rng, 9), (-20.0, -20.0, 20.0, 20.0)),
    ]
    polys = [("regular 6", regular_polygon(6)), ("regular 12", regular_polygon(12))]
    for k in range(3):
        P = random_convex_polygon(rng, rng.randint(6, 24))
        polys.append((f"random n={P.n}", P))
    return plane_instances, polys


def test_criterion_3_oracle_agreement():
    t0 = time.perf_counter()
    plane_instances, polys = _oracle_corpus()
    for label, rays, box in plane_instances:
        d = build_plane_diagram(rays)
        rep = sample_compare(d, rays, box, 10000, seed=11)
        assert rep.ok, f"plane {label}: {rep.mismatches[:3]}"
    for label, P in polys:
        for build in (build_pvd_collapse, build_pvd_splitmerge):
            d = build(P)
            rep = sample_compare(d, d.rays, list(P.vertices), 10000, seed=13)
            assert rep.ok, f"polygon {label} {build.__name__}: {rep.mismatches[:3]}"
    report(3, "10^4 seeded samples per corpus diagram, 0 owner mismatches",
           time.perf_counter() - t0, 60.0)


def test_criterion_4_adversarial_counts():
    t0 = time.perf_counter()
    grid = generate_adversarial("grid", 5)
    assert len(grid) == 11
    d = build_plane_diagram(grid)
    t_site = len(grid) - 1
    in_grid = 0
    for f in d.faces:
        if f.site == t_site and f.bounded:
            p = _face_interior_point(f)
            if p is not None and 1.0 <= p[0] <= 5.0 and 1.0 <= p[1] <= 5.0:
                in_grid += 1
    assert in_grid == 16, f"expected one t-face per grid square, got {in_grid}"

    weave = generate_adversarial("nonintersecting", 5)
    assert len(weave) == 10
    assert rays_pairwise_noncrossing(weave)
    dw = build_plane_diagram(weave)
    counts = Counter(f.site for f in dw.faces if f.bounded)
    for i in range(4):  # the m-1 leftmost tilted rays are certified
        assert counts[i] >= 2.5, f"ray {i} has too few bounded faces"
    report(4, "grid m=5: 16 in-grid t-faces; weave m=5: non-crossing, "
           ">= m/2 faces per certified ray", time.perf_counter() - t0, 5.0)


def test_criterion_5_triple_diagram_lemma():
    t0 = time.perf_counter()
    achieved_figure = False
    for seed in range(500):
        rng = random.Random(seed)
        rays = random_rays(rng, 3, span=5.0)
        d = build_plane_diagram(rays)
        c = Counter(v.kind for v in d.vertices)
        trip = (c.get("proper", 0), c.get("mixed", 0), c.get("intersection", 0))
        assert trip[0] <= 1 and trip[1] <= 6 and trip[2] <= 3, f"seed {seed}: {trip}"
        if trip == (1, 5, 3):
            achieved_figure = True
    assert achieved_figure, "no instance reached 1 proper / 5 mixed / 3 intersection"
    report(5, "500 3-ray instances within 1/6/3 vertex bounds; figure "
           "counts 1/5/3 achieved", time.perf_counter() - t0, 10.0)


def test_criterion_6_plane_brocard_bounds():
    t0 = time.perf_counter()
    rng = random.Random(42)
    fan = [ray_from_angle((-0.01 * math.cos(TWO_PI * k / 8) + rng.uniform(-1e-5, 1e-5),
                           -0.01 * math.sin(TWO_PI * k / 8) + rng.uniform(-1e-5, 1e-5)),
                          TWO_PI * k / 8) for k in range(8)]
    b = brocard_plane(fan)
    assert abs(b.angle - PI / 4) <= 1e-9

    family = [make_ray((i, 0.001 * i), (1, 0)) for i in range(4)]
    b2 = brocard_plane(family)
    assert abs(b2.angle - TWO_PI) <= 1e-6
    assert not b2.attained
    report(6, "even fan n=8 gives pi/4; near-collinear parallel family "
           "gives 2*pi unattained", time.perf_counter() - t0, 1.0)


def test_criterion_7_polygon_structural_suite():
    t0 = time.perf_counter()
    rng = random.Random(97)
    corpus = [regular_polygon(n) for n in (3, 5, 8, 12)]
    corpus += [random_convex_polygon(rng, rng.randint(4, 32)) for _ in range(12)]
    for P in corpus:
        d = build_pvd_collapse(P)
        assert is_tree(d)
        _assert_bimonotone_chains(d)
        _assert_two_inward_edges(d)
    report(7, "every PVD is a tree with bimonotone region boundaries and "
           ">=2 inward-increasing edges per internal vertex",
           time.perf_counter() - t0, 10.0)


def test_criterion_8_envelope_suite():
    t0 = time.perf_counter()
    rng = random.Random(15)
    dom = CurveDomain.line_from_coeffs(0.0, 1.0, 0.0)
    rays = random_rays(rng, 100)
    fs = partial_functions(rays, dom)
    env = lower_envelope(fs, dom, rays)
    xs = np.empty(1000)
    for k in range(1000):
        xs[k] = rng.uniform(-50, 50)
    d = distances_to_all(xs, np.zeros(1000), rays)
    order = np.argsort(d, axis=0)
    for k in range(1000):
        first, second = order[0, k], order[1, k]
        if d[second, k] - d[first, k] < 1e-6:
            continue
        assert env.owner(float(xs[k])) == first

    circ = CurveDomain.circle((0.0, 0.0), 5.0)
    outs = []
    while len(outs) < 8:
        r = random_rays(rng, 1, span=16.0)[0]
        if math.hypot(*r.apex) > 6.5:
            outs.append(r)
    fs2 = partial_functions(outs, circ, OUTSIDE)
    env2 = lower_envelope(fs2, circ, outs)
    from rotoray.carriers import Seg
    for p in env2.pieces:
        if p.site is None:
            continue
        mid = circ.point_at(0.5 * (p.t0 + p.t1))
        apex = outs[p.site].apex
        assert Seg(apex[0], apex[1], mid[0], mid[1]).dist_to((0, 0)) >= 5.0 - 1e-9
    report(8, "line envelope (n=100) matches brute force at 10^3 params; "
           "outside-curve piece midpoints pass the visibility test",
           time.perf_counter() - t0, 10.0)


def test_criterion_9_brocard_polygon_decision():
    t0 = time.perf_counter()
    for n in (3, 4, 5, 6, 9):
        ok, point, angle = is_brocard_polygon(regular_polygon(n))
        assert ok and max(abs(point[0]), abs(point[1])) < 1e-7
        assert abs(angle - (PI / 2 - PI / n)) < 1e-9
    rng = random.Random(2024)
    rejected = 0
    for _ in range(100):
        P = _perturbed_quadrilateral(rng)
        ok, _, _ = is_brocard_polygon(P)
        if ok:
            continue
        rejected += 1
        assert _grid_confirms_no_equal_point(P), "grid oracle found an equal point"
    assert rejected == 100, f"only {rejected}/100 quadrilaterals rejected"
    report(9, "regular n-gons are Brocard polygons (center); 100 perturbed "
           "quadrilaterals rejected and grid-confirmed",
           time.perf_counter() - t0, 10.0)


def test_criterion_10_determinism():
    t0 = time.perf_counter()
    outs = []
    for _ in range(2):
        gen = subprocess.run(
            [sys.executable, "-m", "rotoray.cli", "gen", "--kind",
             "nonintersecting", "--m", "4", "--seed", "3"],
            capture_output=True, text=True, timeout=300)
        assert gen.returncode == 0
        plane = subprocess.run(
            [sys.executable, "-m", "rotoray.cli", "plane", "--brocard"],
            input=gen.stdout, capture_output=True, text=True, timeout=300)
        assert plane.returncode == 0
        outs.append(plane.stdout)
    assert outs[0] == outs[1]

    outs2 = []
    for _ in range(2):
        gen = subprocess.run(
            [sys.executable, "-m", "rotoray.cli", "gen", "--kind",
             "regular-ngon", "--m", "7"],
            capture_output=True, text=True, timeout=300)
        poly = subprocess.run(
            [sys.executable, "-m", "rotoray.cli", "polygon", "--algo", "both",
             "--brocard"],
            input=gen.stdout, capture_output=True, text=True, timeout=300)
        assert poly.returncode == 0
        outs2.append(poly.stdout)
    assert outs2[0] == outs2[1]
    report(10, "fixed seeds give byte-identical DiagramFiles",
           time.perf_counter() - t0, 30.0)


# -- helpers -------------------------------------------------------------------

def _face_interior_point(face):
    from rotoray.diagram import point_in_loop
    from rotoray.geom import perp
    for car in face.loop:
        if hasattr(car, "t0"):
            span = (car.t1 - car.t0) if not math.isinf(car.t1) else 1.0
            m = car.point_at(car.t0 + 0.5 * span)
            tg = (car.dx, car.dy)
        else:
            m = car.point_at(0.5)
            tg = car.tangent_at(0.5)
        n = perp(tg)
        for s in (1e-4, -1e-4, 1e-6, -1e-6):
            p = (m[0] + s * n[0], m[1] + s * n[1])
            if point_in_loop(face.loop, p, 1e-12):
                return p
    return None


def _assert_bimonotone_chains(d):
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
        assert seq
        peak = seq.index(max(seq))
        rising = seq[:peak + 1]
        falling = seq[peak:]
        assert all(b >= a - 1e-9 for a, b in zip(rising, rising[1:]))
        assert all(b <= a + 1e-9 for a, b in zip(falling, falling[1:]))


def _assert_two_inward_edges(d):
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


def _perturbed_quadrilateral(rng) -> ConvexPolygon:
    while True:
        base = regular_polygon(4).vertices
        pts = [(p[0] + rng.uniform(-0.25, 0.25), p[1] + rng.uniform(-0.25, 0.25))
               for p in base]
        try:
            return ConvexPolygon(pts)
        except Exception:
            continue


def _grid_confirms_no_equal_point(P: ConvexPolygon, resolution=0.02) -> bool:
    rays = rays_of_polygon(P)
    xs0 = min(p[0] for p in P.vertices)
    xs1 = max(p[0] for p in P.vertices)
    ys0 = min(p[1] for p in P.vertices)
    ys1 = max(p[1] for p in P.vertices)
    nx = int((xs1 - xs0) / resolution) + 2
    ny = int((ys1 - ys0) / resolution) + 2
    gx = np.linspace(xs0, xs1, nx)
    gy = np.linspace(ys0, ys1, ny)
    X, Y = np.meshgrid(gx, gy)
    xs, ys = X.ravel(), Y.ravel()
    mask = np.ones(xs.shape, dtype=bool)
    n = P.n
    for i in range(n):
        a = P.vertices[i]
        b = P.vertices[(i + 1) % n]
        mask &= (b[0] - a[0]) * (ys - a[1]) - (b[1] - a[1]) * (xs - a[0]) > 0
    xs, ys = xs[mask], ys[mask]
    if xs.size == 0:
        return True
    d = distances_to_all(xs, ys, rays)
    spread = d.max(axis=0) - d.min(axis=0)
    return float(spread.min()) > 1e-3
