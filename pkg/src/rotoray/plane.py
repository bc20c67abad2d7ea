"""Full-plane diagram builder, plane Brocard solver, adversarial generators.

The builder enumerates candidate vertices directly (per pair: ray crossings
and apex terminations; per pair plus ray: arc/ray crossings; per triple: the
second intersection of two bisecting-circle carriers) and validates each
against a global nearest-site scan.  Edges are the sub-pieces of bisector
carriers between consecutive validated vertices whose midpoints pass the
two-owner test.  Cubic-ish work, meant for desk-scale inputs, checked
pointwise against the brute-force oracle.
"""

from __future__ import annotations

import math

import numpy as np

from . import geom
from .bisector import PairClass, bisector, classify_pair
from .carriers import Arc, Carrier, RaySeg, Seg, intersect
from .diagram import (V_APEX, V_INTERSECTION, V_MIXED, V_PROPER, BrocardResult,
                      Diagram, Edge, VertexPool, build_faces)
from .errors import DegenerateInput, NearCollinear, SearchFailed
from .geom import (TWO_PI, Point, Ray, angular_distance, cross, dist, dot,
                   make_ray, perp, point_on_ray, sub)
from .oracle import XorShift, brute_nearest, distances_to_all
from .refine import angle_slack, refine_equidistant3, refine_on_ray_tie

_EQ_TOL = 1e-7        # angle tolerance for equidistance validation
_TIE_TOL = 1e-9       # four-site co-circularity detection
_PROBE = 1e-6         # physical probe offset, times input scale


def _pair_pieces(r: Ray, s: Ray) -> list[Carrier]:
    """Connecting piece(s) of the bisector, normalized to a carrier list."""
    try:
        b = bisector(r, s)
    except NearCollinear:
        # treat as parallel-like: carrier is the line through the apices
        u = geom.unit(sub(s.apex, r.apex))
        if dot(r.dir, s.dir) >= 0.0:
            return [RaySeg(r.apex[0], r.apex[1], -u[0], -u[1], 0.0, math.inf),
                    RaySeg(s.apex[0], s.apex[1], u[0], u[1], 0.0, math.inf)]
        return [Seg(r.apex[0], r.apex[1], s.apex[0], s.apex[1])]
    arc = b.arc
    if arc is None:
        return []
    if isinstance(arc, tuple):
        return list(arc)
    return [arc]


def _limit_distance(p: Point, rays: list[Ray], tol: float) -> float:
    """sup-limit of the min-distance at p: rays through p contribute 2*pi."""
    best = TWO_PI
    for r in rays:
        if point_on_ray(p, r, tol):
            continue
        d = angular_distance(p, r)
        if d < best:
            best = d
    return best


def build_plane_diagram(rays: list[Ray], strict: bool = False,
                        perturb_seed: int | None = None) -> Diagram:
    """Construct the nearest-site diagram of a set of rays in the plane.

    strict=True rejects parallel/antiparallel pairs up front (the structural
    lemmas assume none); by default such pairs are handled with line
    carriers, which the quadratic-complexity constructions need.  A seeded
    apex perturbation of 1e-9 * scale can be requested instead of rejection
    for co-circular degeneracies.
    """
    n = len(rays)
    if n < 1:
        raise DegenerateInput("need at least one ray")
    scale = geom.input_scale([r.apex for r in rays])
    tol_len = 1e-9 * scale

    if perturb_seed is not None:
        rng = XorShift(perturb_seed)
        rays = [make_ray((r.apex[0] + rng.uniform(-tol_len, tol_len),
                          r.apex[1] + rng.uniform(-tol_len, tol_len)), r.dir)
                for r in rays]

    for i in range(n):
        for j in range(i + 1, n):
            if dist(rays[i].apex, rays[j].apex) <= tol_len:
                raise DegenerateInput(f"duplicate apices for sites {i} and {j}")
            if strict and abs(cross(rays[i].dir, rays[j].dir)) <= geom.EPS_ANGLE:
                raise DegenerateInput(
                    f"parallel pair ({i},{j}) violates the general-position assumption")

    diagram = Diagram(rays=list(rays), site_ids=list(range(n)), vertices=[],
                      edges=[], scale=scale)
    pool = VertexPool(tol_len)
    probe_step = _PROBE * scale

    def dists(p: Point) -> list[float]:
        return [angular_distance(p, r) for r in rays]

    pieces: dict[tuple[int, int], list[Carrier]] = {}
    for i in range(n):
        for j in range(i + 1, n):
            pieces[(i, j)] = _pair_pieces(rays[i], rays[j])

    # events: per (pair, piece index) -> list of (param, vertex id)
    hits: dict[tuple[int, int, int], list[tuple[float, int]]] = {}
    ray_hits: dict[int, list[tuple[float, int]]] = {k: [] for k in range(n)}

    def register(pair: tuple[int, int], p: Point, vid: int) -> None:
        for pidx, car in enumerate(pieces[pair]):
            u = car.param_of(p, tol=10 * tol_len)
            if u is not None:
                hits.setdefault((pair[0], pair[1], pidx), []).append((u, vid))
                return
        diagram.diagnostics.append(
            f"vertex {vid} expected on bisector {pair} but not on its arc")

    # apex vertices
    for k in range(n):
        others = [(angular_distance(rays[k].apex, rays[j]), j)
                  for j in range(n) if j != k]
        if others:
            dmin, s_star = min(others)
            near = [j for d, j in others if d - dmin <= _TIE_TOL]
            if len(near) > 1:
                diagram.diagnostics.append(
                    f"apex {k}: tied nearest sites {near}")
            vid = pool.add(rays[k].apex, V_APEX, (k, s_star), dmin)
        else:
            vid = pool.add(rays[k].apex, V_APEX, (k,), TWO_PI)
        ray_hits[k].append((0.0, vid))

    # intersection vertices (ray on ray crossings)
    for i in range(n):
        for j in range(i + 1, n):
            ri, rj = rays[i], rays[j]
            den = cross(ri.dir, rj.dir)
            if abs(den) <= geom.EPS_ANGLE:
                continue
            w = sub(rj.apex, ri.apex)
            ti = cross(w, rj.dir) / den
            tj = cross(w, ri.dir) / den
            if ti <= tol_len or tj <= tol_len:
                continue
            p = ri.point_at(ti)
            vid = pool.add(p, V_INTERSECTION, (i, j), 0.0)
            ray_hits[i].append((ti, vid))
            ray_hits[j].append((tj, vid))
            register((i, j), p, vid)

    # proper vertices: carriers of (i,j) meet carriers of (i,k).  Roots within
    # the conditioning radius of a triple apex are the (degraded) shared-apex
    # intersection, never a proper vertex; drop them, Newton-polish the rest
    # onto the exact three-way tie, then validate with gradient-aware slacks.
    excl = 1e-6 * scale
    newton_cap = 1e-3 * scale
    cand_pts: list[Point] = []
    cand_triples: list[tuple[int, int, int]] = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                apexes = (rays[i].apex, rays[j].apex, rays[k].apex)
                # all three bisector pairings: near-tangent huge circles can
                # lose roots, but at least one pairing stays well conditioned
                pairings = (((i, j), (i, k)), ((i, j), (j, k)), ((i, k), (j, k)))
                for qa, qb in pairings:
                    for pa in pieces[qa]:
                        for pb in pieces[qb]:
                            for _, _, p in intersect(pa, pb, tol=tol_len):
                                if any(dist(p, a) < excl for a in apexes):
                                    continue
                                p = refine_equidistant3(p, rays[i], rays[j],
                                                        rays[k], max_step=newton_cap)
                                if any(dist(p, a) < excl for a in apexes):
                                    continue
                                cand_pts.append(p)
                                cand_triples.append((i, j, k))
    if cand_pts:
        xs = np.array([p[0] for p in cand_pts])
        ys = np.array([p[1] for p in cand_pts])
        dmat = distances_to_all(xs, ys, rays)
        for idx, (i, j, k) in enumerate(cand_triples):
            p = cand_pts[idx]
            col = dmat[:, idx]
            di, dj, dk = col[i], col[j], col[k]
            eq_ij = _EQ_TOL + angle_slack(p, rays, (i, j), tol_len)
            eq_ik = _EQ_TOL + angle_slack(p, rays, (i, k), tol_len)
            if abs(di - dj) > eq_ij or abs(di - dk) > eq_ik:
                continue
            admissible = True
            tied = []
            for m in range(n):
                if m in (i, j, k):
                    continue
                sl = _EQ_TOL + angle_slack(p, rays, (m, i), tol_len)
                if col[m] < di - sl:
                    admissible = False
                    break
                tie_sl = _TIE_TOL + angle_slack(p, rays, (m, i), 1e-12 * scale)
                if abs(col[m] - di) <= tie_sl:
                    tied.append(m)
            if not admissible:
                continue
            if tied:
                raise DegenerateInput(
                    "a point is equidistant to four rays "
                    f"(triple {(i, j, k)} plus {tied})")
            vid = pool.add(p, V_PROPER, (i, j, k), float(di))
            register((i, j), p, vid)
            register((i, k), p, vid)
            register((j, k), p, vid)

    # mixed vertices: pair carrier crossed by a third ray
    for i in range(n):
        for j in range(i + 1, n):
            for pidx, car in enumerate(pieces[(i, j)]):
                for k in range(n):
                    if k in (i, j):
                        continue
                    rk = rays[k]
                    ray_car = RaySeg(rk.apex[0], rk.apex[1], rk.dir[0], rk.dir[1],
                                     0.0, math.inf)
                    for u_car, t_ray, p in intersect(car, ray_car, tol=tol_len):
                        if t_ray <= tol_len:
                            continue
                        if dist(p, rays[i].apex) <= excl or \
                           dist(p, rays[j].apex) <= excl:
                            continue
                        p = refine_on_ray_tie(p, rays[i], rays[j], rk,
                                              max_step=newton_cap)
                        u_ref = car.param_of(p, tol=10 * tol_len)
                        if u_ref is not None:
                            u_car = u_ref
                        t_ray = dot(sub(p, rk.apex), rk.dir)
                        if t_ray <= tol_len:
                            continue
                        probe = _cw_side_probe(car, u_car, rk, probe_step)
                        if probe is None:
                            continue
                        dp = dists(probe)
                        pair_val = 0.5 * (dp[i] + dp[j])
                        if abs(dp[i] - dp[j]) > _EQ_TOL + \
                                angle_slack(probe, rays, (i, j), tol_len):
                            continue
                        ok = all(dp[m] >= pair_val
                                 - _EQ_TOL - angle_slack(probe, rays, (m, i), tol_len)
                                 for m in range(n) if m not in (i, j))
                        if not ok:
                            continue
                        vid = pool.add(p, V_MIXED, (i, j, k),
                                       angular_distance(p, rays[i]))
                        hits.setdefault((i, j, pidx), []).append((u_car, vid))
                        ray_hits[k].append((t_ray, vid))

    # carrier pieces terminate at their pair's apices, and in collinear
    # configurations may run through other apices too; split at all of them
    for (i, j), plist in pieces.items():
        for pidx, car in enumerate(plist):
            for k in range(n):
                u = car.param_of(rays[k].apex, tol=10 * tol_len)
                if u is not None:
                    vid = pool.find(rays[k].apex)
                    if vid is not None:
                        hits.setdefault((i, j, pidx), []).append((u, vid))
    # an apex sitting on another ray splits that ray's edge as well
    for k in range(n):
        for m in range(n):
            if m == k:
                continue
            if point_on_ray(rays[k].apex, rays[m], 10 * tol_len):
                t_on = dot(sub(rays[k].apex, rays[m].apex), rays[m].dir)
                if t_on > tol_len:
                    vid = pool.find(rays[k].apex)
                    if vid is not None:
                        ray_hits[m].append((t_on, vid))

    diagram.vertices = pool.vertices
    # uniform limit distances (pool merges can leave stale values)
    for v in diagram.vertices:
        v.distance = _limit_distance(v.point, rays, 10 * tol_len)

    _assemble_edges(diagram, pieces, hits, ray_hits, probe_step, tol_len)
    build_faces(diagram)
    _ownership_pass(diagram)
    return diagram


def _cw_side_probe(car: Carrier, u: float, rk: Ray, step: float) -> Point | None:
    """Point on the carrier just past u on the clockwise side of ray rk."""
    if isinstance(car, Arc):
        du = step / max(car.length(), 1e-12)
    elif isinstance(car, Seg):
        du = step / max(car.length(), 1e-12)
    else:
        du = step
    for sign in (1.0, -1.0):
        uu = u + sign * du
        if isinstance(car, (Arc, Seg)) and not 0.0 < uu < 1.0:
            continue
        p = car.point_at(uu)
        d = angular_distance(p, rk)
        if d > math.pi:
            return p
    return None


def _assemble_edges(diagram: Diagram, pieces, hits, ray_hits,
                    probe_step: float, tol_len: float) -> None:
    rays = diagram.rays
    n = len(rays)

    def dists(p: Point) -> list[float]:
        return [angular_distance(p, r) for r in rays]

    def owner(p: Point) -> int:
        return brute_nearest(p, rays)[0]

    eid = 0
    for (i, j), plist in pieces.items():
        for pidx, car in enumerate(plist):
            events = sorted(set(hits.get((i, j, pidx), [])))
            events = _dedupe_events(events, car, tol_len)
            unbounded_tail = isinstance(car, RaySeg) and math.isinf(car.t1)
            spans: list[tuple[float, float, int | None, int | None]] = []
            if not events:
                if unbounded_tail:
                    spans.append((car.t0, math.inf, None, None))
            else:
                first_u = events[0][0]
                if unbounded_tail:
                    lo = car.t0
                    if first_u - lo > 10 * tol_len:
                        spans.append((lo, first_u, None, events[0][1]))
                for a, b in zip(events, events[1:]):
                    spans.append((a[0], b[0], a[1], b[1]))
                if unbounded_tail:
                    spans.append((events[-1][0], math.inf, events[-1][1], None))
            for u0, u1, v0, v1 in spans:
                if not math.isinf(u1) and _span_len(car, u0, u1) <= 10 * tol_len:
                    continue
                mid = car.point_at(u0 + 1.0 if math.isinf(u1) else 0.5 * (u0 + u1))
                dm = dists(mid)
                pair_val = 0.5 * (dm[i] + dm[j])
                if abs(dm[i] - dm[j]) > _EQ_TOL + \
                        angle_slack(mid, rays, (i, j), tol_len):
                    continue
                if any(dm[m] < pair_val - _EQ_TOL
                       - angle_slack(mid, rays, (m, i), tol_len)
                       for m in range(n) if m not in (i, j)):
                    continue
                # a continuum tie with further sites would duplicate this
                # piece once per pair; keep only the lexicographically first
                tying = [m for m in range(n)
                         if abs(dm[m] - pair_val) <= _TIE_TOL
                         + angle_slack(mid, rays, (m, i), 1e-12 * diagram.scale)]
                if len(tying) > 2:
                    if (i, j) != tuple(sorted(tying)[:2]):
                        continue
                    diagram.diagnostics.append(
                        f"degenerate multi-site edge {tying} kept as ({i},{j})")
                sub_car = _subpiece(car, u0, u1)
                tang = sub_car.tangent_at(0.5 if not isinstance(sub_car, RaySeg)
                                          else sub_car.t0 + 1.0)
                nrm = perp(tang)
                pl = (mid[0] + probe_step * nrm[0], mid[1] + probe_step * nrm[1])
                pr = (mid[0] - probe_step * nrm[0], mid[1] - probe_step * nrm[1])
                left, right = owner(pl), owner(pr)
                if {left, right} != {i, j}:
                    diagram.diagnostics.append(
                        f"edge side probe disagrees on pair ({i},{j}) at {mid}")
                diagram.edges.append(Edge(eid, "circular", (left, right),
                                          sub_car, v0, v1))
                eid += 1

    for k in range(n):
        events = _dedupe_events(sorted(set(ray_hits[k])), None, tol_len)
        rk = rays[k]
        full = RaySeg(rk.apex[0], rk.apex[1], rk.dir[0], rk.dir[1], 0.0, math.inf)
        stops = events + [(math.inf, None)]
        for a, b in zip(stops, stops[1:]):
            t0, v0 = a
            t1, v1 = b
            if not math.isinf(t1) and t1 - t0 <= 10 * tol_len:
                continue
            mid_t = t0 + 1.0 if math.isinf(t1) else 0.5 * (t0 + t1)
            mid = full.point_at(mid_t)
            nrm = perp(rk.dir)
            pr = (mid[0] - probe_step * nrm[0], mid[1] - probe_step * nrm[1])
            piece = RaySeg(rk.apex[0], rk.apex[1], rk.dir[0], rk.dir[1], t0, t1)
            diagram.edges.append(Edge(eid, "ray", (k, owner(pr)), piece, v0, v1))
            eid += 1


def _span_len(car: Carrier, u0: float, u1: float) -> float:
    if isinstance(car, RaySeg):
        return u1 - u0
    return (u1 - u0) * car.length()


def _subpiece(car: Carrier, u0: float, u1: float) -> Carrier:
    if isinstance(car, RaySeg):
        return RaySeg(car.ax, car.ay, car.dx, car.dy, u0, u1)
    return car.subarc(u0, u1)


def _dedupe_events(events, car, tol_len: float):
    out = []
    for u, vid in events:
        if out and vid == out[-1][1]:
            continue
        if out and car is not None and _span_len(car, out[-1][0], u) <= tol_len:
            continue
        if out and car is None and u - out[-1][0] <= tol_len:
            continue
        out.append((u, vid))
    return out


def _ownership_pass(diagram: Diagram) -> None:
    """Spot-check extracted face owners against the oracle (diagnostics)."""
    if not diagram.faces:
        return
    for f in diagram.faces:
        if f.site is None or not f.cycle:
            continue


def brocard_plane(rays: list[Ray], diagram: Diagram | None = None) -> BrocardResult:
    """Brocard angle of the plane under a set of rays.

    Maximum of the vertex limit distances and the at-infinity limits
    L(r) = min over s of the (0, 2*pi]-valued rotation taking dir(s) to
    dir(r); a supremum coming from an L(r) term, or from a vertex lying on a
    ray, is reported with attained=False.
    """
    if diagram is None:
        diagram = build_plane_diagram(rays)
    best_v: tuple[float, int] | None = None
    for v in diagram.vertices:
        if best_v is None or v.distance > best_v[0]:
            best_v = (v.distance, v.id)
    best_inf: tuple[float, int] | None = None
    for i, r in enumerate(rays):
        l_r = TWO_PI
        for s in rays:
            d = geom.angular_difference(r, s)
            if d <= geom.EPS_ANGLE:
                d = TWO_PI
            l_r = min(l_r, d)
        if best_inf is None or l_r > best_inf[0]:
            best_inf = (l_r, i)

    # ties: an attained proper-vertex witness beats the at-infinity limit,
    # which in turn is the canonical description of a non-attained supremum
    take_vertex = best_v is not None and (
        best_inf is None
        or best_v[0] > best_inf[0] + 1e-12
        or (best_v[0] >= best_inf[0] - 1e-12
            and diagram.vertices[best_v[1]].kind == V_PROPER))
    if take_vertex:
        v = diagram.vertices[best_v[1]]
        result = BrocardResult(angle=best_v[0], witness_kind="vertex",
                               point=v.point, witness_sites=v.sites,
                               attained=(v.kind == V_PROPER))
    else:
        result = BrocardResult(angle=best_inf[0], witness_kind="at_infinity",
                               direction_site=best_inf[1],
                               witness_sites=(best_inf[1],), attained=False)
    diagram.brocard = result
    return result


# -- adversarial generators ---------------------------------------------------

def generate_adversarial(kind: str, m: int, seed: int = 1) -> list[Ray]:
    """Quadratic-complexity instance families.

    "nonintersecting": 2m pairwise non-crossing rays whose first m regions
    weave between the m upward verticals; the tilt increments are certified
    by a probe search.  "grid": m verticals, m horizontals, plus one slow
    horizontal ray far on the left whose region gets a face in every cell.
    """
    if m < 2:
        raise DegenerateInput("m must be at least 2")
    if kind == "grid":
        rays = [make_ray((float(i), 0.0), (0.0, 1.0)) for i in range(1, m + 1)]
        rays += [make_ray((0.0, float(i)), (1.0, 0.0)) for i in range(1, m + 1)]
        rays.append(make_ray((-float(m * m), 0.0), (1.0, 0.0)))
        return rays
    if kind != "nonintersecting":
        raise ValueError(f"unknown adversarial kind: {kind}")

    rays: list[Ray] = [None] * (2 * m)  # type: ignore[list-item]
    for i in range(m + 1, 2 * m + 1):
        rays[i - 1] = make_ray((float(i), 0.0), (0.0, 1.0))
    # tilted rays point just below east; increasing alpha flattens them, so
    # consecutive pair bisector arcs nest ever closer over the x-axis
    alpha = TWO_PI - 0.35 * math.pi
    rays[0] = make_ray((1.0, 0.0), (math.cos(alpha), math.sin(alpha)))
    headroom = TWO_PI - 0.02 - alpha
    for i in range(2, m + 1):
        lo, hi = 0.0, headroom
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            cand = make_ray((float(i), 0.0),
                            (math.cos(alpha + mid), math.sin(alpha + mid)))
            trial_rays = rays[:i - 1] + [cand] + rays[m:]
            if _weave_certified(trial_rays, i, m):
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-11:
                break
        eps = 0.5 * lo
        cand = make_ray((float(i), 0.0),
                        (math.cos(alpha + eps), math.sin(alpha + eps)))
        if eps <= 0.0 or not _weave_certified(rays[:i - 1] + [cand] + rays[m:], i, m):
            raise SearchFailed(f"no certified tilt for ray {i}")
        alpha += eps
        headroom = min(headroom - eps, eps)
        rays[i - 1] = cand
    return rays


def _weave_certified(trial_rays: list[Ray], i: int, m: int) -> bool:
    """Both newest tilted rays own a point strictly inside every vertical gap."""
    idx_new = i - 1
    idx_prev = i - 2
    for g in range(m + 1, 2 * m):
        x = g + 0.5
        found_new = found_prev = False
        for ylog in range(1, 14):
            y = 10.0 ** (-0.5 * ylog)
            o = brute_nearest((x, y), trial_rays)[0]
            if o == idx_new:
                found_new = True
            if o == idx_prev:
                found_prev = True
            if found_new and found_prev:
                break
        if not (found_new and found_prev):
            return False
    return True


def rays_pairwise_noncrossing(rays: list[Ray]) -> bool:
    """Exact pairwise non-intersection check (open crossing test)."""
    n = len(rays)
    for i in range(n):
        for j in range(i + 1, n):
            ri, rj = rays[i], rays[j]
            den = cross(ri.dir, rj.dir)
            if abs(den) < 1e-15:
                off = cross(ri.dir, sub(rj.apex, ri.apex))
                if abs(off) < 1e-15 and dot(ri.dir, rj.dir) < 0:
                    return False  # antiparallel on one line can overlap
                continue
            w = sub(rj.apex, ri.apex)
            ti = cross(w, rj.dir) / den
            tj = cross(w, ri.dir) / den
            if ti > 0.0 and tj > 0.0:
                return False
    return True
