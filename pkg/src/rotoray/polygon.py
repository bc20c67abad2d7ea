"""Diagrams inside a convex polygon: the collapse pipeline, direction
splitting for the divide-and-conquer pipeline, the disk-diagram rule, and the
polygon Brocard solvers.

The collapse builder grows the diagram from the polygon boundary inward:
every polygon vertex starts an edge, a priority queue holds the next
pairwise meeting point of circularly adjacent edges, and each processed
event retires one region until everything meets at the deepest vertex,
which realizes the Brocard angle.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field

from . import geom
from .bisector import bisector
from .carriers import Arc, Carrier, RaySeg, Seg, intersect
from .diagram import (V_APEX, V_PROPER, BrocardResult, Diagram, Edge,
                      VertexPool)
from .errors import (DegenerateCandidate, DegenerateInput, InvalidPolygon,
                     ParallelEdges)
from .geom import (EPS_ANGLE, TWO_PI, Point, Ray, angular_difference,
                   angular_distance, canonicalize, cross, dist, dot, make_ray,
                   perp, rotate_ray, sub, surrogate_of_angle)
from .oracle import brute_nearest
from .refine import angle_slack, refine_equidistant3


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex ccw vertex list; no three vertices collinear."""

    vertices: tuple[Point, ...]
    has_antiparallel_edges: bool = field(default=False, compare=False)

    def __init__(self, vertices):
        pts = tuple((float(p[0]), float(p[1])) for p in vertices)
        if len(pts) < 3:
            raise InvalidPolygon("need at least three vertices")
        scale = geom.input_scale(list(pts))
        n = len(pts)
        area2 = sum(cross(pts[i], pts[(i + 1) % n]) for i in range(n))
        if area2 <= 0:
            raise InvalidPolygon("vertices must be in counterclockwise order")
        for i in range(n):
            a, b, c = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
            turn = cross(sub(b, a), sub(c, b))
            if turn <= 1e-12 * scale * scale:
                raise InvalidPolygon(
                    f"vertices {i},{i+1},{i+2} are collinear or a reflex turn")
        anti = False
        dirs = [geom.unit(sub(pts[(i + 1) % n], pts[i])) for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if abs(cross(dirs[i], dirs[j])) <= geom.EPS_ANGLE and \
                        dot(dirs[i], dirs[j]) < 0:
                    anti = True
        object.__setattr__(self, "vertices", pts)
        object.__setattr__(self, "has_antiparallel_edges", anti)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def contains(self, p: Point, tol: float = 0.0) -> bool:
        n = len(self.vertices)
        for i in range(n):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % n]
            if cross(sub(b, a), sub(p, a)) <= tol:
                return False
        return True

    @property
    def scale(self) -> float:
        return geom.input_scale(list(self.vertices))


def rays_of_polygon(P: ConvexPolygon) -> list[Ray]:
    """Edge-aligned sites: ray i leaves vertex i through vertex i+1."""
    n = P.n
    return [make_ray(P.vertices[i], sub(P.vertices[(i + 1) % n], P.vertices[i]))
            for i in range(n)]


class DirTag(enum.Enum):
    N = "N"
    W = "W"
    S = "S"
    E = "E"


@dataclass
class DirectionClass:
    tag: DirTag
    ids: list[int]  # contiguous ccw run of site indices


_QUADRANTS = (
    (DirTag.E, 7 * math.pi / 4, TWO_PI),
    (DirTag.E, 0.0, math.pi / 4),
    (DirTag.N, math.pi / 4, 3 * math.pi / 4),
    (DirTag.W, 3 * math.pi / 4, 5 * math.pi / 4),
    (DirTag.S, 5 * math.pi / 4, 7 * math.pi / 4),
)


def _tag_of(theta: float) -> DirTag:
    theta = canonicalize(theta)
    for tag, lo, hi in _QUADRANTS:
        if lo <= theta < hi:
            return tag
    return DirTag.E


def split_by_direction(rays: list[Ray]) -> dict[DirTag, DirectionClass]:
    """Partition polygon rays by direction quadrant.

    Cuts at pi/4, 3pi/4, 5pi/4, 7pi/4 keep each class's angular spread at
    most pi/2; boundary angles go to the counterclockwise-later class.  Each
    class is a contiguous run in polygon order because edge directions turn
    monotonically counterclockwise.
    """
    n = len(rays)
    tags = [_tag_of(r.angle) for r in rays]
    classes: dict[DirTag, DirectionClass] = {
        t: DirectionClass(t, []) for t in DirTag}
    # find a run boundary to unwrap the circular index order
    start = 0
    for i in range(n):
        if tags[i] != tags[(i - 1) % n]:
            start = i
            break
    for k in range(n):
        i = (start + k) % n
        classes[tags[i]].ids.append(i)
    for t, cls in classes.items():
        ids = cls.ids
        for a, b in zip(ids, ids[1:]):
            if (a + 1) % n != b:
                raise DegenerateInput(f"direction class {t} is not contiguous")
    return classes


def rotate_rays(rays_or_class, all_rays: list[Ray] | None = None) -> list[Ray]:
    """Clockwise quarter-turn of each ray about its own apex.

    Accepts either a plain list of rays or a DirectionClass (with the full
    ray list in all_rays).  Bisecting circles are invariant under the uniform
    rotation, which is what lets the rotated sub-diagrams be reassembled.
    """
    if isinstance(rays_or_class, DirectionClass):
        rays = [all_rays[i] for i in rays_or_class.ids]
    else:
        rays = list(rays_or_class)
    return [rotate_ray(r, -math.pi / 2.0) for r in rays]


# -- collapse pipeline ---------------------------------------------------------


@dataclass
class _ActiveEdge:
    pair: tuple[int, int]
    carrier: Carrier  # full connecting piece of the pair bisector
    u_start: float
    sign: float  # +1 traverses increasing carrier param, -1 decreasing
    start_vid: int
    start_dist: float
    alive: bool = True
    prev: "_ActiveEdge | None" = None
    next: "_ActiveEdge | None" = None
    u_end: float | None = None
    end_vid: int | None = None


def _carrier_of_pair(ra: Ray, rb: Ray) -> Carrier:
    b = bisector(ra, rb)
    if b.arc is None or isinstance(b.arc, tuple):
        raise ParallelEdges("pair bisector has no bounded connecting piece")
    return b.arc


def _param_span(car: Carrier, u0: float, u1: float) -> float:
    if isinstance(car, RaySeg):
        return abs(u1 - u0)
    return abs(u1 - u0) * car.length()


def build_pvd_collapse(P: ConvexPolygon) -> Diagram:
    """Event-driven construction of the diagram restricted to the polygon.

    O(n log n): a circular list of active edges plus a min-queue of candidate
    meeting points keyed by surrogate distance, lexicographic site triple on
    ties.  Antiparallel edge pairs are allowed; their constant-distance
    segment bisectors may end up carrying the Brocard witness interval.
    """
    rays = rays_of_polygon(P)
    n = P.n
    scale = P.scale
    tol_len = 1e-9 * scale
    pool = VertexPool(tol_len)
    diagram = Diagram(rays=rays, site_ids=list(range(n)), vertices=[],
                      edges=[], polygon=list(P.vertices), scale=scale)

    leaf = [pool.add(P.vertices[i], V_APEX, (i, (i - 1) % n), 0.0)
            for i in range(n)]

    def refine(p: Point, a: int, b: int, c: int) -> Point:
        return refine_equidistant3(p, rays[a], rays[b], rays[c],
                                   max_step=1e-3 * scale)

    # initial active edges: at each polygon vertex, the bisector of the two
    # incident edge rays enters the interior
    edges: list[_ActiveEdge] = []
    for i in range(n):
        a = (i - 1) % n
        car = _carrier_of_pair(rays[a], rays[i])
        u0 = car.param_of(P.vertices[i], tol=10 * tol_len)
        if u0 is None:
            raise DegenerateInput(f"initial bisector misses vertex {i}")
        sign = _advancing_sign(car, u0, a, i, rays, P, scale)
        edges.append(_ActiveEdge((a, i), car, u0, sign, leaf[i], 0.0))
    for k in range(n):
        edges[k].prev = edges[(k - 1) % n]
        edges[k].next = edges[(k + 1) % n]

    heap: list = []
    counter = 0

    def push_event(e1: _ActiveEdge, e2: _ActiveEdge) -> None:
        nonlocal counter
        cand = _pair_event(e1, e2, rays, P, pool, refine, tol_len)
        if cand is None:
            return
        d, p, trip = cand
        counter += 1
        heapq.heappush(heap, (surrogate_of_angle(d), trip, counter, p, e1, e2))

    for k in range(n):
        push_event(edges[k], edges[k].next)

    active_faces = n
    last_vertex: int | None = None
    guard = 0
    while active_faces > 3:
        guard += 1
        if guard > 20 * n + 100:
            raise DegenerateInput("collapse event loop failed to converge")
        if not heap:
            raise DegenerateInput("collapse ran out of events before closing")
        _, trip, _, p, e1, e2 = heapq.heappop(heap)
        if not (e1.alive and e2.alive and e1.next is e2):
            continue
        d = angular_distance(p, rays[e1.pair[1]])
        vid = pool.add(p, V_PROPER, trip, d)
        _end_edge(e1, p, vid, tol_len)
        _end_edge(e2, p, vid, tol_len)
        x, z = e1.pair[0], e2.pair[1]
        new_car = _carrier_of_pair(rays[x], rays[z])
        u0 = new_car.param_of(p, tol=100 * tol_len)
        if u0 is None:
            u0 = _nearest_param(new_car, p)
        sign = _advancing_sign(new_car, u0, x, z, rays, P, scale,
                               from_dist=d)
        e_new = _ActiveEdge((x, z), new_car, u0, sign, vid, d)
        e_new.prev = e1.prev
        e_new.next = e2.next
        e1.prev.next = e_new
        e2.next.prev = e_new
        edges.append(e_new)
        active_faces -= 1
        push_event(e_new.prev, e_new)
        push_event(e_new, e_new.next)
        last_vertex = vid

    # final event: the three remaining edges meet at the deepest vertex
    live = [e for e in edges if e.alive]
    final = _final_event(live, rays, P, pool, refine, tol_len)
    if final is not None:
        d, p, trip = final
        vid = pool.add(p, V_PROPER, trip, d)
        for e in live:
            _end_edge(e, p, vid, tol_len)
        last_vertex = vid

    diagram.vertices = pool.vertices
    _assemble_pvd(diagram, P, edges, leaf, tol_len)
    diagram.brocard = _brocard_from_pvd(diagram)
    return diagram


def _nearest_param(car: Carrier, p: Point) -> float:
    if isinstance(car, Seg):
        dx, dy = car.x1 - car.x0, car.y1 - car.y0
        L2 = dx * dx + dy * dy
        return max(0.0, min(1.0, ((p[0] - car.x0) * dx + (p[1] - car.y0) * dy) / L2))
    if isinstance(car, Arc):
        ang = car.angle_of(p)
        delta = canonicalize((ang - car.a0) * (1.0 if car.sweep > 0 else -1.0))
        return max(0.0, min(1.0, delta / abs(car.sweep)))
    return dot((p[0] - car.ax, p[1] - car.ay), (car.dx, car.dy))


def _end_edge(e: _ActiveEdge, p: Point, vid: int, tol_len: float) -> None:
    e.alive = False
    u = e.carrier.param_of(p, tol=100 * tol_len)
    e.u_end = u if u is not None else _nearest_param(e.carrier, p)
    e.end_vid = vid


def _advancing_sign(car: Carrier, u0: float, a: int, b: int, rays: list[Ray],
                    P: ConvexPolygon, scale: float,
                    from_dist: float | None = None) -> float:
    """Traversal sign along the carrier advancing into the live region.

    Prefers the side where the pair is still jointly nearest (constant
    antiparallel segments have no distance gradient to go by), then the side
    of increasing distance.
    """
    step = 1e-6 if isinstance(car, (Arc, Seg)) else 1e-6 * scale
    best = None  # (valid, gain, sign)
    for sign in (1.0, -1.0):
        u = u0 + sign * step
        if isinstance(car, (Arc, Seg)) and not 0.0 <= u <= 1.0:
            continue
        q = car.point_at(u)
        if not P.contains(q, tol=-1e-12 * scale):
            continue
        ds = sorted(range(len(rays)), key=lambda m: angular_distance(q, rays[m]))
        valid = set(ds[:2]) == {a, b}
        gain = angular_distance(q, rays[a])
        if from_dist is not None:
            gain = gain - from_dist
        key = (valid, gain)
        if best is None or key > best[0]:
            best = (key, sign)
    return best[1] if best is not None else 1.0


def _pair_event(e1: _ActiveEdge, e2: _ActiveEdge, rays, P, pool, refine,
                tol_len: float):
    """Next meeting point of two circularly adjacent active edges."""
    if e1.pair[1] != e2.pair[0]:
        return None
    x, y = e1.pair
    z = e2.pair[1]
    if x == z:
        return None  # two faces left; handled by the final event
    trip = (x, y, z)
    best = None
    for _, _, p in intersect(e1.carrier, e2.carrier, tol=100 * tol_len):
        p = refine(p, x, y, z)
        u1 = e1.carrier.param_of(p, tol=100 * tol_len)
        u2 = e2.carrier.param_of(p, tol=100 * tol_len)
        if u1 is None or u2 is None:
            continue
        if (u1 - e1.u_start) * e1.sign < -1e-9:
            continue
        if (u2 - e2.u_start) * e2.sign < -1e-9:
            continue
        if not P.contains(p, tol=-1e-9 * P.scale):
            continue
        d = angular_distance(p, rays[y])
        if d < max(e1.start_dist, e2.start_dist) - 1e-7:
            continue
        if best is None or d < best[0]:
            best = (d, p, trip)
    return best


def _final_event(live, rays, P, pool, refine, tol_len: float):
    if len(live) < 2:
        return None
    pairs = {e.pair for e in live}
    sites = sorted({s for pr in pairs for s in pr})
    if len(sites) < 3:
        # two faces remain; their two edge pieces share both carriers
        e = live[0]
        x, y = e.pair
        p = e.carrier.point_at(e.u_start)
        return (angular_distance(p, rays[x]), p, (x, y, y))
    trip = tuple(sites[:3])
    best = None
    for i in range(len(live)):
        for j in range(i + 1, len(live)):
            for _, _, p in intersect(live[i].carrier, live[j].carrier,
                                     tol=100 * tol_len):
                p2 = refine(p, *trip)
                if not P.contains(p2, tol=-1e-9 * P.scale):
                    continue
                d = angular_distance(p2, rays[trip[0]])
                ok = True
                for e in live:
                    u = e.carrier.param_of(p2, tol=100 * tol_len)
                    if u is None or (u - e.u_start) * e.sign < -1e-9:
                        ok = False
                        break
                if not ok:
                    continue
                if best is None or d > best[0]:
                    best = (d, p2, trip)
    return best


def _assemble_pvd(diagram: Diagram, P: ConvexPolygon, edges, leaf,
                  tol_len: float) -> None:
    n = P.n
    eid = 0
    for e in edges:
        if e.u_end is None or e.end_vid is None:
            continue
        if _param_span(e.carrier, e.u_start, e.u_end) <= 10 * tol_len:
            continue
        sub_car = e.carrier.subarc(e.u_start, e.u_end)
        # walking the shrinking level set ccw crosses each active edge from
        # face pair[0] into pair[1]; start-to-end traversal (increasing
        # distance) therefore keeps pair[0] on its left
        diagram.edges.append(Edge(eid, "circular", e.pair, sub_car,
                                  e.start_vid, e.end_vid))
        eid += 1
    # polygon boundary pieces close each region at distance zero
    for i in range(n):
        a = P.vertices[i]
        b = P.vertices[(i + 1) % n]
        d = geom.unit(sub(b, a))
        car = RaySeg(a[0], a[1], d[0], d[1], 0.0, dist(a, b))
        diagram.edges.append(Edge(eid, "ray", (i, None), car,
                                  leaf[i], leaf[(i + 1) % n]))
        eid += 1
    _build_chains(diagram)


def _build_chains(diagram: Diagram) -> None:
    """Ordered closed boundary loop per region (region kept on the left)."""
    n = len(diagram.rays)
    incident: dict[tuple[int, int], list[tuple[int, bool]]] = {}
    for e in diagram.edges:
        if e.kind != "circular":
            continue
        for site, fwd in ((e.sites[0], True), (e.sites[1], False)):
            if site is None:
                continue
            v_from = e.v0 if fwd else e.v1
            incident.setdefault((site, v_from), []).append((e.id, fwd))
    chains: dict[int, list[list[tuple[int, bool]]]] = {}
    for i in range(n):
        boundary_edge = next(e for e in diagram.edges
                             if e.kind == "ray" and e.sites[0] == i)
        comp: list[tuple[int, bool]] = [(boundary_edge.id, True)]
        cur = boundary_edge.v1
        stop = boundary_edge.v0
        seen = set()
        guard = 0
        while cur != stop and guard < 10 * len(diagram.edges) + 10:
            guard += 1
            options = [(eidx, fwd) for (eidx, fwd)
                       in incident.get((i, cur), [])
                       if (eidx, fwd) not in seen]
            if not options:
                diagram.diagnostics.append(
                    f"region {i}: boundary walk stalled at vertex {cur}")
                break
            eidx, fwd = options[0]
            seen.add((eidx, fwd))
            comp.append((eidx, fwd))
            e = diagram.edges[eidx]
            cur = e.v1 if fwd else e.v0
        chains[i] = [comp]
    diagram.chains = chains


def _brocard_from_pvd(diagram: Diagram) -> BrocardResult:
    best = None
    for v in diagram.vertices:
        if best is None or v.distance > best.distance:
            best = v
    if best is None:
        raise DegenerateInput("empty diagram")
    # a constant-distance antiparallel segment at the top realizes the angle
    # on a whole edge interval
    for e in diagram.edges:
        if e.kind != "circular" or not isinstance(e.carrier, Seg):
            continue
        va, vb = diagram.vertices[e.v0], diagram.vertices[e.v1]
        if abs(va.distance - best.distance) < 1e-9 and \
                abs(vb.distance - best.distance) < 1e-9 and \
                e.carrier.length() > 1e-7 * diagram.scale:
            return BrocardResult(angle=best.distance,
                                 witness_kind="edge_interval",
                                 point=((va.x + vb.x) / 2, (va.y + vb.y) / 2),
                                 edge_id=e.id,
                                 witness_sites=tuple(s for s in e.sites
                                                     if s is not None),
                                 attained=True)
    return BrocardResult(angle=best.distance, witness_kind="vertex",
                         point=best.point,
                         witness_sites=best.sites[:3], attained=True)


# -- disk diagram oracle -------------------------------------------------------

def dd_nearest(x: Point, rays: list[Ray]) -> int | None:
    """Owner under the disk-diagram rule, or None in a cyclic-dominance void.

    The bisector system is the full bisecting circles: r dominates s inside
    or outside cb(r, s) depending on whether the pair's angular difference
    exceeds pi.  Non-circular carriers (parallel pairs) fall back to direct
    comparison; polygon-induced sites never need that.
    """
    n = len(rays)
    for i in range(n):
        ok = True
        for j in range(n):
            if i == j:
                continue
            if not _dd_dominates(x, i, j, rays):
                ok = False
                break
        if ok:
            return i
    return None


def _dd_dominates(x: Point, i: int, j: int, rays: list[Ray]) -> bool:
    from .bisector import bisecting_circle
    bc = bisecting_circle(rays[i], rays[j])
    if bc.kind != "circle":
        from .bisector import dominates
        return dominates(x, rays[i], rays[j])
    inside = dist(x, bc.center) < bc.radius
    diff_ij = angular_difference(rays[i], rays[j])
    if diff_ij < math.pi:
        return not inside  # dr_D(i, j) is the exterior
    return inside


# -- Brocard solvers -----------------------------------------------------------

def brocard_polygon(P: ConvexPolygon, algo: str = "collapse") -> BrocardResult:
    """Brocard angle of a convex polygon via a full diagram build."""
    if algo == "collapse":
        d = build_pvd_collapse(P)
    elif algo == "splitmerge":
        from .merge import build_pvd_splitmerge
        d = build_pvd_splitmerge(P)
    else:
        raise ValueError(f"unknown algo: {algo}")
    return d.brocard


def is_brocard_polygon(P: ConvexPolygon):
    """Decide whether an interior point equidistant to all edge rays exists.

    The only candidate is the second intersection of the bisecting circles
    of (r1, r2) and (r1, r3); it must then tie all n rays within 1e-7.
    Returns (True, point, angle) or (False, None, None).
    """
    from .bisector import bisecting_circle

    rays = rays_of_polygon(P)
    if P.n < 3:
        raise InvalidPolygon("need at least three vertices")

    def full_carrier(i: int, j: int) -> Carrier:
        bc = bisecting_circle(rays[i], rays[j])
        if bc.kind == "circle":
            return Arc(bc.center[0], bc.center[1], bc.radius, 0.0, TWO_PI)
        if bc.kind == "line":
            w = 64.0 * P.scale
            p0 = (bc.line_point[0] - w * bc.line_dir[0],
                  bc.line_point[1] - w * bc.line_dir[1])
            p1 = (bc.line_point[0] + w * bc.line_dir[0],
                  bc.line_point[1] + w * bc.line_dir[1])
            return Seg(p0[0], p0[1], p1[0], p1[1])
        raise DegenerateCandidate("degenerate bisector among r1,r2,r3")

    pts = [p for _, _, p in intersect(full_carrier(0, 1), full_carrier(0, 2),
                                      tol=1e-9 * P.scale)
           if dist(p, P.vertices[0]) > 1e-9 * P.scale]
    if not pts:
        raise DegenerateCandidate("bisecting carriers are tangent")
    cand = refine_equidistant3(pts[0], rays[0], rays[1], rays[2],
                               max_step=1e-2 * P.scale)
    if not P.contains(cand):
        return (False, None, None)
    ds = [angular_distance(cand, r) for r in rays]
    base = ds[0]
    if all(abs(d - base) <= 1e-7 for d in ds):
        return (True, cand, base)
    return (False, None, None)
