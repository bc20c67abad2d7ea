"""Planar diagram structures shared by the plane and polygon builders.

A Diagram is a planar graph of typed vertices and typed edges plus per-site
boundary chains.  Vertices carry the *limit* nearest-site distance: the
largest one-sided limit of the min-distance function at the vertex, which is
what a uniformly growing floodlight sweep reaches last there (a vertex lying
on a ray has pointwise distance zero to it, but its clockwise side is swept
at the circular-pair value).

Face extraction clips unbounded pieces at a large circle and walks left-face
orbits of the rotation system; faces power point location and the
bounded-face counts of the adversarial constructions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import geom
from .carriers import Arc, Carrier, RaySeg, Seg, intersect
from .geom import Point, Ray

V_PROPER = "proper"
V_MIXED = "mixed"
V_INTERSECTION = "intersection"
V_APEX = "apex"


@dataclass
class Vertex:
    id: int
    x: float
    y: float
    kind: str
    sites: tuple[int, ...]
    distance: float

    @property
    def point(self) -> Point:
        return (self.x, self.y)


@dataclass
class Edge:
    id: int
    kind: str  # "circular" | "ray"
    sites: tuple[int, int]  # (left, right) owners relative to carrier traversal
    carrier: Carrier
    v0: int | None
    v1: int | None  # None marks an unbounded end


@dataclass
class Face:
    site: int | None
    cycle: list[tuple[int, bool]]  # (edge id, forward) in left-face order
    bounded: bool
    loop: list[Carrier] = field(default_factory=list)


@dataclass
class BrocardResult:
    angle: float
    witness_kind: str  # "vertex" | "at_infinity" | "curve_param" | "edge_interval"
    point: Point | None = None
    direction_site: int | None = None
    param: float | None = None
    edge_id: int | None = None
    witness_sites: tuple[int, ...] = ()
    attained: bool = True


@dataclass
class Diagram:
    rays: list[Ray]
    site_ids: list[int]
    vertices: list[Vertex]
    edges: list[Edge]
    # per site: boundary components; each is an ordered list of (edge id, forward)
    chains: dict[int, list[list[tuple[int, bool]]]] = field(default_factory=dict)
    faces: list[Face] | None = None
    polygon: list[Point] | None = None
    diagnostics: list[str] = field(default_factory=list)
    brocard: BrocardResult | None = None
    scale: float = 1.0

    def vertex(self, vid: int) -> Vertex:
        return self.vertices[vid]

    def ray_of(self, site: int) -> Ray:
        return self.rays[site]

    def circular_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.kind == "circular"]

    def region_loops(self) -> dict[int, list[Carrier]]:
        """Closed boundary loop carriers per site (polygon diagrams only)."""
        loops: dict[int, list[Carrier]] = {}
        for s, comps in self.chains.items():
            pieces: list[Carrier] = []
            for comp in comps:
                pieces.extend(self.edges[eid].carrier for eid, _ in comp)
            loops[s] = pieces
        return loops


class VertexPool:
    """Coordinate-deduplicating vertex factory (spatial hash, tol cells)."""

    def __init__(self, tol: float):
        self.tol = tol
        self.cells: dict[tuple[int, int], list[int]] = {}
        self.vertices: list[Vertex] = []

    def _cell(self, x: float, y: float) -> tuple[int, int]:
        return (int(math.floor(x / self.tol)), int(math.floor(y / self.tol)))

    def find(self, p: Point) -> int | None:
        cx, cy = self._cell(p[0], p[1])
        for ix in (cx - 1, cx, cx + 1):
            for iy in (cy - 1, cy, cy + 1):
                for vid in self.cells.get((ix, iy), ()):
                    v = self.vertices[vid]
                    if math.hypot(v.x - p[0], v.y - p[1]) <= self.tol:
                        return vid
        return None

    def add(self, p: Point, kind: str, sites: tuple[int, ...], distance: float) -> int:
        vid = self.find(p)
        if vid is not None:
            v = self.vertices[vid]
            merged = tuple(sorted(set(v.sites) | set(sites)))
            v.sites = merged
            v.distance = max(v.distance, distance)
            if kind == V_PROPER and v.kind != V_PROPER:
                v.kind = kind
            return vid
        vid = len(self.vertices)
        v = Vertex(vid, p[0], p[1], kind, tuple(sites), distance)
        self.vertices.append(v)
        self.cells.setdefault(self._cell(p[0], p[1]), []).append(vid)
        return vid


# -- point location ----------------------------------------------------------

_PROBE_DIRS = [(0.8480480961564261, 0.5299192642332049)]
for _k in range(1, 8):
    _a = 0.5585053606381855 + 2.399963229728653 * _k
    _PROBE_DIRS.append((math.cos(_a), math.sin(_a)))


def point_in_loop(pieces: list[Carrier], p: Point, tol: float) -> bool:
    """Crossing-parity membership test against a closed curvilinear loop."""
    for d in _PROBE_DIRS:
        probe = RaySeg(p[0], p[1], d[0], d[1], 0.0, math.inf)
        count = 0
        ok = True
        for car in pieces:
            hits = intersect(car, probe, tol)
            for u_car, u_probe, q in hits:
                if u_probe <= tol:
                    ok = False
                    break
                # endpoint grazing makes parity unreliable; retry rotated
                if _near_piece_end(car, u_car, tol):
                    ok = False
                    break
                count += 1
            if not ok:
                break
        if ok:
            return count % 2 == 1
    return False


def _near_piece_end(car: Carrier, u: float, tol: float) -> bool:
    if isinstance(car, RaySeg):
        lo, hi = car.t0, car.t1
        return u - lo < tol or (not math.isinf(hi) and hi - u < tol)
    span = car.length()
    if span <= 0.0:
        return True
    frac = tol / span
    return u < frac or u > 1.0 - frac


def carrier_bbox(car: Carrier) -> tuple[float, float, float, float]:
    if isinstance(car, Arc):
        return (car.cx - car.r, car.cy - car.r, car.cx + car.r, car.cy + car.r)
    if isinstance(car, Seg):
        return (min(car.x0, car.x1), min(car.y0, car.y1),
                max(car.x0, car.x1), max(car.y0, car.y1))
    p0 = car.point_at(car.t0)
    if math.isinf(car.t1):
        return (-math.inf, -math.inf, math.inf, math.inf)
    p1 = car.point_at(car.t1)
    return (min(p0[0], p1[0]), min(p0[1], p1[1]),
            max(p0[0], p1[0]), max(p0[1], p1[1]))


def _loop_bbox(pieces: list[Carrier]) -> tuple[float, float, float, float]:
    bx0 = by0 = math.inf
    bx1 = by1 = -math.inf
    for car in pieces:
        x0, y0, x1, y1 = carrier_bbox(car)
        bx0, by0 = min(bx0, x0), min(by0, y0)
        bx1, by1 = max(bx1, x1), max(by1, y1)
    return (bx0, by0, bx1, by1)


def locate_owner(diagram: Diagram, p: Point) -> int | None:
    """Site owning the face that contains p, or None when outside/unresolved."""
    tol = 1e-12 * diagram.scale
    if diagram.polygon is not None:
        for s, (pieces, box) in _cached_loops(diagram).items():
            if not (box[0] <= p[0] <= box[2] and box[1] <= p[1] <= box[3]):
                continue
            if point_in_loop(pieces, p, tol):
                return s
        return None
    if diagram.faces:
        boxes = _cached_face_boxes(diagram)
        for f, box in zip(diagram.faces, boxes):
            if f.site is None or not f.loop:
                continue
            if not (box[0] <= p[0] <= box[2] and box[1] <= p[1] <= box[3]):
                continue
            if point_in_loop(f.loop, p, tol):
                return f.site
        return None
    return None


def _cached_loops(diagram: Diagram):
    cached = getattr(diagram, "_loops", None)
    if cached is None:
        cached = {s: (pieces, _loop_bbox(pieces))
                  for s, pieces in diagram.region_loops().items()}
        diagram._loops = cached
    return cached


def _cached_face_boxes(diagram: Diagram):
    cached = getattr(diagram, "_face_boxes", None)
    if cached is None:
        cached = [_loop_bbox(f.loop) for f in diagram.faces]
        diagram._face_boxes = cached
    return cached


# -- face extraction ---------------------------------------------------------

def _clip_radius(diagram: Diagram, center: Point) -> float:
    r = 8.0 * diagram.scale
    for v in diagram.vertices:
        r = max(r, 1.5 * math.hypot(v.x - center[0], v.y - center[1]))
    for e in diagram.edges:
        car = e.carrier
        if isinstance(car, Arc):
            d = math.hypot(car.cx - center[0], car.cy - center[1]) + car.r
            r = max(r, 1.25 * d)
        elif isinstance(car, Seg):
            for q in (car.point_at(0.0), car.point_at(1.0)):
                r = max(r, 1.25 * math.hypot(q[0] - center[0], q[1] - center[1]))
        elif not math.isinf(car.t1):
            for q in (car.point_at(car.t0), car.point_at(car.t1)):
                r = max(r, 1.25 * math.hypot(q[0] - center[0], q[1] - center[1]))
    return r


def build_faces(diagram: Diagram) -> list[Face]:
    """Left-face orbits of the clipped subdivision.

    Unbounded edges are cut at a circle beyond every feature and the circle
    itself is stitched in, so unbounded faces close up and parity queries
    work anywhere inside the clip disk.
    """
    if not diagram.edges:
        diagram.faces = []
        return []
    cx = sum(v.x for v in diagram.vertices) / max(1, len(diagram.vertices)) if diagram.vertices else 0.0
    cy = sum(v.y for v in diagram.vertices) / max(1, len(diagram.vertices)) if diagram.vertices else 0.0
    R = _clip_radius(diagram, (cx, cy))
    tol = 1e-9 * diagram.scale

    # nodes: diagram vertices plus clip nodes for unbounded ends
    nodes: list[Point] = [v.point for v in diagram.vertices]
    side_of: list[tuple[int | None, int | None]] = []
    pieces: list[Carrier] = []
    ends: list[tuple[int, int]] = []  # (node at start, node at end)
    piece_edge: list[int | None] = []

    def clip_param(car: RaySeg) -> float:
        fx, fy = car.ax - cx, car.ay - cy
        b = 2.0 * (fx * car.dx + fy * car.dy)
        c = fx * fx + fy * fy - R * R
        disc = b * b - 4.0 * c
        t = (-b + math.sqrt(max(disc, 0.0))) / 2.0
        return t

    for e in diagram.edges:
        car = e.carrier
        if isinstance(car, RaySeg) and math.isinf(car.t1):
            t_end = clip_param(car)
            cut = RaySeg(car.ax, car.ay, car.dx, car.dy, car.t0, t_end)
            q = cut.point_at(t_end)
            nodes.append(q)
            n1 = len(nodes) - 1
            n0 = e.v0 if e.v0 is not None else _panic_node(nodes, cut.point_at(car.t0))
            pieces.append(cut)
            ends.append((n0, n1))
            side_of.append(e.sites)
            piece_edge.append(e.id)
        else:
            n0 = e.v0
            n1 = e.v1
            if n0 is None or n1 is None:
                # bounded carrier with a missing endpoint should not happen
                continue
            pieces.append(car)
            ends.append((n0, n1))
            side_of.append(e.sites)
            piece_edge.append(e.id)

    # clip-circle arcs between consecutive boundary nodes
    boundary = [(math.atan2(nodes[i][1] - cy, nodes[i][0] - cx), i)
                for i in range(len(diagram.vertices), len(nodes))]
    boundary.sort()
    m = len(boundary)
    for k in range(m):
        a0, i0 = boundary[k]
        a1, i1 = boundary[(k + 1) % m]
        sweep = geom.canonicalize(a1 - a0)
        if sweep == 0.0 and m > 1:
            sweep = 0.0
        if m == 1:
            sweep = geom.TWO_PI
        pieces.append(Arc(cx, cy, R, a0, sweep if sweep > 0 else geom.TWO_PI))
        ends.append((i0, i1))
        side_of.append((None, None))
        piece_edge.append(None)

    # rotation system via probe bearings near each node
    out_ends: dict[int, list[tuple[float, int, int]]] = {}
    for pi, car in enumerate(pieces):
        for end in (0, 1):
            node = ends[pi][end]
            bearing = _end_bearing(car, end, tol)
            out_ends.setdefault(node, []).append((bearing, pi, end))
    for node in out_ends:
        out_ends[node].sort()

    # left-face orbits: next = clockwise predecessor of the reversed end
    next_of: dict[tuple[int, int], tuple[int, int]] = {}
    for pi in range(len(pieces)):
        for start_end in (0, 1):
            node = ends[pi][1 - start_end]  # arrival node when leaving from start_end
            fan = out_ends[node]
            rev_key = None
            for idx, (_, pj, ej) in enumerate(fan):
                if pj == pi and ej == 1 - start_end:
                    rev_key = idx
                    break
            nxt = fan[(rev_key - 1) % len(fan)]
            next_of[(pi, start_end)] = (nxt[1], nxt[2])

    seen: set[tuple[int, int]] = set()
    faces: list[Face] = []
    for start in next_of:
        if start in seen:
            continue
        orbit = []
        cur = start
        while cur not in seen:
            seen.add(cur)
            orbit.append(cur)
            cur = next_of[cur]
        owner: int | None = None
        bounded = True
        cycle: list[tuple[int, bool]] = []
        loop: list[Carrier] = []
        for pi, end in orbit:
            forward = end == 0
            sides = side_of[pi]
            s = sides[0] if forward else sides[1]
            if piece_edge[pi] is None:
                bounded = False
            else:
                cycle.append((piece_edge[pi], forward))
            if s is not None and owner is None:
                owner = s
            loop.append(pieces[pi])
        faces.append(Face(owner, cycle, bounded, loop))

    # drop the outer face (walks the clip circle with the outside on its left)
    faces = [f for f in faces if not (f.site is None and not f.bounded and not f.cycle)]
    diagram.faces = faces
    return faces


def _panic_node(nodes: list[Point], p: Point) -> int:
    nodes.append(p)
    return len(nodes) - 1


def _end_bearing(car: Carrier, end: int, tol: float) -> float:
    """Bearing of a short probe into the piece from one of its ends."""
    if isinstance(car, RaySeg):
        span = (car.t1 - car.t0) if not math.isinf(car.t1) else 1.0
        step = min(1e-5, 0.25 * span)
        base = car.t0 if end == 0 else car.t1
        t = base + step if end == 0 else base - step
        p0 = car.point_at(base)
        p1 = car.point_at(t)
    else:
        step = min(1e-5 / max(car.length(), 1e-12), 0.25)
        u = step if end == 0 else 1.0 - step
        p0 = car.point_at(0.0 if end == 0 else 1.0)
        p1 = car.point_at(u)
    return math.atan2(p1[1] - p0[1], p1[0] - p0[0])


# -- structure checks --------------------------------------------------------

def connected_components(diagram: Diagram, circular_only: bool = False) -> int:
    parent = list(range(len(diagram.vertices)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    used = set()
    for e in diagram.edges:
        if circular_only and e.kind != "circular":
            continue
        if e.v0 is None or e.v1 is None:
            if e.v0 is not None:
                used.add(e.v0)
            if e.v1 is not None:
                used.add(e.v1)
            continue
        used.add(e.v0)
        used.add(e.v1)
        ra, rb = find(e.v0), find(e.v1)
        if ra != rb:
            parent[ra] = rb
    roots = {find(v) for v in used}
    return len(roots) if roots else 0


def is_tree(diagram: Diagram) -> bool:
    """True when the circular-edge graph is acyclic and connected."""
    edges = [e for e in diagram.edges if e.kind == "circular"
             and e.v0 is not None and e.v1 is not None]
    verts = {e.v0 for e in edges} | {e.v1 for e in edges}
    if not edges:
        return True
    return connected_components(diagram, circular_only=True) == 1 and \
        len(edges) == len(verts) - 1


def is_forest(diagram: Diagram) -> bool:
    """True when the circular-edge graph is acyclic (components may connect
    through ray edges and infinity in an all-unbounded-faces diagram)."""
    edges = [e for e in diagram.edges if e.kind == "circular"
             and e.v0 is not None and e.v1 is not None]
    verts = {e.v0 for e in edges} | {e.v1 for e in edges}
    if not edges:
        return True
    comps = connected_components(diagram, circular_only=True)
    return len(edges) == len(verts) - comps


def diagram_isomorphic(d1: Diagram, d2: Diagram, tol: float = 1e-7) -> bool:
    """Vertex-coordinate-matched graph equality of two diagrams."""
    if len(d1.vertices) != len(d2.vertices):
        return False
    taken = [False] * len(d2.vertices)
    mapping: dict[int, int] = {}
    for v in d1.vertices:
        found = None
        for w in d2.vertices:
            if not taken[w.id] and abs(v.x - w.x) <= tol and abs(v.y - w.y) <= tol:
                found = w.id
                break
        if found is None:
            return False
        taken[found] = True
        mapping[v.id] = found

    def key(e: Edge, remap: dict[int, int] | None) -> tuple:
        a = e.v0 if remap is None else (None if e.v0 is None else remap[e.v0])
        b = e.v1 if remap is None else (None if e.v1 is None else remap[e.v1])
        a_k = -1 if a is None else a
        b_k = -1 if b is None else b
        lo, hi = min(a_k, b_k), max(a_k, b_k)
        return (lo, hi, frozenset(e.sites) - {None}, e.kind)

    k1 = sorted(key(e, mapping) for e in d1.edges)
    k2 = sorted(key(e, None) for e in d2.edges)
    return k1 == k2
