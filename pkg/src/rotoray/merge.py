"""Divide-and-conquer pipeline: rotated sub-diagrams and merge-curve tracing.

Every merge joins the diagrams of two runs of sites that are contiguous
along the polygon.  The merge curve enters along the first ray of the right
run (which lies in the last left region), walks the chain of circular edges
by the two-scan rule: the left region boundary is scanned clockwise and the
right one counterclockwise from the last position, the curve advancing to
whichever exit comes first, and leaves along the first ray of the left run.
Inside a clip polygon the curve instead runs corner to corner and consists
of circular edges only.

Degenerate multi-way ties (a regular polygon's center) appear as cascades
of zero-length advances: the tracer consumes one boundary crossing at a
time at the same point until a direction validates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import geom
from .bisector import bisector
from .carriers import Arc, Carrier, RaySeg, Seg, intersect
from .diagram import (V_APEX, V_MIXED, V_PROPER, Diagram, Edge, Vertex,
                      VertexPool)
from .errors import OpenChain, ParallelEdges, TraceStall
from .geom import (Point, Ray, angular_distance, canonicalize, cross, dist,
                   dot, perp, sub)

_FAR = 64.0


@dataclass
class _TraceState:
    site: int
    comp: int
    pos: int


class _Side:
    """One side of a merge: a diagram plus scan bookkeeping."""

    def __init__(self, diagram: Diagram, scan_ccw: bool):
        self.d = diagram
        self.scan_step = 1 if scan_ccw else -1
        self.sites = diagram.site_ids
        # position lookup: site -> edge id -> list of (comp, pos)
        self.pos_map: dict[int, dict[int, list[tuple[int, int]]]] = {}
        for s, comps in diagram.chains.items():
            m: dict[int, list[tuple[int, int]]] = {}
            for ci, comp in enumerate(comps):
                for pi, (eid, _) in enumerate(comp):
                    m.setdefault(eid, []).append((ci, pi))
            self.pos_map[s] = m

    def nearest(self, p: Point) -> tuple[int, float]:
        best, best_d = self.sites[0], angular_distance(p, self.d.rays[self.sites[0]])
        for s in self.sites[1:]:
            v = angular_distance(p, self.d.rays[s])
            if v < best_d:
                best, best_d = s, v
        return best, best_d

    def chain(self, site: int, comp: int):
        return self.d.chains[site][comp]

    def state_for_edge(self, site: int, eid: int) -> _TraceState:
        entries = self.pos_map[site].get(eid)
        if not entries:
            comps = self.d.chains.get(site, [[]])
            return _TraceState(site, 0, 0 if self.scan_step > 0 else
                               max(0, len(comps[0]) - 1))
        comp, pos = entries[0]
        return _TraceState(site, comp, pos)

    def state_anywhere(self, site: int) -> _TraceState:
        comps = self.d.chains.get(site, [[]])
        return _TraceState(site, 0, 0 if self.scan_step > 0 else
                           max(0, len(comps[0]) - 1))


@dataclass
class _Crossing:
    sweep: float
    point: Point
    eid: int | None       # crossed edge of the scanned diagram (None: arc end)
    new_owner: int | None
    state: _TraceState | None
    ray_site: int | None = None  # set when the crossed edge is a ray edge


def _span(car: Carrier) -> float:
    """Monotone along-carrier measure of one unit of parameter."""
    return abs(car.sweep) if isinstance(car, Arc) else 1.0


def _pair_arc(rays: list[Ray], a: int, b: int) -> Carrier:
    bis = bisector(rays[a], rays[b])
    if bis.arc is None or isinstance(bis.arc, tuple):
        raise ParallelEdges(f"pair ({a},{b}) has an unbounded bisector part")
    return bis.arc


class _Tracer:
    def __init__(self, left: Diagram, right: Diagram, clip=None):
        self.L = _Side(left, scan_ccw=False)   # scanned clockwise
        self.R = _Side(right, scan_ccw=True)   # scanned counterclockwise
        self.rays = left.rays
        self.clip = clip
        self.scale = max(left.scale, right.scale)
        self.tol = 1e-9 * self.scale
        self.step = 1e-6 * self.scale
        self.pieces: list[tuple[str, Carrier, tuple[int, int], Point, Point]] = []
        # splits: edge id (per input diagram side) -> list of points
        self.splits_L: dict[int, list[Point]] = {}
        self.splits_R: dict[int, list[Point]] = {}
        self.diagnostics: list[str] = []

    # -- owner-validity probes ------------------------------------------------

    def _valid_dir(self, car: Carrier, u: float, sign: float, l: int, rr: int) -> bool:
        du = sign * self.step / max(car.length(), self.step)
        u2 = u + du
        if not -1e-12 <= u2 <= 1.0 + 1e-12:
            return False
        q = car.point_at(u2)
        if self.clip is not None and not self.clip.contains(q, tol=-self.tol):
            return False
        sl, dl = self.L.nearest(q)
        sr, dr = self.R.nearest(q)
        return sl == l and sr == rr

    # -- crossing scans ---------------------------------------------------------

    def _scan_exit(self, side: _Side, state: _TraceState, car: Carrier,
                   u_cur: float, sign: float, skip_eid: int | None) -> _Crossing | None:
        """First crossing of the forward arc with the scanned region boundary.

        Edges are visited in the side's scan order (left clockwise, right
        counterclockwise) starting at the remembered position; by the
        no-backtrack property the exit comes up early, but every boundary
        edge is checked and the smallest arc sweep wins, which keeps the
        degenerate multi-tie cascades safe.
        """
        comp = side.chain(state.site, state.comp)
        n = len(comp)
        if n == 0:
            return None
        u_end = 1.0 if sign > 0 else 0.0
        sweep_cap = abs(u_end - u_cur) * _span(car)
        len_scale = max(car.length(), self.tol)
        zero_sweep = 10 * self.tol / len_scale * _span(car)

        best: _Crossing | None = None
        best_idx: int | None = None
        for k in range(n):
            idx = (state.pos + k * side.scan_step) % n
            eid, _ = comp[idx]
            e = side.d.edges[eid]
            for u_hit, _, p in intersect(car, e.carrier, tol=10 * self.tol):
                sweep = (u_hit - u_cur) * sign * _span(car)
                if sweep < -1e-7 or sweep > sweep_cap + 1e-12:
                    continue
                sweep = max(sweep, 0.0)
                # a grazing hit at the current point is never an exit: the
                # direction probe has already certified the step ahead stays
                # inside both regions (degenerate ties take the no-direction
                # path instead)
                if sweep <= zero_sweep:
                    continue
                if e.kind == "ray":
                    cand = _Crossing(sweep, p, eid, None, None,
                                     ray_site=e.sites[0])
                else:
                    other = e.sites[1] if e.sites[0] == state.site else e.sites[0]
                    if other == state.site or other is None:
                        continue
                    cand = _Crossing(sweep, p, eid, other, None)
                take = best is None or cand.sweep < best.sweep - 1e-9
                if not take and best is not None and \
                        abs(cand.sweep - best.sweep) <= 1e-9 and \
                        cand.ray_site is not None and best.ray_site is None:
                    take = True  # a ray hit at the same point is the exit
                if take:
                    best = cand
                    best_idx = idx
        if best is not None and best_idx is not None:
            best.state = _TraceState(state.site, state.comp, best_idx)
        return best

    # -- emit helpers -----------------------------------------------------------

    def _emit_arc(self, car: Arc, u0: float, u1: float, l: int, rr: int,
                  p0: Point, p1: Point) -> None:
        if abs(u1 - u0) * car.length() <= 10 * self.tol:
            return
        sub = car.subarc(u0, u1)
        mid = sub.point_at(0.5)
        nrm = perp(sub.tangent_at(0.5))
        q = (mid[0] + self.step * nrm[0], mid[1] + self.step * nrm[1])
        sl, dl = self.L.nearest(q)
        sr, dr = self.R.nearest(q)
        left = l if dl < dr else rr
        self.pieces.append(("circular", sub, (left, rr if left == l else l), p0, p1))

    def _emit_ray(self, ray_site: int, t0: float, t1: float, other: int,
                  other_on_cw: bool, p0: Point, p1: Point) -> None:
        r = self.rays[ray_site]
        car = RaySeg(r.apex[0], r.apex[1], r.dir[0], r.dir[1],
                     min(t0, t1), max(t0, t1))
        sides = (ray_site, other)
        self.pieces.append(("ray", car, sides, p0, p1))


def merge_diagrams(left: Diagram, right: Diagram, clip=None) -> Diagram:
    """Merge the diagrams of two polygon-contiguous runs of sites.

    Full-plane mode traces from infinity along the right run's first ray,
    through the circular chain, and out along the left run's first ray.
    With a clip polygon the curve is confined to the interior and runs from
    the corner between the runs to the opposite corner.  The merged diagram
    keeps each input's pieces on its own territory (probe-tested midpoints)
    and stitches in the traced pieces.
    """
    if not left.site_ids:
        return right
    if not right.site_ids:
        return left
    tr = _Tracer(left, right, clip)
    if clip is None:
        _trace_open(tr)
    else:
        _trace_clipped(tr)
    return _assemble(tr, left, right, clip)


def _start_owner_L(tr: _Tracer, rr1: int) -> int:
    r = tr.rays[rr1]
    far = _FAR * tr.scale
    return tr.L.nearest(r.point_at(far))[0]


def _trace_open(tr: _Tracer) -> None:
    rays = tr.rays
    rr1 = tr.R.sites[0]
    l1 = tr.L.sites[0]
    r_ray = rays[rr1]
    far = _FAR * tr.scale

    # entry: walk the right run's first ray inward from infinity
    l_cur = _start_owner_L(tr, rr1)
    t_cur = math.inf
    t_anchor = far
    guard = 0
    ray_car = RaySeg(r_ray.apex[0], r_ray.apex[1], r_ray.dir[0], r_ray.dir[1],
                     0.0, math.inf)
    while True:
        guard += 1
        if guard > 4 * len(tr.L.sites) + len(tr.R.sites) + 64:
            raise TraceStall("entry ray walk failed to terminate")
        best = None
        for comp in tr.L.d.chains.get(l_cur, []):
            for eid, _ in comp:
                e = tr.L.d.edges[eid]
                for t_hit, _, p in intersect(ray_car, e.carrier, tol=10 * tr.tol):
                    if t_hit <= 10 * tr.tol:
                        continue
                    if t_hit < (t_cur if not math.isinf(t_cur) else far) - 1e-9 \
                            and (best is None or t_hit > best[0]):
                        best = (t_hit, p, eid)
        if best is None:
            break
        t_hit, p, eid = best
        tr._emit_ray(rr1, t_hit, t_anchor if not math.isinf(t_cur) else far,
                     l_cur, True, p, r_ray.point_at(t_anchor))
        tr.splits_L.setdefault(eid, []).append(p)
        e = tr.L.d.edges[eid]
        l_cur = e.sites[1] if e.sites[0] == l_cur else e.sites[0]
        t_cur = t_hit
        t_anchor = t_hit
    tr._emit_ray(rr1, 0.0, t_anchor if not math.isinf(t_cur) else far,
                 l_cur, True, r_ray.apex, r_ray.point_at(t_anchor))

    # chain of circular edges from the right run's first apex
    end = _trace_chain(tr, start_pt=r_ray.apex, l0=l_cur, rr0=rr1,
                       stop_site=l1, stop_apex=None)
    if end is None:
        raise OpenChain("circular chain did not reach the left run's first ray")
    q_out, l_exit_t, rr_last = end

    # exit: walk the left run's first ray outward, crossing right structure
    l_ray = rays[l1]
    t_out = l_exit_t
    rr_cur = rr_last
    guard = 0
    exit_car = RaySeg(l_ray.apex[0], l_ray.apex[1], l_ray.dir[0], l_ray.dir[1],
                      0.0, math.inf)
    anchor_pt = q_out
    while True:
        guard += 1
        if guard > 4 * len(tr.R.sites) + 64:
            raise TraceStall("exit ray walk failed to terminate")
        best = None
        for comp in tr.R.d.chains.get(rr_cur, []):
            for eid, _ in comp:
                e = tr.R.d.edges[eid]
                for t_hit, _, p in intersect(exit_car, e.carrier, tol=10 * tr.tol):
                    if t_hit <= t_out + 1e-9:
                        continue
                    if best is None or t_hit < best[0]:
                        best = (t_hit, p, eid)
        if best is None:
            break
        t_hit, p, eid = best
        tr._emit_ray(l1, t_out, t_hit, rr_cur, True, anchor_pt, p)
        tr.splits_R.setdefault(eid, []).append(p)
        e = tr.R.d.edges[eid]
        rr_cur = e.sites[1] if e.sites[0] == rr_cur else e.sites[0]
        t_out = t_hit
        anchor_pt = p
    tr._emit_ray(l1, t_out, _FAR * tr.scale, rr_cur, True, anchor_pt,
                 l_ray.point_at(_FAR * tr.scale))


def _trace_clipped(tr: _Tracer) -> None:
    rr1 = tr.R.sites[0]
    l_last = tr.L.sites[-1]
    l1 = tr.L.sites[0]
    start = tr.rays[rr1].apex
    stop = tr.rays[l1].apex
    end = _trace_chain(tr, start_pt=start, l0=l_last, rr0=rr1,
                       stop_site=None, stop_apex=stop)
    if end is None:
        raise OpenChain("clipped merge curve did not reach the opposite corner")


def _trace_chain(tr: _Tracer, start_pt: Point, l0: int, rr0: int,
                 stop_site: int | None, stop_apex: Point | None):
    """Trace the circular part of the merge curve.

    Returns (exit point, exit ray parameter, right owner) when the curve hits
    the ray of stop_site (open mode), or (point, 0, rr) when it reaches
    stop_apex (clipped mode).  None signals a failed trace.
    """
    rays = tr.rays
    l, rr = l0, rr0
    p_cur = start_pt
    state_L = tr.L.state_anywhere(l)
    state_R = tr.R.state_anywhere(rr)
    budget = 8 * (len(tr.L.sites) + len(tr.R.sites)) + 64
    zero_guard = 0
    skip_L: int | None = None
    skip_R: int | None = None

    for _ in range(budget):
        if stop_apex is not None and dist(p_cur, stop_apex) <= 10 * tr.tol:
            return (p_cur, 0.0, rr)
        car = _pair_arc(rays, l, rr)
        u_cur = car.param_of(p_cur, tol=1e-6 * tr.scale)
        if u_cur is None:
            tr.diagnostics.append(f"trace point left carrier of ({l},{rr})")
            return None
        sign = None
        for s in (1.0, -1.0):
            if tr._valid_dir(car, u_cur, s, l, rr):
                sign = s
                break
        if sign is None:
            # zero-length advance: consume the boundary crossing at the point
            zero_guard += 1
            if zero_guard > budget:
                raise TraceStall(f"no valid direction at {p_cur} owners ({l},{rr})")
            adv = _advance_at_point(tr, p_cur, l, rr, state_L, state_R)
            if adv is None:
                raise TraceStall(f"stalled at {p_cur} owners ({l},{rr})")
            l, rr, state_L, state_R, skip_L, skip_R = adv
            continue
        zero_guard = 0
        cl = tr._scan_exit(tr.L, state_L, car, u_cur, sign, skip_L)
        cr = tr._scan_exit(tr.R, state_R, car, u_cur, sign, skip_R)
        u_end = 1.0 if sign > 0 else 0.0
        end_sweep = abs(u_end - u_cur) * _span(car)
        candidates = [c for c in (cl, cr) if c is not None]
        exit_c = min(candidates, key=lambda c: c.sweep) if candidates else None
        if exit_c is None or exit_c.sweep > end_sweep + 1e-12:
            # the arc runs out at an apex of l or rr before any crossing
            p_end = car.point_at(u_end)
            tr._emit_arc(car, u_cur, u_end, l, rr, p_cur, p_end)
            adv = _advance_at_point(tr, p_end, l, rr, state_L, state_R)
            if adv is None:
                raise TraceStall(f"arc ended with no continuation at {p_end}")
            p_cur = p_end
            l, rr, state_L, state_R, skip_L, skip_R = adv
            continue

        u_hit = u_cur + sign * exit_c.sweep / _span(car)
        p_hit = exit_c.point
        both = (cl is not None and cr is not None
                and abs(cl.sweep - cr.sweep) <= 1e-9)
        tr._emit_arc(car, u_cur, u_hit, l, rr, p_cur, p_hit)
        p_cur = p_hit
        if stop_apex is not None and dist(p_hit, stop_apex) <= 10 * tr.tol:
            return (p_hit, 0.0, rr)

        if (exit_c is cl or both) and cl is not None:
            if cl.ray_site is not None:
                if stop_site is not None and cl.ray_site == stop_site:
                    t_exit = dot(sub(p_hit, rays[stop_site].apex),
                                 rays[stop_site].dir)
                    tr.splits_L.setdefault(cl.eid, []).append(p_hit)
                    return (p_hit, t_exit, rr)
                raise TraceStall(
                    f"merge curve hit unexpected ray {cl.ray_site}")
            tr.splits_L.setdefault(cl.eid, []).append(p_hit)
            l = cl.new_owner
            state_L = tr.L.state_for_edge(l, cl.eid)
            skip_L = cl.eid
        if (exit_c is cr or both) and cr is not None:
            if cr.ray_site is not None:
                raise TraceStall(
                    f"merge curve hit unexpected right ray {cr.ray_site}")
            tr.splits_R.setdefault(cr.eid, []).append(p_hit)
            rr = cr.new_owner
            state_R = tr.R.state_for_edge(rr, cr.eid)
            skip_R = cr.eid
    raise TraceStall("chain trace budget exhausted")


def _advance_at_point(tr: _Tracer, p: Point, l: int, rr: int,
                      state_L: _TraceState, state_R: _TraceState):
    """Re-anchor the trace at a degenerate multi-way tie.

    At a point where several regions of either side concur (a regular
    polygon's center, or an apex passage), the curve continues along the
    bisector of some tied left site and some tied right site; probe every
    tied pair for a validating direction and split all input edges meeting
    the point so the assembly can stitch there.
    """
    rays = tr.rays

    def tied(side: _Side) -> list[int]:
        ds = [(angular_distance(p, rays[s]), s) for s in side.sites]
        dmin = min(d for d, _ in ds)
        return [s for d, s in ds if d - dmin <= 1e-6]

    ties_L = tied(tr.L)
    ties_R = tied(tr.R)
    for nl in ties_L:
        for nr in ties_R:
            if nl == l and nr == rr:
                continue
            try:
                car = _pair_arc(rays, nl, nr)
            except ParallelEdges:
                continue
            u = car.param_of(p, tol=1e-6 * tr.scale)
            if u is None:
                continue
            if not (tr._valid_dir(car, u, 1.0, nl, nr)
                    or tr._valid_dir(car, u, -1.0, nl, nr)):
                continue
            _split_all_at(tr, p)
            return (nl, nr, tr.L.state_anywhere(nl), tr.R.state_anywhere(nr),
                    None, None)
    return None


def _split_all_at(tr: _Tracer, p: Point) -> None:
    for side, splits in ((tr.L, tr.splits_L), (tr.R, tr.splits_R)):
        for e in side.d.edges:
            if e.kind != "circular":
                continue
            if e.carrier.param_of(p, tol=10 * tr.tol) is not None:
                splits.setdefault(e.id, []).append(p)


# -- assembly -------------------------------------------------------------------

def _assemble(tr: _Tracer, left: Diagram, right: Diagram, clip) -> Diagram:
    rays = tr.rays
    all_sites = list(left.site_ids) + list(right.site_ids)
    scale = tr.scale
    tol = 1e-9 * scale
    pool = VertexPool(tol)
    merged = Diagram(rays=rays, site_ids=all_sites, vertices=[], edges=[],
                     scale=scale,
                     polygon=list(clip.vertices) if clip is not None else None)
    merged.diagnostics.extend(tr.diagnostics)

    def other_min(p: Point, own_sites, others) -> float:
        return min(angular_distance(p, rays[s]) for s in others)

    piece_rows: list[tuple[str, Carrier, tuple[int, int]]] = []

    def keep_input(diagram: Diagram, splits: dict[int, list[Point]],
                   own: list[int], other: list[int]) -> None:
        for e in diagram.edges:
            if e.kind != "circular":
                continue
            cuts = sorted({_carrier_param(e.carrier, q, tol) for q in
                           splits.get(e.id, []) if
                           _carrier_param(e.carrier, q, tol) is not None})
            params = [_lo_param(e.carrier)] + list(cuts) + [_hi_param(e.carrier)]
            for a, b in zip(params, params[1:]):
                if b - a <= 0:
                    continue
                piece = _sub(e.carrier, a, b)
                if _piece_len(piece) <= 10 * tol:
                    continue
                m = _mid(piece)
                # hair-thin corner structure may straddle the boundary within
                # probe tolerance; clip with matching slack
                if clip is not None and not clip.contains(m, tol=-1e-6 * scale):
                    continue
                own_val = angular_distance(m, rays[e.sites[0]])
                if other and other_min(m, own, other) < own_val - 1e-9 \
                        - tol / max(dist(m, rays[e.sites[0]].apex), tol):
                    continue
                piece_rows.append(("circular", piece, e.sites))

    keep_input(left, tr.splits_L, left.site_ids, right.site_ids)
    keep_input(right, tr.splits_R, right.site_ids, left.site_ids)
    for kind, car, sides, _, _ in tr.pieces:
        if kind != "circular":
            continue
        if clip is not None:
            m = _mid(car)
            if not clip.contains(m, tol=-10 * tol):
                continue
        piece_rows.append(("circular", car, sides))

    # ray edges: rebuilt from scratch in full-plane mode, polygon boundary
    # pieces in clipped mode
    eid = 0
    edges: list[Edge] = []
    for kind, car, sides in piece_rows:
        p0 = _endpoint(car, 0)
        p1 = _endpoint(car, 1)
        v0 = pool.add(p0, V_PROPER, tuple(s for s in sides if s is not None), 0.0)
        v1 = pool.add(p1, V_PROPER, tuple(s for s in sides if s is not None), 0.0)
        edges.append(Edge(eid, "circular", sides, car, v0, v1))
        eid += 1

    if clip is None:
        eid = _rebuild_rays(merged, rays, all_sites, edges, pool, eid, scale, tol,
                            left, right, tr)
        merged.edges = edges
        _set_vertex_meta(merged, pool, rays, all_sites)
        _build_open_chains(merged)
    else:
        merged.edges = edges
        _close_with_polygon(merged, clip, pool)
        _set_vertex_meta(merged, pool, rays, all_sites)
        from .polygon import _build_chains
        _build_chains(merged)
    return merged


def _carrier_param(car: Carrier, p: Point, tol: float) -> float | None:
    return car.param_of(p, tol=1e4 * tol)


def _lo_param(car: Carrier) -> float:
    return car.t0 if isinstance(car, RaySeg) else 0.0


def _hi_param(car: Carrier) -> float:
    return car.t1 if isinstance(car, RaySeg) else 1.0


def _sub(car: Carrier, a: float, b: float) -> Carrier:
    if isinstance(car, RaySeg):
        return RaySeg(car.ax, car.ay, car.dx, car.dy, a, b)
    return car.subarc(a, b)


def _piece_len(car: Carrier) -> float:
    if isinstance(car, RaySeg):
        return car.t1 - car.t0 if not math.isinf(car.t1) else math.inf
    return car.length()


def _mid(car: Carrier) -> Point:
    if isinstance(car, RaySeg):
        t = car.t0 + 1.0 if math.isinf(car.t1) else 0.5 * (car.t0 + car.t1)
        return car.point_at(t)
    return car.point_at(0.5)


def _endpoint(car: Carrier, which: int) -> Point:
    if isinstance(car, RaySeg):
        return car.point_at(car.t0 if which == 0 else car.t1)
    return car.point_at(0.0 if which == 0 else 1.0)


def _rebuild_rays(merged, rays, all_sites, edges, pool, eid, scale, tol,
                  left, right, tr) -> int:
    far = _FAR * scale
    for s in all_sites:
        r = rays[s]
        ray_line = RaySeg(r.apex[0], r.apex[1], r.dir[0], r.dir[1], 0.0, math.inf)
        ts = {0.0}
        for e in edges:
            for which in (0, 1):
                p = _endpoint(e.carrier, which)
                t = ray_line.param_of(p, tol=100 * tol)
                if t is not None and t > 10 * tol:
                    ts.add(t)
        stops = sorted(ts)
        nrm = perp(r.dir)
        for a, b in zip(stops, stops[1:] + [math.inf]):
            if b - a <= 10 * tol and not math.isinf(b):
                continue
            mid_t = a + 1.0 if math.isinf(b) else 0.5 * (a + b)
            q = r.point_at(mid_t)
            qq = (q[0] - 1e-6 * scale * nrm[0], q[1] - 1e-6 * scale * nrm[1])
            cw_owner = min(all_sites,
                           key=lambda m: angular_distance(qq, rays[m]))
            v0 = pool.add(r.point_at(a), V_APEX if a == 0.0 else V_MIXED,
                          (s,), 0.0)
            v1 = None if math.isinf(b) else pool.add(r.point_at(b), V_MIXED,
                                                     (s,), 0.0)
            edges.append(Edge(eid, "ray", (s, cw_owner),
                              RaySeg(r.apex[0], r.apex[1], r.dir[0], r.dir[1],
                                     a, b), v0, v1))
            eid += 1
    return eid


def _close_with_polygon(merged: Diagram, clip, pool: VertexPool) -> None:
    n = len(clip.vertices)
    eid = len(merged.edges)
    leaf = [pool.add(clip.vertices[i], V_APEX, (i, (i - 1) % n), 0.0)
            for i in range(n)]
    for i in range(n):
        a = clip.vertices[i]
        b = clip.vertices[(i + 1) % n]
        d = geom.unit(sub(b, a))
        car = RaySeg(a[0], a[1], d[0], d[1], 0.0, dist(a, b))
        merged.edges.append(Edge(eid, "ray", (i, None), car,
                                 leaf[i], leaf[(i + 1) % n]))
        eid += 1


def _set_vertex_meta(merged: Diagram, pool: VertexPool, rays, sites) -> None:
    merged.vertices = pool.vertices
    for v in merged.vertices:
        ds = sorted((angular_distance(v.point, rays[s]), s) for s in sites)
        v.distance = ds[0][0]
        near = [s for d, s in ds if d - ds[0][0] <= 1e-7]
        if len(near) >= 3:
            v.kind = V_PROPER
        v.sites = tuple(near[:4]) if near else v.sites


def _build_open_chains(merged: Diagram) -> None:
    """Ordered boundary chains per region for a full-plane tree diagram."""
    out_map: dict[tuple[int, int], list[tuple[int, bool]]] = {}
    starts: dict[int, list[tuple[int, bool]]] = {}
    for e in merged.edges:
        for site, fwd in ((e.sites[0], True), (e.sites[1], False)):
            if site is None:
                continue
            v_from = e.v0 if fwd else e.v1
            if v_from is None:
                starts.setdefault(site, []).append((e.id, fwd))
            else:
                out_map.setdefault((site, v_from), []).append((e.id, fwd))
    chains: dict[int, list[list[tuple[int, bool]]]] = {}
    for site in merged.site_ids:
        comps: list[list[tuple[int, bool]]] = []
        used: set[tuple[int, bool]] = set()

        def walk(first: tuple[int, bool]) -> list[tuple[int, bool]]:
            comp = [first]
            used.add(first)
            cur = first
            guard = 0
            while guard < 4 * len(merged.edges) + 8:
                guard += 1
                e = merged.edges[cur[0]]
                head = e.v1 if cur[1] else e.v0
                if head is None:
                    break
                options = [o for o in out_map.get((site, head), [])
                           if o not in used and o[0] != cur[0]]
                if not options:
                    # allow doubling back along the same ray edge (slit walk)
                    options = [o for o in out_map.get((site, head), [])
                               if o not in used]
                if not options:
                    break
                nxt = _pick_continuation(merged, cur, options, head)
                used.add(nxt)
                comp.append(nxt)
                cur = nxt
            return comp

        for first in starts.get(site, []):
            if first in used:
                continue
            comps.append(walk(first))
        # leftovers (defensive): cycles or disconnected bits
        for e in merged.edges:
            for fwd in (True, False):
                key = (e.id, fwd)
                s = e.sites[0] if fwd else e.sites[1]
                if s == site and key not in used:
                    comps.append(walk(key))
        chains[site] = comps
    merged.chains = chains


def _pick_continuation(merged: Diagram, cur, options, head_v):
    if len(options) == 1:
        return options[0]
    # pick the sharpest clockwise turn: boundary of a region walked ccw
    e = merged.edges[cur[0]]
    in_bear = _end_bearing_of(e, cur[1], incoming=True)
    best = None
    for o in options:
        ob = _end_bearing_of(merged.edges[o[0]], o[1], incoming=False)
        turn = canonicalize(ob - in_bear - math.pi)
        key = turn
        if best is None or key > best[0]:
            best = (key, o)
    return best[1]


def _end_bearing_of(e: Edge, fwd: bool, incoming: bool) -> float:
    car = e.carrier
    if isinstance(car, RaySeg):
        t0, t1 = car.t0, (car.t1 if not math.isinf(car.t1) else car.t0 + 1.0)
        u = t1 if fwd else t0
        step = min(1e-6, 0.25 * (t1 - t0)) or 1e-6
        q0 = car.point_at(u)
        q1 = car.point_at(u - step if fwd else u + step)
    else:
        u = 1.0 if fwd else 0.0
        step = min(1e-6 / max(car.length(), 1e-9), 0.25)
        q0 = car.point_at(u)
        q1 = car.point_at(u - step if fwd else u + step)
    if incoming:
        return math.atan2(q0[1] - q1[1], q0[0] - q1[0])
    return math.atan2(q1[1] - q0[1], q1[0] - q0[0])


# -- per-class construction ------------------------------------------------------

def single_ray_diagram(rays: list[Ray], site: int, scale: float) -> Diagram:
    r = rays[site]
    d = Diagram(rays=rays, site_ids=[site], vertices=[], edges=[], scale=scale)
    pool = VertexPool(1e-9 * scale)
    v0 = pool.add(r.apex, V_APEX, (site,), 0.0)
    d.vertices = pool.vertices
    d.edges = [Edge(0, "ray", (site, site),
                    RaySeg(r.apex[0], r.apex[1], r.dir[0], r.dir[1], 0.0,
                           math.inf), v0, None)]
    d.chains = {site: [[(0, False), (0, True)]]}
    return d


def build_subdiagram(rays: list[Ray], run: list[int],
                     scale: float | None = None) -> Diagram:
    """Full-plane diagram of one rotated direction class.

    Divide and conquer over the polygon-order run, merging halves with the
    same merge primitive as the cross-class phases; O(k log k) overall.
    """
    if scale is None:
        scale = geom.input_scale([rays[i].apex for i in run] or [(0.0, 0.0)])
    if not run:
        return Diagram(rays=rays, site_ids=[], vertices=[], edges=[],
                       scale=scale)
    if len(run) == 1:
        return single_ray_diagram(rays, run[0], scale)
    mid = len(run) // 2
    left = build_subdiagram(rays, run[:mid], scale)
    right = build_subdiagram(rays, run[mid:], scale)
    return merge_diagrams(left, right)


def build_pvd_splitmerge(P) -> Diagram:
    """Split, rotate, construct, and merge; equals the collapse diagram.

    The rays are quartered by direction, rotated a quarter turn clockwise
    (bisecting circles are invariant), each class diagram is built by divide
    and conquer, the W+S and N+E halves are merged in the plane, and the
    final merge is clipped to the polygon.  Distances are reported for the
    original, unrotated rays.
    """
    from .polygon import (DirTag, rays_of_polygon, rotate_rays,
                          split_by_direction)

    rays = rays_of_polygon(P)
    rot = [geom.rotate_ray(r, -math.pi / 2.0) for r in rays]
    classes = split_by_direction(rays)
    scale = P.scale

    subs = {tag: build_subdiagram(rot, classes[tag].ids, scale)
            for tag in (DirTag.E, DirTag.N, DirTag.W, DirTag.S)}
    ws = merge_diagrams(subs[DirTag.W], subs[DirTag.S])
    ne = merge_diagrams(subs[DirTag.E], subs[DirTag.N])
    final = merge_diagrams(ws, ne, clip=P)

    # report for the unrotated rays
    final.rays = rays
    for v in final.vertices:
        v.distance = min(angular_distance(v.point, r) for r in rays)
    from .polygon import _brocard_from_pvd
    final.brocard = _brocard_from_pvd(final)
    return final
