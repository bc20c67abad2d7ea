"""Diagrams restricted to 1-D domains as lower envelopes.

A domain is a line, a circle, or a convex polygon boundary.  Each site
contributes partially defined distance functions over the domain parameter,
split where the site's ray crosses the curve (the 2*pi discontinuity) and,
for sites outside a closed convex curve, clipped to the visible portion.
The envelope is merged divide-and-conquer; pairwise breakpoints come from
intersecting the pair's bisecting-circle carrier with the domain, confirmed
and polished by bisection on the distance difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import geom
from .carriers import Arc, Carrier, RaySeg, Seg, intersect
from .diagram import BrocardResult
from .errors import ApexOnCurve
from .geom import (TWO_PI, Point, Ray, angular_distance, canonicalize, cross,
                   dist, dot, sub, unit)

#: half-extent of the finite window representing an unbounded line domain
LINE_WINDOW = 64.0

INSIDE = "inside"
OUTSIDE = "outside"
UNRESTRICTED = "unrestricted"


@dataclass(frozen=True)
class CurveDomain:
    """Line, circle, or convex-polygon boundary with a 1-D parametrization.

    Lines use signed arc length; closed curves use normalized arc length in
    [0, 1) with C(0) = C(1).
    """

    kind: str  # "line" | "circle" | "polygon"
    origin: Point = (0.0, 0.0)
    direction: Point = (1.0, 0.0)
    center: Point = (0.0, 0.0)
    radius: float = 1.0
    vertices: tuple[Point, ...] = ()

    @staticmethod
    def line(origin: Point, direction: Point) -> "CurveDomain":
        return CurveDomain("line", origin=tuple(origin), direction=unit(direction))

    @staticmethod
    def line_from_coeffs(a: float, b: float, c: float) -> "CurveDomain":
        """Line a*x + b*y = c, parametrized along (b, -a)."""
        n = math.hypot(a, b)
        if n < 1e-15:
            raise ValueError("degenerate line coefficients")
        origin = (a * c / (n * n), b * c / (n * n))
        return CurveDomain.line(origin, (b / n, -a / n))

    @staticmethod
    def circle(center: Point, radius: float) -> "CurveDomain":
        if radius <= 0:
            raise ValueError("radius must be positive")
        return CurveDomain("circle", center=tuple(center), radius=float(radius))

    @staticmethod
    def polygon(vertices) -> "CurveDomain":
        pts = tuple((float(p[0]), float(p[1])) for p in vertices)
        n = len(pts)
        if n < 3:
            raise ValueError("polygon needs at least three vertices")
        area2 = sum(cross(pts[i], pts[(i + 1) % n]) for i in range(n))
        if area2 <= 0:
            raise ValueError("polygon must be counterclockwise")
        return CurveDomain("polygon", vertices=pts)

    @property
    def closed(self) -> bool:
        return self.kind != "line"

    @property
    def span(self) -> tuple[float, float]:
        if self.kind == "line":
            w = LINE_WINDOW * self.scale
            return (-w, w)
        return (0.0, 1.0)

    @property
    def scale(self) -> float:
        if self.kind == "line":
            return geom.input_scale([self.origin])
        if self.kind == "circle":
            return geom.input_scale([self.center]) + self.radius
        return geom.input_scale(list(self.vertices))

    @property
    def total_length(self) -> float:
        if self.kind == "circle":
            return TWO_PI * self.radius
        if self.kind == "polygon":
            n = len(self.vertices)
            return sum(dist(self.vertices[i], self.vertices[(i + 1) % n])
                       for i in range(n))
        return math.inf

    def point_at(self, t: float) -> Point:
        if self.kind == "line":
            return (self.origin[0] + t * self.direction[0],
                    self.origin[1] + t * self.direction[1])
        if self.kind == "circle":
            a = TWO_PI * (t % 1.0)
            return (self.center[0] + self.radius * math.cos(a),
                    self.center[1] + self.radius * math.sin(a))
        t = t % 1.0
        target = t * self.total_length
        n = len(self.vertices)
        acc = 0.0
        for i in range(n):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % n]
            L = dist(a, b)
            if target <= acc + L or i == n - 1:
                u = (target - acc) / L
                return (a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]))
            acc += L
        return self.vertices[0]

    def pieces(self) -> list[tuple[Carrier, float, float]]:
        """(carrier, t at carrier param 0, t-span of the carrier)."""
        if self.kind == "line":
            w = LINE_WINDOW * self.scale
            p0 = self.point_at(-w)
            p1 = self.point_at(w)
            return [(Seg(p0[0], p0[1], p1[0], p1[1]), -w, 2 * w)]
        if self.kind == "circle":
            return [(Arc(self.center[0], self.center[1], self.radius, 0.0, TWO_PI),
                     0.0, 1.0)]
        out = []
        n = len(self.vertices)
        total = self.total_length
        acc = 0.0
        for i in range(n):
            a = self.vertices[i]
            b = self.vertices[(i + 1) % n]
            L = dist(a, b)
            out.append((Seg(a[0], a[1], b[0], b[1]), acc / total, L / total))
            acc += L
        return out

    def params_of_carrier_hits(self, car: Carrier, tol: float = 1e-9) -> list[float]:
        """Domain parameters where a carrier crosses the curve."""
        out = []
        for piece, t0, tspan in self.pieces():
            for _, u_piece, _ in intersect(car, piece, tol):
                out.append(t0 + u_piece * tspan)
        return sorted(out)

    def ray_crossings(self, r: Ray, tol: float = 1e-9) -> list[float]:
        """Parameters where the (closed) half-line meets the curve.

        The apex itself counts: the distance profile is discontinuous there
        too when the curve runs through it (a line through a site's apex).
        """
        car = RaySeg(r.apex[0], r.apex[1], r.dir[0], r.dir[1], 0.0, math.inf)
        ts = []
        for piece, t0, tspan in self.pieces():
            for u_piece, t_ray, _ in intersect(piece, car, tol):
                if t_ray > -tol:
                    ts.append(t0 + u_piece * tspan)
        return sorted(ts)

    def contains_point(self, p: Point) -> bool:
        """Interior test for closed domains."""
        if self.kind == "circle":
            return dist(p, self.center) < self.radius
        if self.kind == "polygon":
            n = len(self.vertices)
            for i in range(n):
                a = self.vertices[i]
                b = self.vertices[(i + 1) % n]
                if cross(sub(b, a), sub(p, a)) <= 0:
                    return False
            return True
        return False

    def visible_interval(self, apex: Point, tol: float = 1e-9) -> tuple[float, float]:
        """Parameter interval (wrapping allowed) visible from an outside apex."""
        if self.kind == "circle":
            d = dist(apex, self.center)
            if d <= self.radius + tol:
                raise ApexOnCurve("apex not strictly outside the circle")
            beta = math.atan2(apex[1] - self.center[1], apex[0] - self.center[0])
            gamma = math.acos(self.radius / d)
            return (canonicalize(beta - gamma) / TWO_PI,
                    canonicalize(beta + gamma) / TWO_PI)
        if self.kind == "polygon":
            n = len(self.vertices)
            total = self.total_length
            vis = []
            for i in range(n):
                a = self.vertices[i]
                b = self.vertices[(i + 1) % n]
                vis.append(cross(sub(b, a), sub(apex, a)) < -tol)
            if all(vis):
                raise ApexOnCurve("apex appears inside or on the polygon")
            if not any(vis):
                raise ApexOnCurve("no visible edge; apex inside the polygon")
            # the visible edges form one contiguous cyclic run
            start = next(i for i in range(n) if vis[i] and not vis[(i - 1) % n])
            k = start
            count = 0
            while vis[k % n]:
                count += 1
                k += 1
            acc = [0.0]
            for i in range(n):
                a = self.vertices[i]
                b = self.vertices[(i + 1) % n]
                acc.append(acc[-1] + dist(a, b))
            t_start = acc[start] / total
            t_end = acc[start + count] / total if start + count <= n else \
                (acc[n] + acc[start + count - n]) / total
            return (t_start, t_end % 1.0 if t_end >= 1.0 else t_end)
        raise ValueError("visibility applies to closed domains only")


@dataclass
class PartialFunction:
    """One continuity piece of a site's distance function over the domain."""

    site: int
    t0: float
    t1: float
    breakpoints: list[tuple[float, str]] = field(default_factory=list)


@dataclass
class EnvelopePiece:
    t0: float
    t1: float
    site: int | None  # None encodes +infinity (not visible / no site)


@dataclass
class Envelope:
    domain: CurveDomain
    rays: list[Ray]
    pieces: list[EnvelopePiece]
    breakpoints: list[tuple[float, str]] = field(default_factory=list)

    def value(self, t: float) -> float:
        s = self.owner(t)
        if s is None:
            return math.inf
        return angular_distance(self.domain.point_at(t), self.rays[s])

    def owner(self, t: float) -> int | None:
        for p in self.pieces:
            if p.t0 - 1e-12 <= t <= p.t1 + 1e-12:
                return p.site
        return None


def partial_functions(rays: list[Ray], domain: CurveDomain,
                      side: str = UNRESTRICTED) -> list[PartialFunction]:
    """Split each site's distance function at its discontinuities.

    side="inside" asserts all apices interior to a closed domain (functions
    are total); side="outside" additionally restricts each function to the
    portion of the curve visible from the apex, with the visibility bounds
    recorded as breakpoints.
    """
    if side not in (INSIDE, OUTSIDE, UNRESTRICTED):
        raise ValueError(f"unknown side: {side}")
    if side in (INSIDE, OUTSIDE) and not domain.closed:
        raise ValueError("inside/outside modes need a closed domain")
    lo, hi = domain.span
    tol = 1e-9 * domain.scale
    out: list[PartialFunction] = []
    for sid, r in enumerate(rays):
        if domain.kind != "line" and _on_curve(domain, r.apex, tol):
            raise ApexOnCurve(f"apex of site {sid} lies on the domain curve")
        if side == INSIDE and not domain.contains_point(r.apex):
            raise ValueError(f"apex of site {sid} is not inside the domain")
        if side == OUTSIDE and domain.contains_point(r.apex):
            raise ValueError(f"apex of site {sid} is not outside the domain")
        cuts: list[tuple[float, str]] = [(t, "ray_crossing")
                                         for t in domain.ray_crossings(r, tol)]
        if side == OUTSIDE:
            va, vb = domain.visible_interval(r.apex, tol)
            segs = [(va, vb)] if va <= vb else [(0.0, vb), (va, 1.0)]
            vis_marks = [(va, "visibility_start"), (vb, "visibility_end")]
        else:
            segs = [(lo, hi)]
            vis_marks = []
        for a, b in segs:
            inner = sorted(t for t, _ in cuts if a < t < b)
            bounds = [a] + inner + [b]
            for q0, q1 in zip(bounds, bounds[1:]):
                if q1 - q0 <= 1e-12:
                    continue
                marks = [(t, k) for t, k in cuts + vis_marks if q0 <= t <= q1]
                out.append(PartialFunction(sid, q0, q1, marks))
    return out


def _on_curve(domain: CurveDomain, p: Point, tol: float) -> bool:
    for piece, _, _ in domain.pieces():
        if piece.dist_to(p) <= tol:
            return True
    return False


def lower_envelope(fs: list[PartialFunction], domain: CurveDomain,
                   rays: list[Ray]) -> Envelope:
    """Divide-and-conquer envelope of partially defined distance functions.

    Domain parameters where any input function is discontinuous stay piece
    boundaries at every merge level: inside a merge cell both candidate
    functions must be continuous or the pairwise root search is meaningless.
    """
    if not fs:
        raise ValueError("need at least one partial function")
    lo, hi = domain.span
    hard = sorted({f.t0 for f in fs} | {f.t1 for f in fs} | {lo, hi})

    def is_hard(t: float) -> bool:
        import bisect
        i = bisect.bisect_left(hard, t - 1e-11)
        return i < len(hard) and abs(hard[i] - t) <= 1e-11

    def base(f: PartialFunction) -> list[EnvelopePiece]:
        pieces = []
        if f.t0 > lo:
            pieces.append(EnvelopePiece(lo, f.t0, None))
        pieces.append(EnvelopePiece(f.t0, f.t1, f.site))
        if f.t1 < hi:
            pieces.append(EnvelopePiece(f.t1, hi, None))
        return pieces

    def push(out: list[EnvelopePiece], piece: EnvelopePiece) -> None:
        if out and out[-1].site == piece.site and \
                abs(out[-1].t1 - piece.t0) <= 1e-12 and not is_hard(piece.t0):
            out[-1] = EnvelopePiece(out[-1].t0, piece.t1, piece.site)
        else:
            out.append(piece)

    def merge(A: list[EnvelopePiece], B: list[EnvelopePiece]) -> list[EnvelopePiece]:
        cuts = sorted({lo, hi} |
                      {p.t0 for p in A} | {p.t1 for p in A} |
                      {p.t0 for p in B} | {p.t1 for p in B} |
                      set(hard))
        out: list[EnvelopePiece] = []
        for a, b in zip(cuts, cuts[1:]):
            if b - a <= 1e-15:
                continue
            sa = _owner_at(A, 0.5 * (a + b))
            sb = _owner_at(B, 0.5 * (a + b))
            for piece in _merge_cell(a, b, sa, sb, domain, rays):
                push(out, piece)
        return out

    def rec(items: list[PartialFunction]) -> list[EnvelopePiece]:
        if len(items) == 1:
            return base(items[0])
        mid = len(items) // 2
        return merge(rec(items[:mid]), rec(items[mid:]))

    pieces = rec(list(fs))
    env = Envelope(domain, list(rays), pieces)
    env.breakpoints = _collect_breakpoints(env, fs)
    return env


def _owner_at(pieces: list[EnvelopePiece], t: float) -> int | None:
    for p in pieces:
        if p.t0 - 1e-15 <= t <= p.t1 + 1e-15:
            return p.site
    return None


def _merge_cell(a: float, b: float, sa: int | None, sb: int | None,
                domain: CurveDomain, rays: list[Ray]) -> list[EnvelopePiece]:
    if sa is None and sb is None:
        return [EnvelopePiece(a, b, None)]
    if sa is None or sb is None or sa == sb:
        return [EnvelopePiece(a, b, sa if sb is None else sb)]

    def g(t: float) -> float:
        p = domain.point_at(t)
        return angular_distance(p, rays[sa]) - angular_distance(p, rays[sb])

    roots = _pair_roots(sa, sb, a, b, domain, rays, g)
    bounds = [a] + roots + [b]
    out = []
    for q0, q1 in zip(bounds, bounds[1:]):
        if q1 - q0 <= 1e-15:
            continue
        mid = 0.5 * (q0 + q1)
        owner = sa if g(mid) <= 0 else sb
        out.append(EnvelopePiece(q0, q1, owner))
    return out


def _pair_roots(sa: int, sb: int, a: float, b: float, domain: CurveDomain,
                rays: list[Ray], g) -> list[float]:
    """Equal-distance parameters of two sites inside (a, b).

    Geometric candidates come from intersecting the pair's bisector carrier
    with the curve; each one is confirmed by a local sign change and polished
    by bisection.  A sign flip across the whole cell with no geometric
    candidate is bracketed directly as a safety net.
    """
    from .plane import _pair_pieces

    cands = []
    for car in _pair_pieces(rays[sa], rays[sb]):
        for t in domain.params_of_carrier_hits(car, tol=1e-9 * domain.scale):
            if a + 1e-12 < t < b - 1e-12:
                cands.append(t)
    cands.sort()
    roots = []
    marks = [a] + cands + [b]
    for i in range(1, len(marks) - 1):
        t = marks[i]
        left = 0.5 * (marks[i - 1] + t)
        right = 0.5 * (t + marks[i + 1])
        if g(left) == 0.0 or g(right) == 0.0:
            roots.append(t)
            continue
        if (g(left) < 0) != (g(right) < 0):
            roots.append(_bisect(g, left, right))
    # safety net: an odd number of crossings must flip the cell's sign
    if not roots and (g(a + 1e-12) < 0) != (g(b - 1e-12) < 0):
        roots.append(_bisect(g, a + 1e-12, b - 1e-12))
    return sorted(roots)


def _bisect(g, lo: float, hi: float) -> float:
    glo = g(lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm < 0) == (glo < 0):
            lo = mid
            glo = gm
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def _collect_breakpoints(env: Envelope, fs: list[PartialFunction]):
    marks = []
    for p, q in zip(env.pieces, env.pieces[1:]):
        kind = "bisector"
        if p.site is None or q.site is None:
            kind = "visibility"
        else:
            for f in fs:
                if f.site in (p.site, q.site):
                    for t, k in f.breakpoints:
                        if abs(t - p.t1) <= 1e-9:
                            kind = "discontinuity" if k == "ray_crossing" else "visibility"

        marks.append((p.t1, kind))
    if env.domain.closed and env.pieces and \
            env.pieces[0].site == env.pieces[-1].site:
        marks.append((env.pieces[0].t0, "wrap"))
    return marks


def brocard_curve(env: Envelope) -> BrocardResult:
    """Largest nearest-site distance over the domain, with its witness.

    Per piece the value is monotone or unimodal, so the supremum sits at a
    piece endpoint (one-sided limits at discontinuities) or at the single
    interior critical point, found by derivative-sign bisection; line
    domains additionally contribute their two at-infinity limits.
    """
    domain = env.domain
    rays = env.rays
    span = domain.span[1] - domain.span[0]
    delta = 1e-9 * span
    best: tuple[float, float, int | None, bool] | None = None  # (val, t, site, attained)

    def consider(val: float, t: float, site: int | None, attained: bool):
        nonlocal best
        if math.isfinite(val) and (best is None or val > best[0]):
            best = (val, t, site, attained)

    def val_at(site: int, t: float) -> float:
        return angular_distance(domain.point_at(t), rays[site])

    for p in env.pieces:
        if p.site is None:
            continue
        t0, t1 = p.t0 + delta, p.t1 - delta
        if t1 < t0:
            t0 = t1 = 0.5 * (p.t0 + p.t1)
        v0, v1 = val_at(p.site, t0), val_at(p.site, t1)
        consider(v0, t0, p.site, _attained_at(env, p, p.t0, v0))
        consider(v1, t1, p.site, _attained_at(env, p, p.t1, v1))
        d0 = val_at(p.site, min(t0 + delta, t1)) - v0
        d1 = v1 - val_at(p.site, max(t1 - delta, t0))
        if d0 > 0 and d1 < 0:  # rises then falls: one interior maximum
            t_star = _extremum(lambda t: val_at(p.site, t), t0, t1)
            consider(val_at(p.site, t_star), t_star, p.site, True)

    if domain.kind == "line":
        for u in (domain.direction, (-domain.direction[0], -domain.direction[1])):
            lim = min(_limit_at_infinity(r, u, domain) for r in rays)
            if best is None or lim > best[0] + 1e-12:
                best = (lim, math.inf if u == domain.direction else -math.inf,
                        None, False)

    if best is None:
        raise ValueError("empty envelope")
    val, t, site, attained = best
    return BrocardResult(angle=val, witness_kind="curve_param",
                         point=None if math.isinf(t) else domain.point_at(t),
                         param=t, witness_sites=(site,) if site is not None else (),
                         attained=attained)


def _attained_at(env: Envelope, piece: EnvelopePiece, t_end: float,
                 val: float) -> bool:
    """A supremum at a 2*pi-side discontinuity endpoint is not attained."""
    p_end = env.domain.point_at(t_end)
    d_exact = angular_distance(p_end, env.rays[piece.site])
    return abs(d_exact - val) < 0.5  # same branch: genuine value at the end


def _extremum(f, lo: float, hi: float) -> float:
    h = 1e-9 * max(1.0, abs(hi - lo))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid + h) - f(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-10 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def _limit_at_infinity(r: Ray, u: Point, domain: CurveDomain) -> float:
    """Limit of the distance to r along the line toward direction u.

    Far out, the bearing from the apex tends to u; if the site points along
    u exactly, the bearing approaches from the apex's side of the line and
    the limit is 0 or 2*pi accordingly.
    """
    base = geom.ccw_angle(r.dir, u)
    if 1e-12 < base < TWO_PI - 1e-12:
        return base
    off = cross(u, sub(r.apex, domain.origin))
    return TWO_PI if off > 0 else 0.0
