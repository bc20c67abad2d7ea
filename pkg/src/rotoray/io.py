"""Instance and diagram files: versioned JSON, deterministic and lossless.

Floats are serialized with repr (17 significant digits) so identical runs
give byte-identical output; vertices are ordered by (distance, x, y) and
edges by endpoint ids, with ids remapped to the sorted order.
"""

from __future__ import annotations

import json
import math
from typing import TextIO

from .carriers import Arc, RaySeg, Seg
from .diagram import BrocardResult, Diagram
from .envelope import CurveDomain, Envelope
from .geom import Ray, make_ray

SCHEMA_VERSION = "1"


class InstanceError(ValueError):
    """Malformed instance or diagram file (CLI exit code 2)."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InstanceError(msg)


def _point(v, what: str) -> tuple[float, float]:
    _require(isinstance(v, (list, tuple)) and len(v) == 2, f"{what} must be [x, y]")
    x, y = float(v[0]), float(v[1])
    _require(math.isfinite(x) and math.isfinite(y), f"{what} must be finite")
    return (x, y)


def load_instance(f: TextIO) -> dict:
    """Parse and validate an instance file.

    Returns {"kind", "rays", "polygon", "curve"}; directions are normalized
    and polygons reordered counterclockwise.
    """
    try:
        data = json.load(f)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}") from exc
    _require(isinstance(data, dict), "instance must be a JSON object")
    _require(data.get("version") == SCHEMA_VERSION,
             f"unsupported version {data.get('version')!r}")
    kind = data.get("kind")
    _require(kind in ("rays", "polygon", "curve+rays"),
             f"unknown kind {kind!r}")
    out: dict = {"kind": kind, "rays": None, "polygon": None, "curve": None}
    if kind in ("rays", "curve+rays"):
        raw = data.get("rays")
        _require(isinstance(raw, list) and raw, "rays must be a non-empty list")
        rays = []
        for k, rec in enumerate(raw):
            _require(isinstance(rec, dict), f"ray {k} must be an object")
            apex = _point(rec.get("apex"), f"ray {k} apex")
            direction = _point(rec.get("dir"), f"ray {k} dir")
            try:
                rays.append(make_ray(apex, direction))
            except ValueError as exc:
                raise InstanceError(f"ray {k}: {exc}") from exc
        out["rays"] = rays
    if kind == "polygon":
        raw = data.get("polygon")
        _require(isinstance(raw, list) and len(raw) >= 3,
                 "polygon must list at least three vertices")
        pts = [_point(p, "polygon vertex") for p in raw]
        area2 = sum(pts[i][0] * pts[(i + 1) % len(pts)][1]
                    - pts[(i + 1) % len(pts)][0] * pts[i][1]
                    for i in range(len(pts)))
        if area2 < 0:
            pts = list(reversed(pts))
        out["polygon"] = pts
    if kind == "curve+rays":
        raw = data.get("curve")
        _require(isinstance(raw, dict), "curve must be an object")
        ck = raw.get("kind")
        if ck == "line":
            out["curve"] = CurveDomain.line_from_coeffs(
                float(raw.get("a", 0.0)), float(raw.get("b", 0.0)),
                float(raw.get("c", 0.0)))
        elif ck == "circle":
            out["curve"] = CurveDomain.circle(_point(raw.get("center"), "center"),
                                              float(raw.get("radius", 0.0)))
        elif ck == "polygon":
            verts = raw.get("vertices")
            _require(isinstance(verts, list) and len(verts) >= 3,
                     "curve polygon needs vertices")
            out["curve"] = CurveDomain.polygon([_point(p, "curve vertex")
                                                for p in verts])
        else:
            raise InstanceError(f"unknown curve kind {ck!r}")
    return out


def instance_to_json(kind: str, rays: list[Ray] | None = None,
                     polygon=None, curve: CurveDomain | None = None) -> dict:
    data: dict = {"version": SCHEMA_VERSION, "kind": kind}
    if rays is not None:
        data["rays"] = [{"apex": [r.apex[0], r.apex[1]],
                         "dir": [r.dir[0], r.dir[1]]} for r in rays]
    if polygon is not None:
        data["polygon"] = [[p[0], p[1]] for p in polygon]
    if curve is not None:
        if curve.kind == "line":
            u = curve.direction
            a, b = -u[1], u[0]
            c = a * curve.origin[0] + b * curve.origin[1]
            data["curve"] = {"kind": "line", "a": a, "b": b, "c": c}
        elif curve.kind == "circle":
            data["curve"] = {"kind": "circle",
                             "center": list(curve.center),
                             "radius": curve.radius}
        else:
            data["curve"] = {"kind": "polygon",
                             "vertices": [list(p) for p in curve.vertices]}
    return data


def dump_json(data: dict, f: TextIO) -> None:
    json.dump(data, f, indent=1, sort_keys=True)
    f.write("\n")


def _brocard_to_json(b: BrocardResult | None) -> dict | None:
    if b is None:
        return None
    return {
        "angle": b.angle,
        "witness": b.witness_kind,
        "point": None if b.point is None else [b.point[0], b.point[1]],
        "direction_site": b.direction_site,
        "param": None if b.param is None else
                 ("inf" if math.isinf(b.param) and b.param > 0 else
                  "-inf" if math.isinf(b.param) else b.param),
        "edge": b.edge_id,
        "sites": sorted(b.witness_sites),
        "attained": b.attained,
    }


def diagram_to_json(diagram: Diagram) -> dict:
    """Deterministic DiagramFile object for a built diagram."""
    order = sorted(range(len(diagram.vertices)),
                   key=lambda i: (diagram.vertices[i].distance,
                                  diagram.vertices[i].x, diagram.vertices[i].y,
                                  diagram.vertices[i].kind))
    remap = {old: new for new, old in enumerate(order)}

    def vid(old):
        return "unbounded" if old is None else remap[old]

    verts = []
    for new, old in enumerate(order):
        v = diagram.vertices[old]
        verts.append({"id": new, "kind": v.kind, "xy": [v.x, v.y],
                      "distance": v.distance,
                      "sites": sorted(int(s) for s in v.sites)})

    def carrier_json(car):
        return car.to_json()

    edge_rows = []
    for e in diagram.edges:
        edge_rows.append({
            "kind": "circular" if e.kind == "circular" else "ray",
            "sites": [(-1 if s is None else int(s)) for s in e.sites],
            "carrier": carrier_json(e.carrier),
            "endpoints": [vid(e.v0), vid(e.v1)],
        })
    edge_rows.sort(key=lambda r: (str(r["endpoints"][0]), str(r["endpoints"][1]),
                                  r["sites"], r["kind"], json.dumps(r["carrier"],
                                                                    sort_keys=True)))
    for i, row in enumerate(edge_rows):
        row["id"] = i

    faces = []
    if diagram.faces:
        for f in diagram.faces:
            if f.site is None:
                continue
            faces.append({"site": int(f.site), "bounded": f.bounded,
                          "n_edges": len(f.cycle)})
        faces.sort(key=lambda r: (r["site"], not r["bounded"], r["n_edges"]))
    elif diagram.chains:
        for s in sorted(diagram.chains):
            comps = diagram.chains[s]
            faces.append({"site": int(s), "bounded": diagram.polygon is not None,
                          "n_edges": sum(len(c) for c in comps)})

    data = {
        "version": SCHEMA_VERSION,
        "type": "diagram",
        "sites": [{"apex": [r.apex[0], r.apex[1]], "dir": [r.dir[0], r.dir[1]]}
                  for r in diagram.rays],
        "vertices": verts,
        "edges": edge_rows,
        "faces": faces,
        "brocard": _brocard_to_json(diagram.brocard),
    }
    if diagram.polygon is not None:
        data["polygon"] = [[p[0], p[1]] for p in diagram.polygon]
    return data


def envelope_to_json(env: Envelope, brocard: BrocardResult | None = None) -> dict:
    dom = env.domain
    if dom.kind == "line":
        u = dom.direction
        curve = {"kind": "line", "a": -u[1], "b": u[0],
                 "c": -u[1] * dom.origin[0] + u[0] * dom.origin[1]}
    elif dom.kind == "circle":
        curve = {"kind": "circle", "center": list(dom.center), "radius": dom.radius}
    else:
        curve = {"kind": "polygon", "vertices": [list(p) for p in dom.vertices]}
    return {
        "version": SCHEMA_VERSION,
        "type": "envelope",
        "curve": curve,
        "sites": [{"apex": [r.apex[0], r.apex[1]], "dir": [r.dir[0], r.dir[1]]}
                  for r in env.rays],
        "pieces": [{"t0": p.t0, "t1": p.t1,
                    "site": -1 if p.site is None else int(p.site)}
                   for p in env.pieces],
        "breakpoints": [[t, kind] for t, kind in env.breakpoints],
        "brocard": _brocard_to_json(brocard),
    }


def load_diagram(f: TextIO) -> dict:
    """Parse a DiagramFile (or envelope file) with basic integrity checks."""
    try:
        data = json.load(f)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"not valid JSON: {exc}") from exc
    _require(isinstance(data, dict), "diagram must be a JSON object")
    _require(data.get("version") == SCHEMA_VERSION,
             f"unsupported version {data.get('version')!r}")
    kind = data.get("type", "diagram")
    if kind == "envelope":
        _require(isinstance(data.get("pieces"), list), "envelope needs pieces")
        return data
    _require(isinstance(data.get("vertices"), list), "diagram needs vertices")
    _require(isinstance(data.get("edges"), list), "diagram needs edges")
    n_v = len(data["vertices"])
    for e in data["edges"]:
        for end in e.get("endpoints", []):
            _require(end == "unbounded" or (isinstance(end, int) and 0 <= end < n_v),
                     f"edge endpoint {end!r} out of range")
    return data
