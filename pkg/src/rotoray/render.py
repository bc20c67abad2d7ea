"""SVG rendering of diagram files.

Circular edges are emitted as native elliptical-arc path commands so the
drawing is exact at any zoom; rays are clipped to the viewport.  Colors
cycle per site; the Brocard witness, when present, is marked.
"""

from __future__ import annotations

import math
from typing import TextIO

_STYLE = "fill:none;stroke-width:{w}"


def _color(site: int) -> str:
    hue = (site * 67) % 360
    return f"hsl({hue},70%,40%)"


def render_svg(data: dict, f: TextIO, clip: tuple[float, float, float, float] | None = None,
               size: int = 720) -> None:
    if data.get("type") == "envelope":
        _render_envelope(data, f, clip, size)
        return
    xs: list[float] = []
    ys: list[float] = []
    for v in data.get("vertices", []):
        xs.append(v["xy"][0])
        ys.append(v["xy"][1])
    for s in data.get("sites", []):
        xs.append(s["apex"][0])
        ys.append(s["apex"][1])
    if clip is None:
        if not xs:
            xs, ys = [0.0, 1.0], [0.0, 1.0]
        pad = 0.2 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
        clip = (min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad)
    x0, y0, x1, y1 = clip
    w = x1 - x0
    h = y1 - y0
    stroke = 0.004 * max(w, h)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
           f'height="{int(size * h / w)}" viewBox="{x0} {-y1} {w} {h}">',
           f'<g transform="scale(1,-1)" style="{_STYLE.format(w=stroke)}">']
    if "polygon" in data:
        pts = " ".join(f"{p[0]},{p[1]}" for p in data["polygon"])
        out.append(f'<polygon points="{pts}" style="fill:none;stroke:#888" />')
    for e in data.get("edges", []):
        color = _color(min(s for s in e["sites"] if s >= 0) if
                       any(s >= 0 for s in e["sites"]) else 0)
        path = _carrier_path(e["carrier"], clip)
        if path:
            dash = ' stroke-dasharray="0.03"' if e["kind"] == "ray" else ""
            out.append(f'<path d="{path}" stroke="{color}"{dash} />')
    b = data.get("brocard")
    if b and b.get("point"):
        px, py = b["point"]
        out.append(f'<circle cx="{px}" cy="{py}" r="{2.5 * stroke}" '
                   f'style="fill:#d00;stroke:none" />')
    out.append("</g></svg>")
    f.write("\n".join(out) + "\n")


def _carrier_path(car: dict, clip) -> str | None:
    kind = car["type"]
    if kind == "arc":
        cx, cy = car["center"]
        r = car["radius"]
        a0 = car["angle0"]
        sweep = car["sweep"]
        x0 = cx + r * math.cos(a0)
        y0 = cy + r * math.sin(a0)
        x1 = cx + r * math.cos(a0 + sweep)
        y1 = cy + r * math.sin(a0 + sweep)
        if abs(sweep) >= 2 * math.pi - 1e-12:
            return (f"M {x0} {y0} A {r} {r} 0 1 {1 if sweep > 0 else 0} {cx + r * math.cos(a0 + math.pi)} "
                    f"{cy + r * math.sin(a0 + math.pi)} A {r} {r} 0 1 "
                    f"{1 if sweep > 0 else 0} {x1} {y1}")
        large = 1 if abs(sweep) > math.pi else 0
        sweep_flag = 1 if sweep > 0 else 0
        return f"M {x0} {y0} A {r} {r} 0 {large} {sweep_flag} {x1} {y1}"
    if kind == "segment":
        (x0, y0), (x1, y1) = car["p0"], car["p1"]
        return f"M {x0} {y0} L {x1} {y1}"
    if kind == "ray":
        ax, ay = car["apex"]
        dx, dy = car["dir"]
        t0 = car["t0"]
        t1 = car["t1"]
        if t1 is None:
            t1 = _clip_ray_param(ax, ay, dx, dy, clip)
            if t1 <= t0:
                return None
        return (f"M {ax + t0 * dx} {ay + t0 * dy} "
                f"L {ax + t1 * dx} {ay + t1 * dy}")
    return None


def _clip_ray_param(ax, ay, dx, dy, clip) -> float:
    x0, y0, x1, y1 = clip
    best = 0.0
    for (nx, ny, c) in ((1, 0, x1), (-1, 0, -x0), (0, 1, y1), (0, -1, -y0)):
        den = nx * dx + ny * dy
        if abs(den) < 1e-15:
            continue
        t = (c - nx * ax - ny * ay) / den
        if t > best:
            best = t
    return best


def _render_envelope(data: dict, f: TextIO, clip, size: int) -> None:
    curve = data["curve"]
    pieces = data["pieces"]
    apexes = [s["apex"] for s in data.get("sites", [])]
    xs = [p[0] for p in apexes] or [0.0]
    ys = [p[1] for p in apexes] or [0.0]
    if curve["kind"] == "circle":
        cx, cy = curve["center"]
        R = curve["radius"]
        xs += [cx - R, cx + R]
        ys += [cy - R, cy + R]
    elif curve["kind"] == "polygon":
        xs += [p[0] for p in curve["vertices"]]
        ys += [p[1] for p in curve["vertices"]]
    if clip is None:
        pad = 0.2 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
        clip = (min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad)
    x0, y0, x1, y1 = clip
    w, h = x1 - x0, y1 - y0
    stroke = 0.006 * max(w, h)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
           f'height="{int(size * h / w)}" viewBox="{x0} {-y1} {w} {h}">',
           f'<g transform="scale(1,-1)" style="{_STYLE.format(w=stroke)}">']
    from .envelope import CurveDomain
    if curve["kind"] == "line":
        dom = CurveDomain.line_from_coeffs(curve["a"], curve["b"], curve["c"])
    elif curve["kind"] == "circle":
        dom = CurveDomain.circle(tuple(curve["center"]), curve["radius"])
    else:
        dom = CurveDomain.polygon(curve["vertices"])
    for p in pieces:
        color = "#bbb" if p["site"] < 0 else _color(p["site"])
        pts = []
        steps = 32
        for k in range(steps + 1):
            t = p["t0"] + (p["t1"] - p["t0"]) * k / steps
            q = dom.point_at(t)
            pts.append(f"{q[0]},{q[1]}")
        out.append(f'<polyline points="{" ".join(pts)}" stroke="{color}" />')
    for i, a in enumerate(apexes):
        out.append(f'<circle cx="{a[0]}" cy="{a[1]}" r="{1.5 * stroke}" '
                   f'style="fill:{_color(i)};stroke:none" />')
    out.append("</g></svg>")
    f.write("\n".join(out) + "\n")
