"""SVG pictures of instances, graphs and routes.

The y axis is flipped so that the upward cone opens towards the top of the
picture.  Constraints are drawn thick, each graph edge is its own polyline,
the route is highlighted and the segment st is dashed.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET

from .builder import ThetaGraph
from .pslg import Instance


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def render_svg(inst: Instance, *, graph: ThetaGraph | None = None, route: list[int] | None = None,
               s: int | None = None, t: int | None = None, size: float = 800.0, margin: float = 20.0) -> str:
    pts = [p.to_float() for p in inst.vertices]
    if pts:
        xs, ys = [p[0] for p in pts], [p[1] for p in pts]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0 = x1 = y0 = y1 = 0.0
    span = max(x1 - x0, y1 - y0) or 1.0
    k = (size - 2 * margin) / span
    width = (x1 - x0) * k + 2 * margin
    height = (y1 - y0) * k + 2 * margin

    def xy(i: int) -> tuple[str, str]:
        x, y = pts[i]
        return _fmt(margin + (x - x0) * k), _fmt(margin + (y1 - y) * k)

    def poly(ids) -> str:
        return " ".join(",".join(xy(i)) for i in ids)

    root = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": _fmt(width), "height": _fmt(height),
        "viewBox": f"0 0 {_fmt(width)} {_fmt(height)}",
    })
    ET.SubElement(root, "title").text = inst.name

    if graph is not None:
        g = ET.SubElement(root, "g", {"id": "edges", "stroke": "#555", "stroke-width": "1", "fill": "none"})
        for a, b in sorted(graph.edges):
            ET.SubElement(g, "polyline", {"class": "edge", "points": poly((a, b))})

    g = ET.SubElement(root, "g", {"id": "constraints", "stroke": "#000", "stroke-width": "4",
                                 "stroke-linecap": "round", "fill": "none"})
    for a, b in inst.constraints:
        ET.SubElement(g, "polyline", {"class": "constraint", "points": poly((a, b))})

    if s is not None and t is not None:
        (sx, sy), (tx, ty) = xy(s), xy(t)
        ET.SubElement(root, "line", {"id": "st", "x1": sx, "y1": sy, "x2": tx, "y2": ty,
                                     "stroke": "#1f5fbf", "stroke-width": "1.5",
                                     "stroke-dasharray": "6 4"})

    if route:
        ET.SubElement(root, "polyline", {"id": "route", "points": poly(route), "fill": "none",
                                         "stroke": "#d62728", "stroke-width": "3",
                                         "stroke-linejoin": "round", "stroke-opacity": "0.8"})

    g = ET.SubElement(root, "g", {"id": "vertices", "fill": "#000"})
    for i in range(inst.n):
        cx, cy = xy(i)
        c = ET.SubElement(g, "circle", {"cx": cx, "cy": cy, "r": "3"})
        ET.SubElement(c, "title").text = str(i)
    for i, colour in ((s, "#1f5fbf"), (t, "#2ca02c")):
        if i is not None:
            cx, cy = xy(i)
            ET.SubElement(root, "circle", {"cx": cx, "cy": cy, "r": "5", "fill": colour})
    return ET.tostring(root, encoding="unicode") + "\n"
