"""SVG pictures of 2D scenes: safe regions, the planned curve, control points.

The world is drawn on a dark background so uncovered space reads as
obstacle; regions are light polygons, the trajectory a sampled
polyline, control points small markers.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection

BACKGROUND = "#2b2b33"
REGION_FILL = "#9fc2e8"
REGION_EDGE = "#5b7ea6"
CURVE = "#d94f3d"
MARKER = "#7a1f14"


def _chebyshev_center(A, b):
    """Center and radius of the largest inscribed ball of Ax <= b."""
    norms = np.linalg.norm(A, axis=1)
    res = linprog(
        c=np.r_[np.zeros(A.shape[1]), -1.0],
        A_ub=np.hstack([A, norms[:, None]]),
        b_ub=b,
        bounds=[(None, None)] * A.shape[1] + [(0, None)],
        method="highs",
    )
    if not res.success:
        return None, 0.0
    return res.x[:-1], float(-res.fun)


def region_polygon(region) -> np.ndarray:
    """Ordered vertex ring of a 2D region, (k, 2).

    Falls back to the bounding rectangle when the region is too thin
    for a reliable halfspace intersection.
    """
    A, b = region.halfspaces()
    center, radius = _chebyshev_center(A, b)
    if center is not None and radius > 1e-9:
        try:
            hs = HalfspaceIntersection(np.hstack([A, -b[:, None]]), center)
            pts = np.unique(np.round(hs.intersections, 9), axis=0)
            order = np.argsort(np.arctan2(*(pts - pts.mean(axis=0)).T[::-1]))
            return pts[order]
        except Exception:
            pass
    lo, hi = region.bounding_box()
    return np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])


def _fmt(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".")


class _Scene:
    """World-to-screen mapping plus element emission."""

    def __init__(self, lo, hi, width):
        pad = 0.04 * max(hi[0] - lo[0], hi[1] - lo[1], 1e-9)
        self.lo = lo - pad
        self.hi = hi + pad
        self.scale = width / (self.hi[0] - self.lo[0])
        self.w = width
        self.h = self.scale * (self.hi[1] - self.lo[1])
        self.root = ET.Element(
            "svg",
            xmlns="http://www.w3.org/2000/svg",
            width=_fmt(self.w),
            height=_fmt(self.h),
            viewBox=f"0 0 {_fmt(self.w)} {_fmt(self.h)}",
        )
        ET.SubElement(
            self.root,
            "rect",
            x="0",
            y="0",
            width=_fmt(self.w),
            height=_fmt(self.h),
            fill=BACKGROUND,
        )

    def to_screen(self, p):
        x = (p[0] - self.lo[0]) * self.scale
        y = self.h - (p[1] - self.lo[1]) * self.scale
        return x, y

    def points_attr(self, pts) -> str:
        return " ".join(
            f"{_fmt(x)},{_fmt(y)}" for x, y in (self.to_screen(p) for p in pts)
        )


def render_svg(
    problem,
    trajectory=None,
    *,
    samples_per_segment: int = 120,
    width: float = 640.0,
) -> str:
    """Render a 2D planning problem (and optionally its trajectory) to SVG.

    The curve is sampled ``samples_per_segment`` times on each segment;
    control points of the position curves are drawn as circles.
    """
    if problem.spec.dim != 2:
        raise ValueError(
            f"can only render 2D scenes, this problem lives in {problem.spec.dim}D"
        )
    boxes = [Q.bounding_box() for Q in problem.regions]
    lo = np.min([b[0] for b in boxes], axis=0)
    hi = np.max([b[1] for b in boxes], axis=0)
    scene = _Scene(lo, hi, width)

    regions_el = ET.SubElement(scene.root, "g", {"class": "regions"})
    for Q in problem.regions:
        ET.SubElement(
            regions_el,
            "polygon",
            points=scene.points_attr(region_polygon(Q)),
            fill=REGION_FILL,
            stroke=REGION_EDGE,
            attrib={"fill-opacity": "0.85", "stroke-width": "1"},
        )

    if trajectory is not None:
        samples = []
        for r, _h in trajectory.segments:
            for s in np.linspace(0.0, 1.0, samples_per_segment):
                samples.append(r.evaluate(s))
        ET.SubElement(
            scene.root,
            "polyline",
            points=scene.points_attr(samples),
            fill="none",
            stroke=CURVE,
            attrib={"stroke-width": "2.5"},
        )
        markers = ET.SubElement(scene.root, "g", {"class": "control-points"})
        for r, _h in trajectory.segments:
            for p in r.points:
                x, y = scene.to_screen(p)
                ET.SubElement(
                    markers,
                    "circle",
                    cx=_fmt(x),
                    cy=_fmt(y),
                    r="2.2",
                    fill=MARKER,
                )

    for q, color in ((problem.spec.q0, "#ffffff"), (problem.spec.qT, "#ffd24d")):
        x, y = scene.to_screen(q)
        ET.SubElement(
            scene.root, "circle", cx=_fmt(x), cy=_fmt(y), r="4", fill=color
        )

    return ET.tostring(scene.root, encoding="unicode")
