"""Bernstein/Bezier curve algebra on the unit domain.

Provides evaluation (direct Bernstein form, with de Casteljau kept as an
independent cross-check), differentiation, degree elevation, and the
control-point upper bound on integrals of convex functions along a
curve.  Curves over shifted domains are handled at the trajectory level
by an integer offset, never here.
"""

from __future__ import annotations

import numpy as np

# Largest supported degree.  Binomials are exact in double precision far
# beyond this, and nothing downstream needs more than single digits.
DEGREE_CAP = 30


def binomial(d: int, k: int) -> float:
    """C(d, k) by the multiplicative recurrence, exact for d <= cap."""
    if d < 0 or d > DEGREE_CAP:
        raise ValueError(f"degree {d} outside [0, {DEGREE_CAP}]")
    if k < 0 or k > d:
        raise ValueError(f"index {k} outside [0, {d}]")
    k = min(k, d - k)
    out = 1.0
    for j in range(1, k + 1):
        out = out * (d - k + j) / j
    return out


def bernstein(k: int, d: int, s: float) -> float:
    """The kth Bernstein polynomial of degree d at s in [0, 1]."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"parameter {s} outside [0, 1]")
    if k < 0 or k > d:
        raise ValueError(f"index {k} outside [0, {d}]")
    return binomial(d, k) * s**k * (1.0 - s) ** (d - k)


class BezierCurve:
    """Polynomial curve in Bernstein form, degree = #control points - 1."""

    __slots__ = ("points",)

    def __init__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("control points must form a (d+1, n) array")
        if pts.shape[0] - 1 > DEGREE_CAP:
            raise ValueError(f"degree {pts.shape[0] - 1} exceeds cap {DEGREE_CAP}")
        pts = pts.copy()
        pts.flags.writeable = False
        self.points = pts

    @property
    def degree(self) -> int:
        return self.points.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def evaluate(self, s: float) -> np.ndarray:
        """Direct Bernstein-basis evaluation at s in [0, 1]."""
        d = self.degree
        weights = np.array([bernstein(k, d, s) for k in range(d + 1)])
        return weights @ self.points

    __call__ = evaluate

    def evaluate_decasteljau(self, s: float) -> np.ndarray:
        """Independent evaluation by repeated linear interpolation."""
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"parameter {s} outside [0, 1]")
        pts = np.array(self.points)
        while pts.shape[0] > 1:
            pts = (1.0 - s) * pts[:-1] + s * pts[1:]
        return pts[0]

    def derivative(self) -> "BezierCurve":
        """Hodograph: degree d-1 with control points d*(p[k+1]-p[k])."""
        d = self.degree
        if d == 0:
            raise ValueError("degree-0 curve has no derivative curve")
        return BezierCurve(d * np.diff(self.points, axis=0))

    def elevate_degree(self, d_target: int) -> "BezierCurve":
        """Same curve re-expressed with d_target+1 control points."""
        d = self.degree
        if d_target < d:
            raise ValueError(f"cannot lower degree {d} to {d_target}")
        pts = self.points
        while pts.shape[0] - 1 < d_target:
            cur = pts.shape[0] - 1
            nxt = np.empty((cur + 2, pts.shape[1]))
            nxt[0] = pts[0]
            nxt[-1] = pts[-1]
            for k in range(1, cur + 1):
                w = k / (cur + 1)
                nxt[k] = w * pts[k - 1] + (1.0 - w) * pts[k]
            pts = nxt
        return BezierCurve(pts)

    def convex_integral_bound(self, f) -> float:
        """Upper bound (1/(d+1)) * sum f(p_k) >= integral of f over the curve.

        Valid for convex f because the Bernstein weights at each s form a
        convex combination and each basis polynomial integrates to 1/(d+1).
        """
        return sum(float(f(p)) for p in self.points) / (self.degree + 1)

    def to_dict(self) -> dict:
        return {"points": self.points.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "BezierCurve":
        return cls(d["points"])

    def __eq__(self, other):
        if not isinstance(other, BezierCurve):
            return NotImplemented
        return self.points.shape == other.points.shape and bool(
            np.all(self.points == other.points)
        )

    def __hash__(self):
        return hash(self.points.tobytes())

    def __repr__(self) -> str:
        return f"BezierCurve(degree={self.degree}, dim={self.dim})"


def derivative_matrix(d: int, order: int) -> np.ndarray:
    """Matrix D with shape (d-order+1, d+1) mapping control points to the
    control points of the order-th derivative curve.

    Row k holds the scaled forward difference
    d!/(d-order)! * sum_j (-1)^(order-j) C(order, j) e_{k+j}.
    """
    if order < 0 or order > d:
        raise ValueError(f"derivative order {order} outside [0, {d}]")
    D = np.zeros((d - order + 1, d + 1))
    factor = 1.0
    for j in range(order):
        factor *= d - j
    for k in range(d - order + 1):
        for j in range(order + 1):
            D[k, k + j] = factor * (-1.0) ** (order - j) * binomial(order, j)
    return D
