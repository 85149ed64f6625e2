"""Bounded convex sets (H-polytopes, boxes, singletons) and set queries.

Every set lowers to a canonical H-representation ``A x <= b``; boxes and
singletons do so lazily.  Boundedness is enforced at construction: either
an explicit bounding box is supplied or one is derived from 2n support
LPs.  Values are immutable and safe to share.
"""

from __future__ import annotations

import numpy as np

from gcsplan.conic import ConicProgram, SolverError

# Absolute slack accepted by membership tests; interior-point primal
# solutions satisfy constraints only to solver tolerance.
ABS_TOL = 1e-7


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


class ConvexSet:
    """A bounded convex set tagged as h_polytope, box, or singleton."""

    __slots__ = ("kind", "_A", "_b", "_lo", "_hi", "_x", "_dim")

    def __init__(self, *_args, **_kwargs):
        raise TypeError("use ConvexSet.h_polytope / .box / .singleton")

    @classmethod
    def _make(cls) -> "ConvexSet":
        self = object.__new__(cls)
        self._A = self._b = self._lo = self._hi = self._x = None
        return self

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def h_polytope(cls, A, b, *, bounding_box=None) -> "ConvexSet":
        """Set {x : A x <= b}; must be nonempty and bounded.

        Pass ``bounding_box=(lo, hi)`` to skip the 2n support LPs that
        otherwise verify boundedness (the box is then trusted).
        """
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        if A.ndim != 2 or A.shape[0] == 0 or A.shape[1] == 0:
            raise ValueError("A must be a nonempty matrix")
        if A.shape[0] != b.size:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.size}")
        self = cls._make()
        self.kind = "hpolytope"
        self._dim = A.shape[1]
        self._A = _frozen(A)
        self._b = _frozen(b)
        if bounding_box is not None:
            lo, hi = bounding_box
            self._lo = _frozen(lo)
            self._hi = _frozen(hi)
            if self._lo.size != self._dim or self._hi.size != self._dim:
                raise ValueError("bounding box dimension mismatch")
        else:
            self._lo, self._hi = _support_box(A, b)
        return self

    @classmethod
    def box(cls, lo, hi) -> "ConvexSet":
        """Axis-aligned box {x : lo <= x <= hi}."""
        lo = np.asarray(lo, dtype=float).ravel()
        hi = np.asarray(hi, dtype=float).ravel()
        if lo.size != hi.size or lo.size == 0:
            raise ValueError("box bounds must share a positive dimension")
        if np.any(lo > hi):
            raise ValueError("box lower bound exceeds upper bound")
        self = cls._make()
        self.kind = "box"
        self._dim = lo.size
        self._lo = _frozen(lo)
        self._hi = _frozen(hi)
        return self

    @classmethod
    def singleton(cls, x) -> "ConvexSet":
        """The one-point set {x}."""
        x = np.asarray(x, dtype=float).ravel()
        if x.size == 0:
            raise ValueError("singleton needs a positive dimension")
        self = cls._make()
        self.kind = "point"
        self._dim = x.size
        self._x = _frozen(x)
        self._lo = self._x
        self._hi = self._x
        return self

    # ------------------------------------------------------------------
    # canonical forms

    @property
    def dim(self) -> int:
        return self._dim

    def halfspaces(self) -> tuple[np.ndarray, np.ndarray]:
        """Canonical H-form (A, b) with the set equal to {x : A x <= b}."""
        if self._A is None:
            eye = np.eye(self._dim)
            self._A = _frozen(np.vstack([eye, -eye]))
            self._b = _frozen(np.concatenate([self._hi, -self._lo]))
        return self._A, self._b

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self._lo, self._hi

    # ------------------------------------------------------------------
    # queries

    def contains(self, point, tol: float = ABS_TOL) -> bool:
        point = np.asarray(point, dtype=float).ravel()
        if point.size != self._dim:
            raise ValueError(f"point has dimension {point.size}, set has {self._dim}")
        A, b = self.halfspaces()
        return bool(np.all(A @ point <= b + tol))

    def intersects(self, other: "ConvexSet") -> bool:
        """True iff the intersection is nonempty (touching counts).

        Decided by an LP feasibility problem; a solver failure raises
        rather than reporting False.
        """
        if other._dim != self._dim:
            raise ValueError("sets have different dimensions")
        # Box/box and point cases have closed forms; the LP remains the
        # reference route and the two are cross-checked in the tests.
        if self.kind != "hpolytope" and other.kind != "hpolytope":
            return bool(
                np.all(self._lo <= other._hi + ABS_TOL)
                and np.all(other._lo <= self._hi + ABS_TOL)
            )
        if self.kind == "point":
            return other.contains(self._x)
        if other.kind == "point":
            return self.contains(other._x)
        return lp_intersects(self, other)

    # ------------------------------------------------------------------
    # serialization & comparison

    def to_dict(self) -> dict:
        if self.kind == "box":
            return {"type": "box", "lo": self._lo.tolist(), "hi": self._hi.tolist()}
        if self.kind == "point":
            return {"type": "point", "x": self._x.tolist()}
        return {"type": "hpolytope", "A": self._A.tolist(), "b": self._b.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ConvexSet":
        t = d["type"]
        if t == "box":
            return cls.box(d["lo"], d["hi"])
        if t == "point":
            return cls.singleton(d["x"])
        if t == "hpolytope":
            return cls.h_polytope(d["A"], d["b"])
        raise ValueError(f"unknown set type {t!r}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvexSet):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))

    def __repr__(self) -> str:
        if self.kind == "box":
            return f"ConvexSet.box({self._lo.tolist()}, {self._hi.tolist()})"
        if self.kind == "point":
            return f"ConvexSet.singleton({self._x.tolist()})"
        return f"ConvexSet.h_polytope(<{self._A.shape[0]} rows, dim {self._dim}>)"


def _support_box(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bounding box from 2n support LPs; rejects empty or unbounded sets."""
    n = A.shape[1]
    lo = np.empty(n)
    hi = np.empty(n)
    for i in range(n):
        for sign, out in ((1.0, hi), (-1.0, lo)):
            prog = ConicProgram()
            x = prog.add_vars(n)
            prog.add_ineq(A, x, b)
            prog.add_cost([x[i]], [-sign])  # maximize sign * x_i
            res = prog.solve(backend="highs")
            if res.status == "unbounded":
                raise ValueError(f"polytope is unbounded in coordinate {i}")
            if res.status == "infeasible":
                raise ValueError("polytope is empty")
            if res.status != "optimal":
                raise SolverError(f"support LP failed: {res.diagnostics}")
            out[i] = sign * -res.objective
    return _frozen(lo), _frozen(hi)


def lp_intersects(a: ConvexSet, b: ConvexSet) -> bool:
    """LP-feasibility route for intersection, usable as an oracle."""
    prog = ConicProgram()
    x = prog.add_vars(a.dim)
    for s in (a, b):
        A, bb = s.halfspaces()
        prog.add_ineq(A, x, bb)
    res = prog.solve(backend="highs")
    if res.status == "optimal":
        return True
    if res.status == "infeasible":
        return False
    raise SolverError(f"intersection LP returned {res.status}: {res.diagnostics}")


# Module-level aliases matching the operation names used elsewhere.


def contains(s: ConvexSet, point, tol: float = ABS_TOL) -> bool:
    return s.contains(point, tol=tol)


def intersects(a: ConvexSet, b: ConvexSet) -> bool:
    return a.intersects(b)


def scale_set(s: ConvexSet, factor: float) -> ConvexSet:
    """The perspective cross-section {x : A x <= factor * b}.

    At factor 1 this is membership; at factor 0 a bounded set collapses
    to the origin (its recession cone).  The relaxation uses the same
    (A, b) data symbolically as the block A x - b phi <= 0.
    """
    if factor < 0:
        raise ValueError("scale factor must be nonnegative")
    A, b = s.halfspaces()
    lo, hi = s.bounding_box()
    return ConvexSet.h_polytope(
        A, factor * b, bounding_box=(factor * lo, factor * hi)
    )
